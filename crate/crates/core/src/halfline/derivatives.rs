//! Finite-difference derivatives of sampled fields.
//!
//! Space: centered differences inside, one-sided second order for `u_x` at
//! both ends, a one-sided four-point `u_xx` at `x = L` and `u_xx(0) =
//! u_t(0) - f(u(0))` at the Dirichlet end. Time: three-point differences on
//! the (possibly nonuniform) snapshot times; a lone snapshot uses the
//! equation itself.

use serde::Serialize;

use super::grid::Trajectory;
use crate::reaction::Reaction;

#[derive(Debug, Clone, Serialize)]
pub struct FieldDerivatives {
    pub t: f64,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
    pub ut: Vec<f64>,
}

/// `(u_x, u_xx)`; the boundary entry of `u_xx` at `x = 0` is left as 0.
pub fn space_derivatives(u: &[f64], dx: f64) -> (Vec<f64>, Vec<f64>) {
    let n = u.len() - 1;
    assert!(n >= 3, "need at least four nodes");
    let mut ux = vec![0.0; n + 1];
    let mut uxx = vec![0.0; n + 1];
    ux[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx);
    ux[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * dx);
    let h2 = dx * dx;
    for i in 1..n {
        ux[i] = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        uxx[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    }
    uxx[n] = (2.0 * u[n] - 5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) / h2;
    (ux, uxx)
}

/// `u_t` at snapshot `j` from neighbouring snapshots.
pub fn time_derivatives(traj: &Trajectory, j: usize) -> Option<Vec<f64>> {
    let s = &traj.snapshots;
    let m = s.len();
    if m < 2 {
        return None;
    }
    let (a, b, c, wa, wb, wc) = if m == 2 {
        let h = s[1].t - s[0].t;
        (0, 1, 1, -1.0 / h, 1.0 / h, 0.0)
    } else {
        let (i0, i1, i2) = if j == 0 {
            (0, 1, 2)
        } else if j == m - 1 {
            (m - 3, m - 2, m - 1)
        } else {
            (j - 1, j, j + 1)
        };
        let (t0, t1, t2) = (s[i0].t, s[i1].t, s[i2].t);
        let t = s[j].t;
        // derivative of the quadratic Lagrange interpolant at t
        let w0 = ((t - t1) + (t - t2)) / ((t0 - t1) * (t0 - t2));
        let w1 = ((t - t0) + (t - t2)) / ((t1 - t0) * (t1 - t2));
        let w2 = ((t - t0) + (t - t1)) / ((t2 - t0) * (t2 - t1));
        (i0, i1, i2, w0, w1, w2)
    };
    Some(
        (0..s[j].u.len())
            .map(|i| wa * s[a].u[i] + wb * s[b].u[i] + wc * s[c].u[i])
            .collect(),
    )
}

/// Derivatives at every snapshot of `traj` for `u_t = u_xx + f(u)` with a
/// time-independent Dirichlet value.
pub fn discrete_derivatives(traj: &Trajectory, dx: f64, r: &Reaction) -> Vec<FieldDerivatives> {
    (0..traj.snapshots.len())
        .map(|j| {
            let u = &traj.snapshots[j].u;
            let (ux, mut uxx) = space_derivatives(u, dx);
            let ut = match time_derivatives(traj, j) {
                Some(mut ut) => {
                    ut[0] = 0.0;
                    ut
                }
                None => {
                    let mut ut: Vec<f64> =
                        uxx.iter().zip(u).map(|(d2, &v)| d2 + r.f(v)).collect();
                    ut[0] = 0.0;
                    ut
                }
            };
            uxx[0] = ut[0] - r.f(u[0]);
            FieldDerivatives { t: traj.snapshots[j].t, ux, uxx, ut }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::{Field, Grid};

    #[test]
    fn ramp_is_exact() {
        let dx = 1.0 / 16.0;
        let u: Vec<f64> = (0..=80).map(|i| i as f64 * dx).collect();
        let tr = Trajectory { snapshots: vec![Field::new(0.0, u)], ..Default::default() };
        let d = &discrete_derivatives(&tr, dx, &Reaction::logistic())[0];
        assert!(d.ux.iter().all(|&v| v == 1.0));
        assert!(d.uxx.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_in_time_is_exact() {
        let g = Grid::new(4.0, 64, 0.0625).unwrap();
        let ts = [0.0, 0.1, 0.35, 0.5];
        let snaps = ts
            .iter()
            .map(|&t| Field::new(t, g.sample(|x| x * (1.0 + t * t))))
            .collect();
        let tr = Trajectory { snapshots: snaps, ..Default::default() };
        for (j, &t) in ts.iter().enumerate() {
            let ut = time_derivatives(&tr, j).unwrap();
            for (i, v) in ut.iter().enumerate() {
                assert!((v - 2.0 * t * g.x(i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_in_space() {
        let dx = 0.125;
        let u: Vec<f64> = (0..=40).map(|i| (i as f64 * dx).powi(2)).collect();
        let (ux, uxx) = space_derivatives(&u, dx);
        assert!((ux[0]).abs() < 1e-13 && (ux[40] - 10.0).abs() < 1e-12);
        assert!(uxx[1..].iter().all(|&v| (v - 2.0).abs() < 1e-11));
    }
}
