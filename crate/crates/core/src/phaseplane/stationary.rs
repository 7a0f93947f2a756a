use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{interp, ode, quad};
use crate::reaction::Reaction;

/// Default closeness of `V(x_max)` to 1.
pub const FAR_TOL: f64 = 1e-6;

const QUAD_RTOL: f64 = 1e-13;

/// Stationary solution `V` on a uniform grid over `[0, x_max]`.
#[derive(Debug, Clone, Serialize)]
pub struct StationaryProfile {
    pub dx: f64,
    pub v: Vec<f64>,
    /// `V'` at the nodes.
    pub vp: Vec<f64>,
    pub vp0: f64,
    pub far_tol: f64,
    /// Rate of approach to 1 beyond the grid, `sqrt(-f'(1))`.
    pub decay: f64,
}

/// `2 * int_q^1 f`.
fn energy(r: &Reaction, q: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    2.0 * quad::adaptive_simpson(|s| r.f(s), q, 1.0, QUAD_RTOL)
}

pub fn stationary(r: &Reaction, x_max: f64, nx: usize) -> Result<StationaryProfile> {
    stationary_with(r, x_max, nx, FAR_TOL)
}

pub fn stationary_with(
    r: &Reaction,
    x_max: f64,
    nx: usize,
    far_tol: f64,
) -> Result<StationaryProfile> {
    if !(x_max > 0.0 && x_max.is_finite()) || nx < 16 {
        return Err(Error::Domain(format!("need x_max > 0 and nx >= 16, got {x_max}, {nx}")));
    }
    if !(far_tol > 0.0 && far_tol < 1.0) {
        return Err(Error::Domain(format!("far_tol must lie in (0,1), got {far_tol}")));
    }
    let e0 = energy(r, 0.0);
    if !(e0 > 0.0) {
        return Err(Error::InvalidReaction(format!("int_0^1 f = {} is not positive", e0 / 2.0)));
    }
    let scan = 2000;
    for k in 1..scan {
        let q = k as f64 / scan as f64;
        if q >= 1.0 - far_tol {
            break;
        }
        if energy(r, q) <= 0.0 {
            return Err(Error::InvalidReaction(format!("int_q^1 f is not positive at q = {q}")));
        }
    }
    let dx = x_max / nx as f64;
    let rhs = |_: f64, y: &[f64; 1]| {
        if y[0] >= 1.0 {
            [0.0]
        } else {
            [energy(r, y[0]).max(0.0).sqrt()]
        }
    };
    let opts = ode::Options { rtol: 1e-12, atol: 1e-15, h_max: 0.25, ..Default::default() };
    let mut v = vec![0.0; nx + 1];
    let mut t = 0.0;
    let mut y = [0.0];
    for (i, slot) in v.iter_mut().enumerate().skip(1) {
        let target = i as f64 * dx;
        let (tn, yn) =
            ode::integrate(rhs, t, y, target, &opts, |_| ControlFlow::Continue(()))?;
        t = tn;
        y = yn;
        *slot = y[0].min(1.0);
    }
    let vp: Vec<f64> = v.iter().map(|&q| energy(r, q).max(0.0).sqrt()).collect();
    let last = v[nx];
    if !(last > 1.0 - far_tol) {
        return Err(Error::Domain(format!(
            "V(x_max) = {last} has not reached 1 - {far_tol}; enlarge x_max"
        )));
    }
    Ok(StationaryProfile { dx, vp0: vp[0], v, vp, far_tol, decay: (-r.fp1()).max(0.0).sqrt() })
}

impl StationaryProfile {
    pub fn x_max(&self) -> f64 {
        self.dx * (self.v.len() - 1) as f64
    }

    pub fn x(&self) -> Vec<f64> {
        (0..self.v.len()).map(|i| i as f64 * self.dx).collect()
    }

    /// `V(x)` for `x >= 0`, with an exponential approach to 1 past the grid.
    pub fn value(&self, x: f64) -> f64 {
        let n = self.v.len() - 1;
        if x <= 0.0 {
            return 0.0;
        }
        let xm = self.x_max();
        if x >= xm {
            return 1.0 - (1.0 - self.v[n]) * (-self.decay * (x - xm)).exp();
        }
        let i = ((x / self.dx) as usize).min(n - 1);
        let x0 = i as f64 * self.dx;
        interp::hermite(x0, x0 + self.dx, self.v[i], self.v[i + 1], self.vp[i], self.vp[i + 1], x)
    }

    pub fn slope(&self, x: f64) -> f64 {
        let n = self.v.len() - 1;
        let xm = self.x_max();
        if x >= xm {
            return self.decay * (1.0 - self.v[n]) * (-self.decay * (x - xm)).exp();
        }
        let x = x.max(0.0);
        let i = ((x / self.dx) as usize).min(n - 1);
        let x0 = i as f64 * self.dx;
        interp::hermite_slope(
            x0,
            x0 + self.dx,
            self.v[i],
            self.v[i + 1],
            self.vp[i],
            self.vp[i + 1],
            x,
        )
    }

    /// Samples `V` at `x_i = i * dx`, `i = 0..=nx`.
    pub fn sample(&self, dx: f64, nx: usize) -> Vec<f64> {
        (0..=nx).map(|i| self.value(i as f64 * dx)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_slope_at_origin() {
        let r = Reaction::logistic();
        let p = stationary(&r, 30.0, 3000).unwrap();
        assert!((p.vp0 - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(p.v[0], 0.0);
        assert!(p.v.windows(2).all(|w| w[1] >= w[0]));
        assert!(p.v[3000] > 1.0 - FAR_TOL);
        assert!(*p.vp.last().unwrap() < 1e-6);
    }

    #[test]
    fn slope_at_half_level() {
        let r = Reaction::logistic();
        let p = stationary(&r, 30.0, 3000).unwrap();
        let (mut lo, mut hi) = (0.0, 30.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if p.value(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((p.slope(lo) - (1.0f64 / 6.0).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn concave_and_consistent() {
        let r = Reaction::sine();
        let p = stationary(&r, 30.0, 3000).unwrap();
        let n = p.v.len();
        for i in 1..n - 1 {
            let d2 = (p.v[i + 1] - 2.0 * p.v[i] + p.v[i - 1]) / (p.dx * p.dx);
            assert!(d2 <= 1e-9, "{i}: {d2}");
            let fd = (p.v[i + 1] - p.v[i - 1]) / (2.0 * p.dx);
            assert!((fd - p.vp[i]).abs() < 1e-4);
        }
        for (q, s) in p.v.iter().zip(&p.vp) {
            assert!((s * s - energy(&r, *q)).abs() < 1e-8);
        }
    }

    #[test]
    fn errors() {
        let r = Reaction::logistic();
        assert!(matches!(stationary(&r, 3.0, 300), Err(Error::Domain(_))));
        assert!(matches!(stationary(&r, 30.0, 8), Err(Error::Domain(_))));
        let bad = Reaction::custom(
            "negative-mass",
            |u| u * (1.0 - u) * (1.0 - 3.0 * u),
            |u| 1.0 - 8.0 * u + 9.0 * u * u,
            None,
        )
        .unwrap();
        assert!(matches!(stationary(&bad, 30.0, 300), Err(Error::InvalidReaction(_))));
        let stalls = Reaction::custom(
            "stall",
            |u| u * (1.0 - u) * (1.0 - 1.8 * u),
            |u| 1.0 - 5.6 * u + 5.4 * u * u,
            None,
        )
        .unwrap();
        assert!(matches!(stationary(&stalls, 30.0, 300), Err(Error::InvalidReaction(_))));
    }
}
