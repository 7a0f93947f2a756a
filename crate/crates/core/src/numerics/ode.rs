//! Dormand–Prince 5(4) with step-size control, for small fixed-size systems.
//!
//! Integration may run forward or backward in the independent variable.
//! Requested output points are hit exactly by clipping the step, so no
//! interpolation error enters sampled values.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on |h|.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// One accepted step: `(t, y, dy/dt)` at the end of the step.
pub struct StepView<'a, const N: usize> {
    pub t: f64,
    pub y: &'a [f64; N],
    pub dy: &'a [f64; N],
}

/// Integrates `y' = rhs(t, y)` from `t0` towards `t_end`, calling `on_step`
/// after every accepted step. `on_step` may stop the integration early.
/// Returns the final `(t, y)`.
pub fn integrate<const N: usize, F, S>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
    mut on_step: S,
) -> Result<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: FnMut(StepView<'_, N>) -> ControlFlow<()>,
{
    let span = t_end - t0;
    if span == 0.0 {
        return Ok((t0, y0));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = initial_step(&rhs, t, &y, &k1, dir, opts).min(span.abs());
    let mut steps = 0usize;
    let mut last_fail = false;

    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integrator(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        let remaining = (t_end - t).abs();
        let mut hs = h.min(opts.h_max);
        let lands = hs >= remaining * (1.0 - 1e-12);
        if lands {
            hs = remaining;
        }
        let hh = dir * hs;

        let k2 = rhs(t + C2 * hh, &axpy(&y, &[(hh * A21, &k1)]));
        let k3 = rhs(t + C3 * hh, &axpy(&y, &[(hh * A31, &k1), (hh * A32, &k2)]));
        let k4 = rhs(
            t + C4 * hh,
            &axpy(&y, &[(hh * A41, &k1), (hh * A42, &k2), (hh * A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * hh,
            &axpy(
                &y,
                &[(hh * A51, &k1), (hh * A52, &k2), (hh * A53, &k3), (hh * A54, &k4)],
            ),
        );
        let k6 = rhs(
            t + hh,
            &axpy(
                &y,
                &[
                    (hh * A61, &k1),
                    (hh * A62, &k2),
                    (hh * A63, &k3),
                    (hh * A64, &k4),
                    (hh * A65, &k5),
                ],
            ),
        );
        let y_new = axpy(
            &y,
            &[
                (hh * A71, &k1),
                (hh * A73, &k3),
                (hh * A74, &k4),
                (hh * A75, &k5),
                (hh * A76, &k6),
            ],
        );
        let t_new = if lands { t_end } else { t + hh };
        let k7 = rhs(t_new, &y_new);

        let mut err = 0.0;
        for i in 0..N {
            let e = hh
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            if hs < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Integrator(format!("non-finite state at t = {t}")));
            }
            h = hs * 0.1;
            last_fail = true;
            continue;
        }

        if err <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            let mut factor = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
            factor = factor.clamp(0.2, 5.0);
            if last_fail {
                factor = factor.min(1.0);
            }
            last_fail = false;
            h = hs * factor;
            if on_step(StepView { t, y: &y, dy: &k1 }).is_break() {
                break;
            }
        } else {
            let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h = hs * factor;
            last_fail = true;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::Integrator(format!("step size underflow at t = {t}")));
            }
        }
    }
    Ok((t, y))
}

fn initial_step<const N: usize, F>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    dir: f64,
    opts: &Options,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N]| {
        let mut s = 0.0;
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs();
            s += (v[i] / sc).powi(2);
        }
        (s / N as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, &[(dir * h0, f0)]);
    let f1 = rhs(t + dir * h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.h_max)
}

/// Values of the solution at each of `points`, which must be monotone in
/// the direction of integration starting from `t0`.
pub fn sample<const N: usize, F>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    points: &[f64],
    opts: &Options,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(points.len());
    let mut t = t0;
    let mut y = y0;
    for &p in points {
        let (tn, yn) = integrate(&rhs, t, y, p, opts, |_| ControlFlow::Continue(()))?;
        t = tn;
        y = yn;
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_forward_and_backward() {
        let opts = Options { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let (_, y) = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &opts, |_| {
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!((y[0] - 2f64.exp()).abs() < 1e-10);
        let (_, y) = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], -3.0, &opts, |_| {
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!((y[0] - (-3f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn harmonic_oscillator_samples() {
        let opts = Options { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let pts: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let ys = sample(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &pts, &opts).unwrap();
        for (p, y) in pts.iter().zip(&ys) {
            assert!((y[0] - p.sin()).abs() < 1e-9, "{p}: {}", y[0]);
        }
    }

    #[test]
    fn early_stop() {
        let mut count = 0;
        let (t, _) = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            10.0,
            &Options::default(),
            |v| {
                count += 1;
                if v.y[0] > 5.0 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        assert!(t < 10.0 && t > 5f64.ln());
        assert!(count > 1);
    }
}
