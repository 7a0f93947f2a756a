//! Small numerical building blocks shared by the profile, solver and
//! construction modules.

pub mod interp;
pub mod ode;
pub mod quad;
pub mod tridiag;

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Aitken extrapolation of three successive terms of a sequence converging
/// geometrically. Returns `None` when the differences do not shrink.
pub fn aitken(a0: f64, a1: f64, a2: f64) -> Option<f64> {
    let d1 = a1 - a0;
    let d2 = a2 - a1;
    let denom = d2 - d1;
    if !denom.is_finite() || denom == 0.0 || d2.abs() >= d1.abs() {
        return None;
    }
    let lim = a2 - d2 * d2 / denom;
    lim.is_finite().then_some(lim)
}
