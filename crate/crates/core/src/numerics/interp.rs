//! Piecewise interpolation helpers.

/// Cubic Hermite interpolant on `[x0, x1]` with end values and slopes.
#[inline]
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Derivative of [`hermite`] with respect to `x`.
#[inline]
pub fn hermite_slope(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
}

/// Fritsch–Carlson limiting of node slopes for monotone data. Slopes that
/// already keep the interpolant monotone are left untouched.
pub fn limit_monotone_slopes(x: &[f64], y: &[f64], slopes: &mut [f64]) {
    let n = x.len();
    for i in 0..n.saturating_sub(1) {
        let delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if delta == 0.0 {
            slopes[i] = 0.0;
            slopes[i + 1] = 0.0;
            continue;
        }
        if slopes[i] * delta < 0.0 {
            slopes[i] = 0.0;
        }
        if slopes[i + 1] * delta < 0.0 {
            slopes[i + 1] = 0.0;
        }
        let a = slopes[i] / delta;
        let b = slopes[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            slopes[i] = tau * a * delta;
            slopes[i + 1] = tau * b * delta;
        }
    }
}

/// Index `i` with `xs[i] <= x < xs[i+1]` on a sorted grid, clamped to the
/// valid interval range.
pub fn bracket(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    if x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(n - 2),
        Err(i) => i - 1,
    }
}

/// Linear interpolation on a sorted grid; clamps outside the range.
pub fn linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = bracket(xs, x);
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    (1.0 - w) * ys[i] + w * ys[i + 1]
}

/// Linear interpolation on a uniform grid `x_i = x0 + i*h`.
pub fn linear_uniform(x0: f64, h: f64, ys: &[f64], x: f64) -> f64 {
    let pos = (x - x0) / h;
    if pos <= 0.0 {
        return ys[0];
    }
    let last = ys.len() - 1;
    if pos >= last as f64 {
        return ys[last];
    }
    let i = (pos.floor() as usize).min(last - 1);
    let w = pos - i as f64;
    (1.0 - w) * ys[i] + w * ys[i + 1]
}
