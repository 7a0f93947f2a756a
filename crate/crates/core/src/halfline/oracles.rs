use std::f64::consts::PI;

use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Solution of `w_t = w_xx + mu^2 w` on the half line with `w(0,t) = 0`
/// and constant data `eps1`, and its boundary slope `w_x(0,t)`.
pub fn oracle_w(eps1: f64, mu: f64, x: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("oracle needs t > 0, got {t}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("oracle needs x >= 0, got {x}")));
    }
    let growth = eps1 * (mu * mu * t).exp();
    Ok((growth * erf(x / (2.0 * t.sqrt())), growth / (PI * t).sqrt()))
}

/// Solution of `v_t = v_xx + b v` on `[x1, inf)` with `v(x1,t) = 0` and
/// constant data `eps1 / 2`.
pub fn oracle_v(eps1: f64, b: f64, x1: f64, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("oracle needs t > 0, got {t}")));
    }
    if x < x1 {
        return Err(Error::Domain(format!("oracle needs x >= x1, got {x} < {x1}")));
    }
    Ok(0.5 * eps1 * (b * t).exp() * erf((x - x1) / (2.0 * t.sqrt())))
}

/// `v(inf, t) = eps1 e^{bt} / 2`.
pub fn oracle_v_far(eps1: f64, b: f64, t: f64) -> f64 {
    0.5 * eps1 * (b * t).exp()
}
