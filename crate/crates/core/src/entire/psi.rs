use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::halfline::Grid;
use crate::reaction::Reaction;

/// End of the sine piece, `sqrt(2) pi / mu`.
fn junction(r: &Reaction) -> f64 {
    SQRT_2 * PI / r.mu()
}

/// Small concave initial datum: `(sin y + y) / ((n+N) pi)` with
/// `y = mu x / sqrt 2` up to the junction, then the constant `1/(n+N)`.
pub fn psi_n(r: &Reaction, n: usize, big_n: usize, x: f64) -> f64 {
    let h = (n + big_n) as f64;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= junction(r) {
        return 1.0 / h;
    }
    let y = r.mu() * x / SQRT_2;
    (y.sin() + y) / (h * PI)
}

pub fn psi_n_prime(r: &Reaction, n: usize, big_n: usize, x: f64) -> f64 {
    if x >= junction(r) {
        return 0.0;
    }
    let k = r.mu() / SQRT_2;
    let y = k * x.max(0.0);
    k * (y.cos() + 1.0) / ((n + big_n) as f64 * PI)
}

pub fn psi_n_second(r: &Reaction, n: usize, big_n: usize, x: f64) -> f64 {
    if x >= junction(r) {
        return 0.0;
    }
    let k = r.mu() / SQRT_2;
    let y = k * x.max(0.0);
    -k * k * y.sin() / ((n + big_n) as f64 * PI)
}

pub fn psi_field(r: &Reaction, n: usize, big_n: usize, g: &Grid) -> Vec<f64> {
    g.sample(|x| psi_n(r, n, big_n, x))
}

const N_MAX: usize = 1_000_000;

/// Smallest `N >= 1` with `f' > f'(0)/2` on `[0, 1/N]`.
///
/// The inequality is tested with a relative margin of `1e-9 f'(0)` so that a
/// boundary point where equality holds analytically is never admitted
/// through rounding.
pub fn choose_n(r: &Reaction) -> Result<usize> {
    let half = 0.5 * r.fp0() + 1e-9 * r.fp0();
    let ok = |u: f64| r.df(u) > half;
    if !ok(0.0) {
        return Err(Error::DegenerateReaction("f'(0) is not positive".into()));
    }
    let scan = 100_000;
    let mut first_bad = None;
    for k in 1..=scan {
        let u = k as f64 / scan as f64;
        if !ok(u) {
            first_bad = Some(u);
            break;
        }
    }
    let Some(bad) = first_bad else {
        return Ok(1);
    };
    let (mut lo, mut hi) = (bad - 1.0 / scan as f64, bad);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // lo is admissible, hi is not: need 1/N < hi
    let mut n = ((1.0 / hi).floor() as usize + 1).max(1);
    while n <= N_MAX {
        let top = 1.0 / n as f64;
        if (0..=10_000).all(|k| ok(top * k as f64 / 10_000.0)) {
            return Ok(n);
        }
        n += 1;
    }
    Err(Error::DegenerateReaction(format!("no admissible N below {N_MAX}")))
}
