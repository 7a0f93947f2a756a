//! Seeded random monotone data for comparison tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfline::Grid;

/// Smallest sigmoid width, in units of `x`.
pub const MIN_WIDTH: f64 = 0.5;

fn sigmoid(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

/// Increasing profile with `u(0) = 0` and `sup u <= amplitude`, built from
/// one to four logistic sigmoids placed in the left half of the grid.
pub fn random_monotone<R: Rng>(rng: &mut R, g: &Grid, amplitude: f64) -> Vec<f64> {
    let k = rng.gen_range(1..=4);
    let parts: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let centre = rng.gen_range(0.0..0.5 * g.l);
            let width = rng.gen_range(MIN_WIDTH..5.0);
            let weight = rng.gen_range(0.1..1.0);
            (centre, width, weight)
        })
        .collect();
    let total: f64 = parts.iter().map(|p| p.2).sum();
    g.sample(|x| {
        parts
            .iter()
            .map(|&(c, s, w)| {
                let base = sigmoid(-c / s);
                w * (sigmoid((x - c) / s) - base) / (1.0 - base)
            })
            .sum::<f64>()
            * amplitude
            / total
    })
}

/// Pair `u <= v` with `v = u + (1 - u) w`, `w` increasing in `[0, 1)` with
/// `w(0) = 0`. Pair `i` of seed `s` uses ChaCha8 stream `i`, so pairs can be
/// generated independently and in any order.
pub fn ordered_pair(seed: u64, i: u64, g: &Grid) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let a = rng.gen_range(0.05..0.95);
    let u = random_monotone(&mut rng, g, a);
    let b = rng.gen_range(0.05..0.95);
    let w = random_monotone(&mut rng, g, b);
    let v = u.iter().zip(&w).map(|(u, w)| u + (1.0 - u) * w).collect();
    (u, v)
}
