//! Adaptive Simpson quadrature with a relative tolerance.

/// Cap on integrand evaluations per call; noisy integrands stop refining
/// once it is spent.
const EVAL_BUDGET: usize = 200_000;

/// Integral of `f` over `[a, b]`. The tolerance is relative to the size of
/// the integral, floored at the round-off level of an O(1) integrand, so
/// small integrals of well-scaled functions keep their relative accuracy.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // coarse composite pass to size the tolerance
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let mut coarse = 0.0;
    let mut mass = 0.0;
    let mut peak: f64 = 0.0;
    for k in 0..=2 * PANELS {
        let w = if k == 0 || k == 2 * PANELS { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        let v = f(a + 0.5 * h * k as f64);
        coarse += w * v;
        mass += w * v.abs();
        peak = peak.max(v.abs());
    }
    coarse *= h / 6.0;
    mass *= h.abs() / 6.0;
    // round-off floor: integrand values carry absolute noise ~ eps * peak
    let floor = 8.0 * f64::EPSILON * (b - a).abs() * peak;
    let tol = (rtol * coarse.abs().max(1e-3 * mass)).max(floor).max(1e-300);
    let mut total = 0.0;
    let mut budget = EVAL_BUDGET;
    for k in 0..PANELS {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == PANELS { b } else { lo + h };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += recurse(&f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 40, &mut budget);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    *budget = budget.saturating_sub(2);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || *budget == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget)
}
