//! Entire solutions obtained as limits of solutions started from small
//! concave data and shifted in time so that the boundary slope is pinned.

use serde::Serialize;

use super::psi::psi_field;
use crate::error::{Error, Result};
use crate::halfline::{
    discrete_derivatives, run_to, Field, Grid, Integration, Kpp, Trajectory,
};
use crate::harness::report::{trend_check, Check, Trend, VerificationReport};
use crate::numerics::interp;
use crate::reaction::Reaction;

#[derive(Debug, Clone, Copy)]
pub struct Type2Config {
    pub grid: Grid,
    /// Snapshot spacing in the shifted time `s = t - t_n`.
    pub ds: f64,
    /// Last shifted time kept.
    pub s_max: f64,
    /// Give up if the boundary slope has not reached the threshold by then.
    pub t_cap: f64,
    pub detect_tol: f64,
}

impl Default for Type2Config {
    fn default() -> Self {
        Self { grid: Grid::default(), ds: 0.1, s_max: 1.0, t_cap: 1e3, detect_tol: 1e-6 }
    }
}

/// One member of the shifted sequence.
#[derive(Debug, Clone, Serialize)]
pub struct TypeIIRun {
    pub n: usize,
    pub big_n: usize,
    pub t_n: f64,
    /// `V'(0) / 2`.
    pub threshold: f64,
    /// Plateau height `eta_{1/(n+N)}(t_n)`.
    pub eta_at_tn: f64,
    /// `u_x(0)` at shifted time 0.
    pub beta00: f64,
    pub grid: Grid,
    /// Snapshots and diagnostics in shifted time.
    pub trajectory: Trajectory,
}

impl TypeIIRun {
    pub fn m(&self) -> f64 {
        1.0 / (self.n + self.big_n) as f64
    }

    pub fn s(&self) -> Vec<f64> {
        self.trajectory.times()
    }
}

fn first_crossing(
    r: &Reaction,
    n: usize,
    big_n: usize,
    threshold: f64,
    cfg: &Type2Config,
) -> Result<f64> {
    let g = &cfg.grid;
    let u0 = Field::new(0.0, psi_field(r, n, big_n, g));
    let mut run = Integration::new(Kpp(r), g, &u0)?;
    let mut b_prev = run.beta();
    if b_prev >= threshold {
        return Err(Error::Domain(format!(
            "initial boundary slope {b_prev} already at or above {threshold}"
        )));
    }
    while run.t() < cfg.t_cap {
        let t_prev = run.t();
        run.step()?;
        let b = run.beta();
        if b >= threshold {
            // bisection on the linear interpolant of beta over the step
            let lin = |t: f64| b_prev + (b - b_prev) * (t - t_prev) / g.dt - threshold;
            let (mut lo, mut hi) = (t_prev, run.t());
            while hi - lo > cfg.detect_tol {
                let mid = 0.5 * (lo + hi);
                if lin(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        b_prev = b;
    }
    Err(Error::DetectionTimeout { threshold, t_cap: cfg.t_cap })
}

/// Solves from `psi_n`, finds the first time `t_n` at which `u_x(0, t)`
/// reaches `vp0 / 2`, and re-runs to record snapshots on the grid
/// `s = k ds`, `-t_n < s <= s_max`.
pub fn run_type2(
    r: &Reaction,
    n: usize,
    big_n: usize,
    vp0: f64,
    cfg: &Type2Config,
) -> Result<TypeIIRun> {
    cfg.grid.validate()?;
    if n == 0 || big_n == 0 {
        return Err(Error::Domain("n and N must be positive".into()));
    }
    if !(cfg.ds > 0.0 && cfg.s_max >= 0.0 && cfg.detect_tol > 0.0) {
        return Err(Error::Domain("ds and detect_tol must be positive, s_max >= 0".into()));
    }
    let threshold = 0.5 * vp0;
    let t_n = first_crossing(r, n, big_n, threshold, cfg)?;

    let k_lo = (-t_n / cfg.ds).floor() as i64 + 1;
    let k_hi = (cfg.s_max / cfg.ds + 1e-9).floor() as i64;
    let s: Vec<f64> = (k_lo..=k_hi).map(|k| k as f64 * cfg.ds).collect();
    let times: Vec<f64> = s.iter().map(|s| t_n + s).collect();
    let g = &cfg.grid;
    let u0 = Field::new(0.0, psi_field(r, n, big_n, g));
    let mut run = Integration::new(Kpp(r), g, &u0)?;
    let mut traj = run_to(&mut run, t_n + cfg.s_max, &times)?;
    for (snap, &sk) in traj.snapshots.iter_mut().zip(&s) {
        snap.t = sk;
    }
    for t in traj.diag_t.iter_mut() {
        *t -= t_n;
    }
    let beta00 = interp::linear(&traj.diag_t, &traj.beta, 0.0);
    let eta_at_tn = r.eta_with_tol(1.0 / (n + big_n) as f64, t_n, 1e-12)?;
    Ok(TypeIIRun { n, big_n, t_n, threshold, eta_at_tn, beta00, grid: *g, trajectory: traj })
}

/// Extremes of the discrete derivatives over all snapshots.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SignSummary {
    pub min_ut: f64,
    pub min_ux: f64,
    /// Over interior nodes `0 < i < nx`.
    pub max_uxx: f64,
    /// `max (u - eta_{1/(n+N)}(t))`.
    pub eta_excess: f64,
    /// `max |u(L, t) - eta_{1/(n+N)}(t)|`.
    pub far_field_gap: f64,
}

pub fn sign_summary(run: &TypeIIRun, r: &Reaction) -> Result<SignSummary> {
    let g = &run.grid;
    let traj = &run.trajectory;
    let abs_t: Vec<f64> = traj.snapshots.iter().map(|s| s.t + run.t_n).collect();
    let eta = r.eta_many_with_tol(run.m(), &abs_t, 1e-12)?;
    let mut out = SignSummary {
        min_ut: f64::INFINITY,
        min_ux: f64::INFINITY,
        max_uxx: f64::NEG_INFINITY,
        eta_excess: f64::NEG_INFINITY,
        far_field_gap: 0.0,
    };
    for (j, d) in discrete_derivatives(traj, g.dx(), r).iter().enumerate() {
        let u = &traj.snapshots[j].u;
        out.min_ut = d.ut.iter().copied().fold(out.min_ut, f64::min);
        out.min_ux = d.ux.iter().copied().fold(out.min_ux, f64::min);
        out.max_uxx = d.uxx[1..g.nx].iter().copied().fold(out.max_uxx, f64::max);
        out.eta_excess = u.iter().map(|v| v - eta[j]).fold(out.eta_excess, f64::max);
        out.far_field_gap = out.far_field_gap.max((u[g.nx] - eta[j]).abs());
    }
    Ok(out)
}

/// Comparison window `[0, x_max] x [-t_half, t_half]` in shifted time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitWindow {
    pub x_max: f64,
    pub t_half: f64,
}

impl Default for LimitWindow {
    fn default() -> Self {
        Self { x_max: 20.0, t_half: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Type2Row {
    pub n: usize,
    pub t_n: f64,
    pub eta_at_tn: f64,
    pub beta00: f64,
}

const SIGN_TOL: f64 = 1e-8;
const ETA_TOL: f64 = 1e-10;

/// `sup |U_a - U_b|` over the window, on shifted times present in both runs.
fn window_gap(a: &TypeIIRun, b: &TypeIIRun, w: &LimitWindow) -> Option<f64> {
    let nx = ((w.x_max / a.grid.dx()).floor() as usize).min(a.grid.nx);
    if a.grid != b.grid {
        return None;
    }
    let mut gap: Option<f64> = None;
    for sa in &a.trajectory.snapshots {
        if sa.t.abs() > w.t_half + 1e-9 {
            continue;
        }
        if let Some(sb) = b.trajectory.snapshots.iter().find(|s| (s.t - sa.t).abs() < 1e-9) {
            let d = (0..=nx).map(|i| (sa.u[i] - sb.u[i]).abs()).fold(0.0, f64::max);
            gap = Some(gap.map_or(d, |g| g.max(d)));
        }
    }
    gap
}

/// Trend and limit diagnostics over runs ordered by increasing `n`.
pub fn type2_limit(
    r: &Reaction,
    runs: &[TypeIIRun],
    window: &LimitWindow,
) -> Result<(Vec<Type2Row>, VerificationReport)> {
    if runs.windows(2).any(|p| p[1].n <= p[0].n) {
        return Err(Error::Domain("runs must be ordered by strictly increasing n".into()));
    }
    let rows: Vec<Type2Row> = runs
        .iter()
        .map(|k| Type2Row { n: k.n, t_n: k.t_n, eta_at_tn: k.eta_at_tn, beta00: k.beta00 })
        .collect();
    let mut rep = VerificationReport::new("type2-limit");

    for run in runs {
        let s = sign_summary(run, r)?;
        let p = format!("n={}:", run.n);
        rep.push(Check::gt(&format!("{p}ut"), s.min_ut, -SIGN_TOL, "time-monotone"));
        rep.push(Check::gt(&format!("{p}ux"), s.min_ux, -SIGN_TOL, "space-monotone"));
        rep.push(Check::lt(&format!("{p}uxx"), s.max_uxx, SIGN_TOL, "concave"));
        rep.push(Check::le(&format!("{p}eta-bound"), s.eta_excess, ETA_TOL, "plateau-bound"));
        rep.push(Check::le(&format!("{p}far-field"), s.far_field_gap, 1e-3, "plateau-ode"));
    }

    let t_n: Vec<f64> = rows.iter().map(|r| r.t_n).collect();
    let eta: Vec<f64> = rows.iter().map(|r| r.eta_at_tn).collect();
    rep.push(trend_check("t_n-increasing", &t_n, Trend::Increasing, 1e-6, "shift-diverges"));
    rep.push(trend_check("eta-increasing", &eta, Trend::Increasing, 0.0, "plateau-to-one"));
    match runs.last() {
        Some(fine) => {
            rep.push(Check::gt("eta-final", fine.eta_at_tn, 0.9, "plateau-to-one").optional());
            let rel = (fine.beta00 - fine.threshold).abs() / fine.threshold;
            rep.push(Check::le("ux00-rel-error", rel, 0.05, "boundary-slope-pin"));
            let beta_back: Vec<f64> = {
                let tr = &fine.trajectory;
                let mut v: Vec<f64> = (0..)
                    .map(|k| -(k as f64))
                    .take_while(|&s| s > tr.diag_t[0])
                    .map(|s| interp::linear(&tr.diag_t, &tr.beta, s))
                    .collect();
                v.reverse();
                v
            };
            rep.push(trend_check("beta-decays-backward", &beta_back, Trend::Increasing, 0.0, "vanishes-backward"));
        }
        None => rep.push(Check::insufficient("ux00-rel-error", "boundary-slope-pin", "no runs")),
    }

    let gaps: Vec<f64> = runs.windows(2).filter_map(|p| window_gap(&p[0], &p[1], window)).collect();
    let mut c = trend_check("window-gap-shrinking", &gaps, Trend::Decreasing, 0.0, "limit-exists").optional();
    c.note = Some(format!("gaps = {gaps:?}"));
    rep.push(c);
    if gaps.len() >= 2 {
        let ratio = gaps[gaps.len() - 2] / gaps[gaps.len() - 1];
        rep.push(Check::ge("window-gap-halving", ratio, 2.0, "limit-exists").optional());
    }
    Ok((rows, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entire::choose_n;

    fn small() -> Type2Config {
        Type2Config { grid: Grid::new(60.0, 1200, 0.025).unwrap(), ..Default::default() }
    }

    #[test]
    fn crossing_is_pinned() {
        let r = Reaction::logistic();
        let big_n = choose_n(&r).unwrap();
        let vp0 = 1.0 / 3f64.sqrt();
        let run = run_type2(&r, 8, big_n, vp0, &small()).unwrap();
        assert!(run.t_n > 1.0 && run.t_n < 10.0, "{}", run.t_n);
        assert!((run.beta00 - run.threshold).abs() < 1e-6);
        let s = run.s();
        assert!(s[0] > -run.t_n && s[0] - 0.1 <= -run.t_n);
        assert!((s.last().unwrap() - 1.0).abs() < 1e-12);
        let sum = sign_summary(&run, &r).unwrap();
        assert!(sum.min_ux > -1e-8 && sum.min_ut > -1e-8 && sum.max_uxx < 1e-8, "{sum:?}");
        assert!(sum.eta_excess <= 1e-10, "{sum:?}");
    }

    #[test]
    fn timeout_is_reported() {
        let r = Reaction::logistic();
        let cfg = Type2Config { t_cap: 0.5, ..small() };
        let e = run_type2(&r, 8, 5, 1.0 / 3f64.sqrt(), &cfg).unwrap_err();
        assert!(matches!(e, Error::DetectionTimeout { .. }));
    }
}
