//! Verification suites. Member experiments fan out through [`exec::map`];
//! reports are assembled in input order so that output is deterministic.

use serde::{Deserialize, Serialize};

use super::random::ordered_pair;
use super::report::{Check, VerificationReport};
use crate::entire::{
    build_type1, choose_n, level_set, psi_field, psi_n, psi_n_prime, psi_n_second,
    recentered_limit, run_type2, type2_limit, verify_level_set, verify_type1, LimitWindow,
    Type1Config, Type2Config,
};
use crate::error::Result;
use crate::exec;
use crate::halfline::{oracle_v, oracle_w, solve, Field, Grid, Kpp, Linear};
use crate::numerics::quad::adaptive_simpson;
use crate::phaseplane::{
    amplitude_ac, bc_constant, eigenvalues, stationary, tail_fit, wave_with, StationaryProfile,
    WaveOptions,
};
use crate::reaction::{validate_concavity, validate_kpp, Reaction};

/// Stationary profile long enough to be flat to `1e-6` for any preset.
pub fn reference_stationary(r: &Reaction) -> Result<StationaryProfile> {
    let decay = (-r.fp1()).sqrt();
    let x_max = (20.0 / decay).max(40.0).ceil();
    stationary(r, x_max, (x_max / 0.005) as usize)
}

fn errored(rep: &mut VerificationReport, id: &str, anchor: &str, e: impl std::fmt::Display) {
    rep.push(Check::errored(id, anchor, e));
}

/// Wave, eigenvalue and stationary-profile checks.
pub fn suite_profiles(r: &Reaction) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("profiles:{}", r.name()));
    match validate_kpp(r, 10_000) {
        Ok(sub) => rep.absorb("kpp", sub),
        Err(e) => errored(&mut rep, "kpp", "kpp-hypotheses", e),
    }
    match validate_concavity(r, 1000) {
        Ok(sub) => rep.absorb("concavity", sub),
        Err(e) => errored(&mut rep, "concavity", "concavity-hypothesis", e),
    }

    let c0 = r.c0();
    let bc0 = bc_constant(r, c0).unwrap_or(f64::NAN);
    rep.push(Check::le("b-at-c0", (bc0 - 2.0).abs(), 1e-12, "bc-at-minimal-speed"));
    let bcs: Vec<f64> = (0..=50).map(|k| bc_constant(r, c0 * (1.0 + 9.0 * k as f64 / 50.0)).unwrap_or(f64::NAN)).collect();
    let dec = bcs.windows(2).all(|w| w[1] < w[0]);
    rep.push(Check::holds("b-decreasing", dec, "bc-monotone"));
    let mut vieta: f64 = 0.0;
    let mut ident: f64 = 0.0;
    for k in 0..=50 {
        let c = c0 * (1.0 + 9.0 * k as f64 / 50.0);
        let e = eigenvalues(r, c);
        vieta = vieta.max((e.lam0_plus * e.lam0_minus - r.fp0()).abs());
        vieta = vieta.max((e.lam0_plus + e.lam0_minus - c).abs() / c);
        let b = bc_constant(r, c).unwrap_or(f64::NAN);
        ident = ident.max((c * e.lam0_minus - r.fp0() * b).abs());
    }
    rep.push(Check::le("vieta", vieta, 1e-12, "eigenvalues"));
    rep.push(Check::le("c-lam-equals-fp0-b", ident, 1e-12, "bc-identity"));

    let speeds = [c0, 1.25 * c0, 1.5 * c0];
    let waves = exec::map(&speeds, |&c| wave_with(r, c, &WaveOptions::default()));
    for (&c, w) in speeds.iter().zip(waves) {
        let p = format!("c={c}:");
        let w = match w {
            Ok(w) => w,
            Err(e) => {
                errored(&mut rep, &format!("{p}wave"), "wave-existence", e);
                continue;
            }
        };
        rep.push(Check::le(&format!("{p}residual"), w.residual(r), 1e-6, "wave-equation"));
        rep.push(Check::le(&format!("{p}phi(0)"), (w.value(0.0) - 0.5).abs(), 1e-12, "wave-normalization"));
        rep.push(Check::holds(&format!("{p}monotone"), w.phi.windows(2).all(|s| s[1] > s[0]), "wave-monotone"));
        rep.push(Check::lt(&format!("{p}phi-left"), w.phi[0], 0.01, "wave-limits"));
        rep.push(Check::gt(&format!("{p}phi-right"), *w.phi.last().unwrap(), 0.99, "wave-limits"));
        match tail_fit(&w) {
            Ok(fit) if w.critical => {
                let k = fit.c0_correction.unwrap_or(f64::NAN);
                rep.push(Check::le(&format!("{p}tail-corrected"), (k / w.lam_c - 1.0).abs(), 0.05, "critical-tail"));
            }
            Ok(fit) => {
                rep.push(Check::le(&format!("{p}tail-rate"), (fit.lambda_est / w.lam_c - 1.0).abs(), 0.02, "tail-rate"));
            }
            Err(e) => errored(&mut rep, &format!("{p}tail"), "tail-rate", e),
        }
        if !w.critical {
            match amplitude_ac(&w) {
                Ok(a) => {
                    let excess = w
                        .phi
                        .iter()
                        .enumerate()
                        .map(|(i, &phi)| (w.z0 + i as f64 * w.dz, phi))
                        .filter(|&(z, _)| z <= 0.0)
                        .map(|(z, phi)| phi - a * (w.lam_c * z).exp())
                        .fold(f64::NEG_INFINITY, f64::max);
                    rep.push(Check::le(&format!("{p}amplitude-bound"), excess, 1e-12, "tail-amplitude"));
                }
                Err(e) => errored(&mut rep, &format!("{p}amplitude"), "tail-amplitude", e),
            }
        }
    }

    match reference_stationary(r) {
        Ok(v) => {
            let exact = (2.0 * adaptive_simpson(|s| r.f(s), 0.0, 1.0, 1e-13)).sqrt();
            rep.push(Check::le("V'(0)", (v.vp0 - exact).abs(), 1e-9, "stationary-slope"));
            let step = (v.v.len() / 200).max(1);
            let worst = (0..v.v.len())
                .step_by(step)
                .map(|i| {
                    let q = v.v[i];
                    let e = if q < 1.0 { 2.0 * adaptive_simpson(|s| r.f(s), q, 1.0, 1e-13) } else { 0.0 };
                    (v.vp[i] * v.vp[i] - e).abs()
                })
                .fold(0.0, f64::max);
            rep.push(Check::le("phase-plane", worst, 1e-8, "stationary-energy"));
            rep.push(Check::holds("V-monotone", v.v.windows(2).all(|s| s[1] > s[0] || (s[1] == s[0] && s[0] > 1.0 - 1e-12)), "stationary-monotone"));
            rep.push(Check::holds("V-concave", v.vp.windows(2).all(|s| s[1] <= s[0]), "stationary-concave"));
        }
        Err(e) => errored(&mut rep, "stationary", "stationary-slope", e),
    }
    rep
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverSuite {
    pub grid: Grid,
    pub seed: u64,
    pub pairs: usize,
    pub t_compare: f64,
    pub eps1: f64,
    pub b: f64,
}

impl Default for SolverSuite {
    fn default() -> Self {
        Self { grid: Grid::default(), seed: 0, pairs: 100, t_compare: 5.0, eps1: 0.01, b: 0.995 }
    }
}

/// Ordering violations below this are rounding in the tridiagonal solve.
pub const COMPARISON_TOL: f64 = 1e-13;

/// Outcome of one comparison pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairOutcome {
    pub index: u64,
    /// `max (u - v)` over nodes and output times.
    pub worst: f64,
    pub min: f64,
    pub max: f64,
}

/// Solves every ordered pair to `t_compare`, recording the worst ordering
/// violation and the range of values.
pub fn comparison_pairs(r: &Reaction, cfg: &SolverSuite) -> Result<Vec<PairOutcome>> {
    let g = cfg.grid;
    let ids: Vec<u64> = (0..cfg.pairs as u64).collect();
    let outs: Vec<f64> = (1..=5).map(|k| cfg.t_compare * k as f64 / 5.0).collect();
    exec::map(&ids, |&i| {
        let (u0, v0) = ordered_pair(cfg.seed, i, &g);
        let a = solve(Kpp(r), &g, &Field::new(0.0, u0), cfg.t_compare, &outs)?;
        let b = solve(Kpp(r), &g, &Field::new(0.0, v0), cfg.t_compare, &outs)?;
        let mut o = PairOutcome { index: i, worst: f64::NEG_INFINITY, min: f64::INFINITY, max: f64::NEG_INFINITY };
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            for (&x, &y) in sa.u.iter().zip(&sb.u) {
                o.worst = o.worst.max(x - y);
                o.min = o.min.min(x.min(y));
                o.max = o.max.max(x.max(y));
            }
        }
        Ok(o)
    })
    .into_iter()
    .collect()
}

/// Linear oracles, comparison, invariance of `[0,1]`, convergence order and
/// truncation drift.
pub fn suite_solver(r: &Reaction, cfg: &SolverSuite) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("solver:{}", r.name()));
    let g = cfg.grid;
    let mu = r.mu();

    // constant data with the Dirichlet node pinned
    let flat = |level: f64| {
        let mut u = vec![level; g.nx + 1];
        u[0] = 0.0;
        Field::new(0.0, u)
    };
    match solve(Linear { rate: mu * mu }, &g, &flat(cfg.eps1), 1.0, &[1.0]) {
        Ok(tr) => {
            let u = &tr.snapshots[0].u;
            let err = (0..=g.nx)
                .map(|i| (u[i] - oracle_w(cfg.eps1, mu, g.x(i), 1.0).unwrap().0).abs())
                .fold(0.0, f64::max);
            rep.push(Check::le("w-oracle-linf", err, 1e-3, "heat-kernel-oracle"));
            let wx0 = oracle_w(cfg.eps1, mu, 0.0, 1.0).unwrap().1;
            let beta = *tr.beta.last().unwrap();
            rep.push(Check::le("w-slope-rel", (beta / wx0 - 1.0).abs(), 0.01, "heat-kernel-slope"));
        }
        Err(e) => errored(&mut rep, "w-oracle", "heat-kernel-oracle", e),
    }
    match solve(Linear { rate: cfg.b }, &g, &flat(0.5 * cfg.eps1), 1.0, &[1.0]) {
        Ok(tr) => {
            let u = &tr.snapshots[0].u;
            let err = (0..=g.nx)
                .map(|i| (u[i] - oracle_v(cfg.eps1, cfg.b, 0.0, g.x(i), 1.0).unwrap()).abs())
                .fold(0.0, f64::max);
            rep.push(Check::le("v-oracle-linf", err, 1e-3, "heat-kernel-oracle"));
        }
        Err(e) => errored(&mut rep, "v-oracle", "heat-kernel-oracle", e),
    }

    // the linear flow with rate f'(0) dominates the nonlinear one
    let outs = [0.5, 1.0, 2.0, 3.0];
    let lin = solve(Linear { rate: mu * mu }, &g, &flat(cfg.eps1), 3.0, &outs);
    let non = solve(Kpp(r), &g, &flat(cfg.eps1), 3.0, &outs);
    match (lin, non) {
        (Ok(a), Ok(b)) => {
            let mut worst = f64::NEG_INFINITY;
            for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
                for i in 0..=g.nx {
                    if sa.u[i] <= 1.0 {
                        worst = worst.max(sb.u[i] - sa.u[i]);
                    }
                }
            }
            rep.push(Check::le("linear-supersolution", worst, 1e-12, "linear-supersolution"));
        }
        (Err(e), _) | (_, Err(e)) => errored(&mut rep, "linear-supersolution", "linear-supersolution", e),
    }

    match comparison_pairs(r, cfg) {
        Ok(pairs) => {
            let bad = pairs.iter().filter(|p| p.worst > COMPARISON_TOL).count();
            let mut c = Check::le("comparison-violations", bad as f64, 0.0, "comparison-principle");
            c.note = Some(format!("{} pairs, seed {}", pairs.len(), cfg.seed));
            rep.push(c);
            let lo = pairs.iter().map(|p| p.min).fold(f64::INFINITY, f64::min);
            let hi = pairs.iter().map(|p| p.max).fold(f64::NEG_INFINITY, f64::max);
            rep.push(Check::ge("range-min", lo, -1e-12, "invariant-interval"));
            rep.push(Check::le("range-max", hi, 1.0 + 1e-12, "invariant-interval"));
        }
        Err(e) => errored(&mut rep, "comparison-violations", "comparison-principle", e),
    }

    match self_convergence(r, g.l) {
        Ok(rate) => rep.push(Check::ge("convergence-rate", rate, 1.9, "scheme-order")),
        Err(e) => errored(&mut rep, "convergence-rate", "scheme-order", e),
    }
    match long_time(r, &g) {
        Ok((to_v, drift)) => {
            rep.push(Check::le("psi1-to-V", to_v, 1e-3, "stationary-attractor"));
            rep.push(Check::le("L-doubling-drift", drift, 1e-6, "truncation").optional());
        }
        Err(e) => errored(&mut rep, "psi1-to-V", "stationary-attractor", e),
    }
    rep
}

/// Observed order from three grids `dx = 0.2, 0.1, 0.05` with `dt = dx/2`,
/// starting from `psi_1` and compared at `t = 5` on the coarse nodes.
pub fn self_convergence(r: &Reaction, l: f64) -> Result<f64> {
    let big_n = choose_n(r)?;
    let levels = [0.2, 0.1, 0.05];
    let fields = exec::map(&levels, |&dx| -> Result<Vec<f64>> {
        let g = Grid::with_spacing(l, dx, 0.5 * dx)?;
        let tr = solve(Kpp(r), &g, &Field::new(0.0, psi_field(r, 1, big_n, &g)), 5.0, &[5.0])?;
        Ok(tr.snapshots[0].u.clone())
    });
    let [a, b, c]: [Vec<f64>; 3] = fields.into_iter().collect::<Result<Vec<_>>>()?.try_into().unwrap();
    let n = a.len() - 1;
    let e1 = (0..=n).map(|i| (a[i] - b[2 * i]).abs()).fold(0.0, f64::max);
    let e2 = (0..=n).map(|i| (b[2 * i] - c[4 * i]).abs()).fold(0.0, f64::max);
    Ok((e1 / e2).log2())
}

/// Distance to `V` on `[0, L-5]` at `t = 40` from `psi_1`, and the drift of
/// that solution on `[0, 3L/4]` when `L` is doubled.
pub fn long_time(r: &Reaction, g: &Grid) -> Result<(f64, f64)> {
    let big_n = choose_n(r)?;
    let v = reference_stationary(r)?;
    let grids = [*g, Grid::new(2.0 * g.l, 2 * g.nx, g.dt)?];
    let runs = exec::map(&grids, |gg| -> Result<Vec<f64>> {
        let tr = solve(Kpp(r), gg, &Field::new(0.0, psi_field(r, 1, big_n, gg)), 40.0, &[40.0])?;
        Ok(tr.snapshots[0].u.clone())
    });
    let [u, u2]: [Vec<f64>; 2] = runs.into_iter().collect::<Result<Vec<_>>>()?.try_into().unwrap();
    let vs = v.sample(g.dx(), g.nx);
    let keep = ((g.l - 5.0) / g.dx()).floor() as usize;
    let to_v = (0..=keep).map(|i| (u[i] - vs[i]).abs()).fold(0.0, f64::max);
    let near = (0.75 * g.nx as f64) as usize;
    let drift = (0..=near).map(|i| (u[i] - u2[i]).abs()).fold(0.0, f64::max);
    Ok((to_v, drift))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Type1Suite {
    pub cs: Vec<f64>,
    pub thetas: Vec<f64>,
    pub delta: Option<f64>,
    pub grid: Grid,
    pub t_start: f64,
    pub t_after: f64,
    pub out_interval: f64,
    pub sandwich_rtol: f64,
}

impl Type1Suite {
    pub fn for_reaction(r: &Reaction) -> Self {
        let d = Type1Config::default();
        Self {
            cs: vec![1.25 * r.c0(), r.c0()],
            thetas: vec![0.0],
            delta: None,
            grid: d.grid,
            t_start: d.t_start,
            t_after: d.t_after,
            out_interval: d.out_interval,
            sandwich_rtol: d.sandwich_rtol,
        }
    }

    pub fn config(&self) -> Type1Config {
        Type1Config {
            grid: self.grid,
            t_start: self.t_start,
            t_after: self.t_after,
            out_interval: self.out_interval,
            sandwich_rtol: self.sandwich_rtol,
        }
    }
}

pub fn suite_type1(r: &Reaction, cfg: &Type1Suite) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("type1:{}", r.name()));
    let v = match reference_stationary(r) {
        Ok(v) => v,
        Err(e) => {
            errored(&mut rep, "stationary", "approach-to-stationary", e);
            return rep;
        }
    };
    let jobs: Vec<(f64, f64)> = cfg.cs.iter().flat_map(|&c| cfg.thetas.iter().map(move |&t| (c, t))).collect();
    let run_cfg = cfg.config();
    let results = exec::map(&jobs, |&(c, theta)| -> Result<VerificationReport> {
        let w = wave_with(r, c, &WaveOptions::default())?;
        let run = build_type1(r, &w, theta, cfg.delta, &run_cfg)?;
        Ok(verify_type1(&run, r, &w, &v, cfg.sandwich_rtol).0)
    });
    for ((c, theta), res) in jobs.into_iter().zip(results) {
        let p = format!("c={c}:theta={theta}");
        match res {
            Ok(sub) => rep.absorb(&p, sub),
            Err(e) => errored(&mut rep, &format!("{p}:construction"), "sub-super-sandwich", e),
        }
    }
    rep
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Type2Suite {
    pub ns: Vec<usize>,
    pub grid: Grid,
    pub ds: f64,
    pub s_max: f64,
    pub t_cap: f64,
    pub m: f64,
    /// Recentering window `(X, T)`.
    pub recenter: (f64, f64),
    pub limit_window: (f64, f64),
}

impl Default for Type2Suite {
    fn default() -> Self {
        let d = Type2Config::default();
        let w = LimitWindow::default();
        Self {
            ns: vec![8, 16, 32, 64],
            grid: d.grid,
            ds: d.ds,
            s_max: d.s_max,
            t_cap: d.t_cap,
            m: 0.5,
            recenter: (1.0, 0.2),
            limit_window: (w.x_max, w.t_half),
        }
    }
}

impl Type2Suite {
    pub fn config(&self) -> Type2Config {
        Type2Config { grid: self.grid, ds: self.ds, s_max: self.s_max, t_cap: self.t_cap, ..Default::default() }
    }
}

/// Shifted times on a `2T` lattice, from the most negative one whose
/// window fits the data and whose level point is resolvable, up to 0.
pub fn recentering_times(resolvable: &[f64], s_first: f64, ds: f64, t_half: f64) -> Vec<f64> {
    let stride = ((2.0 * t_half / ds).round() as i64).max(1);
    let lo = s_first + t_half - 1e-9;
    let mut out: Vec<f64> = (0..)
        .map(|k: i64| -(k * stride) as f64 * ds)
        .take_while(|&s| s >= lo)
        .filter(|s| resolvable.iter().any(|r| (r - s).abs() < 1e-9))
        .collect();
    out.reverse();
    out
}

pub fn suite_type2(r: &Reaction, cfg: &Type2Suite) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("type2:{}", r.name()));
    let big_n = match choose_n(r) {
        Ok(n) => n,
        Err(e) => {
            errored(&mut rep, "choose-N", "initial-data", e);
            return rep;
        }
    };
    let v = match reference_stationary(r) {
        Ok(v) => v,
        Err(e) => {
            errored(&mut rep, "stationary", "boundary-slope-pin", e);
            return rep;
        }
    };

    // psi_n invariants on the coarsest member
    let n0 = cfg.ns.first().copied().unwrap_or(1);
    let half_mu2 = 0.5 * r.fp0();
    let xs: Vec<f64> = (0..=2000).map(|k| k as f64 * 0.01).collect();
    let min_p = xs.iter().map(|&x| psi_n_prime(r, n0, big_n, x)).fold(f64::INFINITY, f64::min);
    let max_pp = xs.iter().map(|&x| psi_n_second(r, n0, big_n, x)).fold(f64::NEG_INFINITY, f64::max);
    let min_sub = xs
        .iter()
        .map(|&x| psi_n_second(r, n0, big_n, x) + half_mu2 * psi_n(r, n0, big_n, x))
        .fold(f64::INFINITY, f64::min);
    rep.push(Check::ge("psi-increasing", min_p, 0.0, "initial-data"));
    rep.push(Check::le("psi-concave", max_pp, 0.0, "initial-data"));
    rep.push(Check::ge("psi-subsolution", min_sub, -1e-12, "initial-data"));

    let run_cfg = cfg.config();
    let runs = exec::map(&cfg.ns, |&n| run_type2(r, n, big_n, v.vp0, &run_cfg));
    let mut ok = Vec::new();
    for (&n, res) in cfg.ns.iter().zip(runs) {
        match res {
            Ok(run) => ok.push(run),
            Err(e) => errored(&mut rep, &format!("n={n}:run"), "shift-diverges", e),
        }
    }
    let window = LimitWindow { x_max: cfg.limit_window.0, t_half: cfg.limit_window.1 };
    match type2_limit(r, &ok, &window) {
        Ok((_, sub)) => rep.absorb("limit", sub),
        Err(e) => errored(&mut rep, "limit", "limit-exists", e),
    }

    let Some(fine) = ok.last() else {
        rep.push(Check::insufficient("level-set", "front-recedes", "no successful runs"));
        return rep;
    };
    match level_set(&fine.trajectory, fine.grid.dx(), r, cfg.m) {
        Ok(ls) => {
            rep.absorb("level", verify_level_set(&ls, r, cfg.ds));
            let res: Vec<f64> = ls.resolvable().map(|p| p.s).collect();
            let s_first = fine.trajectory.snapshots[0].t;
            let s_list = recentering_times(&res, s_first, cfg.ds, cfg.recenter.1);
            match recentered_limit(&fine.trajectory, &ls, r, &s_list, cfg.recenter) {
                Ok((_, sub)) => rep.absorb("recentered", sub),
                Err(e) => errored(&mut rep, "recentered", "recentered-limit", e),
            }
        }
        Err(e) => errored(&mut rep, "level-set", "front-recedes", e),
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recentering_lattice() {
        let res: Vec<f64> = (-9..=9).map(|k| k as f64 * 0.1).collect();
        let s = recentering_times(&res, -5.2, 0.1, 0.2);
        assert_eq!(s.len(), 3);
        assert!((s[0] + 0.8).abs() < 1e-12 && s[2] == 0.0);
    }

    #[test]
    fn short_schedule_is_insufficient() {
        let r = Reaction::logistic();
        let cfg = Type2Suite {
            ns: vec![8, 16],
            grid: Grid::new(60.0, 1200, 0.025).unwrap(),
            ..Default::default()
        };
        let rep = suite_type2(&r, &cfg);
        assert!(!rep.pass);
        let c = rep.check("limit/t_n-increasing").unwrap();
        assert_eq!(c.status, super::super::report::Status::InsufficientData);
    }
}
