//! Entire solutions that follow a traveling wave for `t -> -inf` and settle
//! on the stationary profile for `t -> +inf`.
//!
//! The supersolution is the wave itself, `phi(x + ct - theta)`; the
//! subsolution subtracts a decaying margin `rho(t)`. The numerical solution
//! is started inside the pair at `t_start` and carried in the deviation
//! variable `v = u - phi(x + ct - theta)`, so that the sandwich
//! `-rho <= v <= 0` is resolved relative to `rho` even when `rho` is far
//! below the discretization error of `u` itself.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfline::{space_derivatives, Field, Grid, Integration, Problem, Trajectory};
use crate::harness::report::{trend_check, Check, Trend, VerificationReport};
use crate::phaseplane::{amplitude_ac, StationaryProfile, WaveProfile};
use crate::reaction::Reaction;

/// Constants of the sub/supersolution pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeIParams {
    pub c: f64,
    pub theta: f64,
    pub lam_c: f64,
    /// Tail amplitude; at the minimal speed the weighted amplitude.
    pub a_c: f64,
    pub critical: bool,
    pub delta: Option<f64>,
    pub p: Option<f64>,
    pub rho0_star: Option<f64>,
}

impl TypeIParams {
    /// Margin between super- and subsolution at time `t`.
    pub fn rho(&self, t: f64) -> f64 {
        match (self.rho0_star, self.p) {
            (Some(r0), Some(p)) => r0 * (p * t).exp(),
            _ => self.a_c * (-self.lam_c * self.theta).exp() * (self.c * self.lam_c * t).exp(),
        }
    }

    /// Growth exponent of `rho`.
    pub fn rate(&self) -> f64 {
        self.p.unwrap_or(self.c * self.lam_c)
    }

    /// End of the interval on which the pair is certified.
    pub fn t_switch(&self) -> f64 {
        self.theta / self.c
    }
}

/// `sup_{z <= 0} phi(z) / ((1 + |z|) e^{lam z})` for the minimal-speed wave.
pub fn amplitude_c0(w: &WaveProfile) -> Result<f64> {
    if !w.critical {
        return Err(Error::Domain("weighted amplitude applies to the minimal speed only".into()));
    }
    Ok(w.sup_ratio(|z| 1.0 + z.abs()))
}

/// `sup_{t <= 0} |c0 t| e^{delta t} = c0 / (e delta)`.
pub fn sup_linear_exp(c0: f64, delta: f64) -> f64 {
    c0 / (std::f64::consts::E * delta)
}

/// `sup_{t <= t_max} (1 + c0 |t|) e^{delta t}`.
fn sup_affine_exp(c0: f64, delta: f64, t_max: f64) -> f64 {
    let crit = 1.0 / c0 - 1.0 / delta;
    let neg = if crit <= 0.0 { (c0 / delta) * (delta / c0 - 1.0).exp() } else { 1.0 };
    if t_max > 0.0 {
        neg.max((1.0 + c0 * t_max) * (delta * t_max).exp())
    } else {
        neg
    }
}

/// Pair constants for speed `w.c` and phase `theta`. `delta` is used only at
/// the minimal speed (default `f'(0)/2`).
pub fn type1_params(
    r: &Reaction,
    w: &WaveProfile,
    theta: f64,
    delta: Option<f64>,
) -> Result<TypeIParams> {
    if !theta.is_finite() {
        return Err(Error::Domain("theta must be finite".into()));
    }
    if !w.critical {
        return Ok(TypeIParams {
            c: w.c,
            theta,
            lam_c: w.lam_c,
            a_c: amplitude_ac(w)?,
            critical: false,
            delta: None,
            p: None,
            rho0_star: None,
        });
    }
    let fp0 = r.fp0();
    let delta = delta.unwrap_or(0.5 * fp0);
    if !(delta > 0.0 && delta < fp0) {
        return Err(Error::Domain(format!("delta must lie in (0, {fp0}), got {delta}")));
    }
    let a = amplitude_c0(w)?;
    let t_max = (theta / w.c).max(0.0);
    let s = sup_affine_exp(w.c, delta, t_max);
    let rho0 = a * (-w.lam_c * theta).exp() * (s + theta.abs() * (delta * t_max).exp());
    Ok(TypeIParams {
        c: w.c,
        theta,
        lam_c: w.lam_c,
        a_c: a,
        critical: true,
        delta: Some(delta),
        p: Some(2.0 * fp0 - delta),
        rho0_star: Some(rho0),
    })
}

/// `v_t = v_xx + f(phi + v) - f(phi)`, `v(0,t) = -phi(ct - theta)`, with
/// `phi` evaluated at `x + ct - theta`.
pub struct Deviation<'a> {
    pub r: &'a Reaction,
    pub wave: &'a WaveProfile,
    pub theta: f64,
}

impl Deviation<'_> {
    fn shift(&self, t: f64) -> f64 {
        self.wave.c * t - self.theta
    }
}

impl Problem for Deviation<'_> {
    fn boundary(&self, t: f64) -> f64 {
        -self.wave.value(self.shift(t))
    }

    fn source(&self, t: f64, x: &[f64], v: &[f64], out: &mut [f64]) {
        let s = self.shift(t);
        for ((o, &xi), &vi) in out.iter_mut().zip(x).zip(v) {
            *o = self.r.increment(self.wave.value(xi + s), vi);
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Type1Config {
    pub grid: Grid,
    pub t_start: f64,
    /// Integration continues to `theta/c + t_after`.
    pub t_after: f64,
    pub out_interval: f64,
    /// Allowed sandwich violation, relative to `rho(t)`.
    pub sandwich_rtol: f64,
}

impl Default for Type1Config {
    fn default() -> Self {
        Self {
            grid: Grid::default(),
            t_start: -20.0,
            t_after: 40.0,
            out_interval: 1.0,
            sandwich_rtol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Type1Run {
    pub params: TypeIParams,
    pub grid: Grid,
    /// Deviation `v = u - phi(x + ct - theta)` at the output times.
    pub deviation: Trajectory,
}

impl Type1Run {
    /// The solution `u` itself at snapshot `j`.
    pub fn field(&self, wave: &WaveProfile, j: usize) -> Field {
        let snap = &self.deviation.snapshots[j];
        let s = wave.c * snap.t - self.params.theta;
        let u = snap
            .u
            .iter()
            .enumerate()
            .map(|(i, v)| wave.value(self.grid.x(i) + s) + v)
            .collect();
        Field::new(snap.t, u)
    }
}

/// Output times `t_start, t_start + h, ...` through `theta/c` (included) and
/// on to `t_end`.
fn out_times(t_start: f64, t_switch: f64, t_end: f64, h: f64) -> Vec<f64> {
    let mut ts = Vec::new();
    let mut k = 0;
    loop {
        let t = t_start + k as f64 * h;
        if t >= t_switch - 1e-9 * h {
            break;
        }
        ts.push(t);
        k += 1;
    }
    ts.push(t_switch);
    let mut k = 1;
    loop {
        let t = t_switch + k as f64 * h;
        if t > t_end + 1e-9 * h {
            break;
        }
        ts.push(t);
        k += 1;
    }
    ts
}

/// Starts between the pair at `t_start` and integrates past `theta/c`.
/// Fails if the sandwich is violated for `t <= theta/c`.
pub fn build_type1(
    r: &Reaction,
    wave: &WaveProfile,
    theta: f64,
    delta: Option<f64>,
    cfg: &Type1Config,
) -> Result<Type1Run> {
    cfg.grid.validate()?;
    let params = type1_params(r, wave, theta, delta)?;
    let t_switch = params.t_switch();
    if !(cfg.t_start < t_switch.min(0.0)) {
        return Err(Error::Domain(format!(
            "t_start = {} must precede min(0, theta/c) = {}",
            cfg.t_start,
            t_switch.min(0.0)
        )));
    }
    if !(cfg.out_interval > 0.0 && cfg.t_after >= 0.0) {
        return Err(Error::Domain("out_interval must be positive and t_after >= 0".into()));
    }
    let g = cfg.grid;
    let rho0 = params.rho(cfg.t_start);
    let s0 = wave.c * cfg.t_start - theta;
    // max(phi - rho, 0) clipped to [0, phi], minus phi
    let v0: Vec<f64> = (0..=g.nx).map(|i| -wave.value(g.x(i) + s0).min(rho0)).collect();
    let problem = Deviation { r, wave, theta };
    let mut run = Integration::new(problem, &g, &Field::new(cfg.t_start, v0))?;
    let t_end = t_switch + cfg.t_after;
    let times = out_times(cfg.t_start, t_switch, t_end, cfg.out_interval);
    let deviation = crate::halfline::run_to(&mut run, t_end, &times)?;

    for snap in deviation.snapshots.iter().filter(|s| s.t <= t_switch + 1e-12) {
        let rho = params.rho(snap.t);
        let tol = cfg.sandwich_rtol * rho;
        for (i, &v) in snap.u.iter().enumerate() {
            if v > tol || v < -rho - tol {
                return Err(Error::ConstructionFailure {
                    t: snap.t,
                    x: g.x(i),
                    reason: format!("deviation {v:e} outside [-rho, 0] with rho = {rho:e}"),
                });
            }
        }
    }
    Ok(Type1Run { params, grid: g, deviation })
}

/// One row of the type I diagnostics table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Type1Row {
    pub t: f64,
    pub d_wave: f64,
    pub rho: f64,
    pub d_v: f64,
}

/// Sandwich, wave-distance and stationary-distance checks.
pub fn verify_type1(
    run: &Type1Run,
    r: &Reaction,
    wave: &WaveProfile,
    v: &StationaryProfile,
    sandwich_rtol: f64,
) -> (VerificationReport, Vec<Type1Row>) {
    let p = &run.params;
    let g = &run.grid;
    let t_switch = p.t_switch();
    let vs = v.sample(g.dx(), g.nx);
    let mut rows = Vec::new();
    let mut worst_sandwich: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_boundary = f64::NEG_INFINITY;
    let mut min_ux = f64::INFINITY;
    for (j, snap) in run.deviation.snapshots.iter().enumerate() {
        let rho = p.rho(snap.t);
        let d_wave = snap.u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let u = run.field(wave, j);
        let d_v = u.sup_distance(&vs);
        if snap.t <= t_switch + 1e-12 {
            for &dv in &snap.u {
                let excess = (dv / rho).max(-(dv + rho) / rho);
                worst_sandwich = worst_sandwich.max(excess);
            }
            worst_ratio = worst_ratio.max(d_wave / rho);
            worst_boundary = worst_boundary.max(wave.value(wave.c * snap.t - p.theta) - rho);
        }
        let (ux, _) = space_derivatives(&u.u, g.dx());
        min_ux = min_ux.min(ux[1..g.nx].iter().copied().fold(f64::INFINITY, f64::min));
        rows.push(Type1Row { t: snap.t, d_wave, rho, d_v });
    }

    let tag = if p.critical { "minimal-speed" } else { "supercritical" };
    let mut rep = VerificationReport::new(format!("type1:c={}:theta={}", p.c, p.theta));
    rep.push(Check::le("sandwich", worst_sandwich, sandwich_rtol, "sub-super-sandwich"));
    rep.push(Check::le("d-wave-over-rho", worst_ratio, 1.05, "approach-to-wave"));
    if let Some(first) = rows.first() {
        rep.push(Check::le("initial-inside-pair", first.d_wave / first.rho, 1.0 + 1e-12, "sub-super-sandwich"));
    }
    rep.push(Check::le("boundary-subsolution", worst_boundary, 1e-12, "subsolution-boundary"));
    let margin = if p.critical { p.rate() - r.fp0() } else { p.c * p.lam_c - r.fp0() };
    rep.push(
        Check::gt("subsolution-certificate", margin, 0.0, "subsolution-inequality")
            .with_note(tag),
    );
    rep.push(Check::le("supersolution-residual", wave.residual(r), 1e-6, "wave-equation"));
    rep.push(Check::gt("monotone-in-x", min_ux, -1e-8, "monotone-entire-solution"));
    if let Some(last) = run.deviation.snapshots.last() {
        let kappa = last.u[g.nx] + wave.value(g.l + wave.c * last.t - p.theta);
        rep.push(Check::ge("plateau-at-L", kappa, 1.0 - 1e-6, "unit-plateau"));
    }
    let late: Vec<&Type1Row> = rows.iter().filter(|row| row.t > t_switch + 1e-9).collect();
    match late.last() {
        Some(last) => {
            let mut c = Check::le("d-V-final", last.d_v, 1e-2, "approach-to-stationary");
            c.note = Some(format!("t = {}", last.t));
            rep.push(c);
            // the tail settles on the grid's own stationary state; judge the
            // trend while the distance is well above that floor
            let floor = last.d_v;
            let picks: Vec<f64> = late.iter().map(|r| r.d_v).take_while(|&d| d > 10.0 * floor).collect();
            rep.push(
                trend_check("d-V-decreasing", &picks, Trend::Decreasing, 0.0, "approach-to-stationary")
                    .with_note(format!("{} points above 10x the final distance", picks.len())),
            );
        }
        None => rep.push(Check::insufficient("d-V-final", "approach-to-stationary", "no output after theta/c")),
    }
    (rep, rows)
}
