//! One function per task. Each writes its outputs through a [`RunDir`] and
//! finishes with the manifest.

use std::fmt::Write as _;
use std::path::Path;

use kpp_halfline::entire::{
    build_type1, choose_n, level_set, psi_field, recentered_limit, run_type2, type2_limit,
    verify_level_set, verify_type1, LimitWindow, Type1Config, Type1Row, Type2Config, TypeIIRun,
    TypeIParams,
};
use kpp_halfline::exec;
use kpp_halfline::halfline::{Field, Integration, Kpp};
use kpp_halfline::harness::report::{Check, VerificationReport};
use kpp_halfline::harness::suites::{
    recentering_times, reference_stationary, suite_profiles, suite_solver, SolverSuite,
};
use kpp_halfline::io::{
    diagnostics_table, fmt_f64, level_set_table, read_snapshot, snapshot_table, stationary_table,
    type1_table, type2_table, wave_table, Table,
};
use kpp_halfline::phaseplane::{amplitude_ac, stationary, tail_fit, wave_with, WaveOptions};
use kpp_halfline::reaction::{validate_concavity, validate_kpp, Reaction};

use crate::config::{Init, RunConfig, Suite, Task};
use crate::manifest::{Manifest, Progress, RunDir, RunStatus};
use crate::CliError;

/// Recentering window `(X, T)` for level-set comparisons.
pub const RECENTER: (f64, f64) = (1.0, 0.2);
/// Window of the type II pairwise comparison.
pub const LIMIT_WINDOW: LimitWindow = LimitWindow { x_max: 20.0, t_half: 1.0 };
const SANDWICH_RTOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: RunStatus,
    pub summary: String,
}

impl Outcome {
    pub(crate) fn done(summary: String) -> Self {
        Self { status: RunStatus::Complete, summary }
    }

    fn from_report(rep: &VerificationReport) -> Self {
        let status = if rep.pass { RunStatus::Complete } else { RunStatus::FailedVerification };
        Self { status, summary: rep.to_table() }
    }
}

/// Runs `task` into `out`. `halt_at` applies to `simulate` only.
pub fn execute(task: Task, cfg: &RunConfig, out: &Path, halt_at: Option<f64>) -> Result<Outcome, CliError> {
    let r = cfg.reaction()?;
    let mut dir = RunDir::create(out)?;
    let (outcome, progress) = match task {
        Task::Validate => (validate(&r, &mut dir)?, None),
        Task::Wave => (waves(&r, cfg, &mut dir)?, None),
        Task::Stationary => (stationary_profile(&r, cfg, &mut dir)?, None),
        Task::Simulate => return simulate(&r, cfg, dir, halt_at),
        Task::Type1 => (type1(&r, cfg, Some(&mut dir))?, None),
        Task::Type2 => (Outcome::from_report(&type2(&r, cfg, Some(&mut dir))?), None),
        Task::Levelset => (levelset(&r, cfg, &mut dir)?, None),
        Task::Verify { suite } => (verify(&r, cfg, suite, &mut dir)?, None),
    };
    dir.finish(task, outcome.status, cfg, progress)?;
    Ok(outcome)
}

fn write_report(dir: &mut RunDir, rep: &VerificationReport) -> Result<(), CliError> {
    let mut json = rep.to_json();
    json.push('\n');
    dir.write("report.json", &json)
}

fn validate(r: &Reaction, dir: &mut RunDir) -> Result<Outcome, CliError> {
    let mut rep = VerificationReport::new(format!("validate:{}", r.name()));
    rep.absorb("kpp", validate_kpp(r, 10_000)?);
    rep.absorb("concavity", validate_concavity(r, 1000)?);
    write_report(dir, &rep)?;
    Ok(Outcome::from_report(&rep))
}

fn waves(r: &Reaction, cfg: &RunConfig, dir: &mut RunDir) -> Result<Outcome, CliError> {
    let ws = exec::map(&cfg.c, |&c| wave_with(r, c, &WaveOptions::default()));
    let mut summary = String::new();
    for (&c, w) in cfg.c.iter().zip(ws) {
        let w = w?;
        let a_c = if w.critical { None } else { Some(amplitude_ac(&w)?) };
        let mut t = wave_table(&w, a_c).meta("residual", fmt_f64(w.residual(r)));
        if let Ok(fit) = tail_fit(&w) {
            t = t.meta("lambda_fit", fmt_f64(fit.lambda_est));
            if let Some(k) = fit.c0_correction {
                t = t.meta("lambda_fit_corrected", fmt_f64(k));
            }
        }
        dir.write(&format!("wave_c{c}.csv"), &t.render())?;
        let _ = writeln!(summary, "c = {c}: lam_c = {}, critical = {}", w.lam_c, w.critical);
    }
    Ok(Outcome::done(summary))
}

fn stationary_profile(r: &Reaction, cfg: &RunConfig, dir: &mut RunDir) -> Result<Outcome, CliError> {
    let v = stationary(r, cfg.grid.l, cfg.grid.nx)?;
    dir.write("stationary.csv", &stationary_table(&v).render())?;
    Ok(Outcome::done(format!("V'(0) = {}\n", v.vp0)))
}

// ---- simulate / resume ----

const SNAP_DIR: &str = "snapshots";
const DIAGNOSTICS: &str = "diagnostics.csv";

/// Steps between written snapshots.
pub fn snapshot_stride(out_interval: f64, dt: f64) -> u64 {
    ((out_interval / dt + 1e-9).floor() as u64).max(1)
}

fn total_steps(t_end: f64, dt: f64) -> u64 {
    (t_end / dt - 1e-9).ceil().max(0.0) as u64
}

fn snap_name(j: usize) -> String {
    format!("{SNAP_DIR}/snap_{j:05}.csv")
}

fn write_snapshot(run: &Integration<Kpp<'_>>, dir: &mut RunDir, j: usize) -> Result<String, CliError> {
    let name = snap_name(j);
    let t = snapshot_table(&run.field(), run.grid()).meta("k", run.k());
    dir.write(&name, &t.render())?;
    Ok(name)
}

/// Steps to `t_end`, writing snapshots on the stride; stops early at the
/// first snapshot at or after `halt_at`.
fn advance(
    run: &mut Integration<Kpp<'_>>,
    cfg: &RunConfig,
    dir: &mut RunDir,
    diag: &mut Table,
    mut written: usize,
    halt_at: Option<f64>,
) -> Result<Option<Progress>, CliError> {
    let dt = cfg.grid.dt;
    let every = snapshot_stride(cfg.out_interval, dt);
    let total = total_steps(cfg.t_end, dt);
    while run.k() < total {
        run.step()?;
        diag.push(vec![run.t(), run.beta(), run.kappa()]);
        let k = run.k();
        if k.is_multiple_of(every) || k == total {
            let name = write_snapshot(run, dir, written)?;
            written += 1;
            if k < total && halt_at.is_some_and(|h| run.t() >= h - 1e-9 * dt) {
                dir.write(DIAGNOSTICS, &diag.render())?;
                return Ok(Some(Progress { t_ref: run.t_ref(), k, snapshot: name, snapshots_written: written }));
            }
        }
    }
    dir.write(DIAGNOSTICS, &diag.render())?;
    Ok(None)
}

fn simulate(r: &Reaction, cfg: &RunConfig, mut dir: RunDir, halt_at: Option<f64>) -> Result<Outcome, CliError> {
    let g = cfg.grid;
    let u0 = match cfg.init {
        Init::Psi => psi_field(r, cfg.n[0], choose_n(r)?, &g),
        Init::Zero => vec![0.0; g.nx + 1],
    };
    let mut run = Integration::new(Kpp(r), &g, &Field::new(0.0, u0))?;
    let mut diag = Table::new(&["t", "beta", "kappa"]);
    diag.push(vec![run.t(), run.beta(), run.kappa()]);
    write_snapshot(&run, &mut dir, 0)?;
    let progress = advance(&mut run, cfg, &mut dir, &mut diag, 1, halt_at)?;
    let status = if progress.is_some() { RunStatus::Partial } else { RunStatus::Complete };
    let summary = format!("t = {}, steps = {}, u_x(0) = {}\n", run.t(), run.k(), run.beta());
    dir.finish(Task::Simulate, status, cfg, progress)?;
    Ok(Outcome { status, summary })
}

/// Continues a halted `simulate` run in `dir`.
pub fn resume(dir: &Path) -> Result<Outcome, CliError> {
    let m = Manifest::read(dir)?;
    if m.status != RunStatus::Partial {
        return Ok(Outcome::done(format!("run is {:?}; nothing to resume\n", m.status)));
    }
    if m.task != Task::Simulate {
        return Err(CliError::Config(format!("{} runs cannot be resumed", m.task.name())));
    }
    let p = m
        .progress
        .clone()
        .ok_or_else(|| CliError::Config("partial run without progress record".into()))?;
    m.verify_files(dir)?;
    let cfg = m.config.clone();
    cfg.validate(Task::Simulate)?;
    let r = cfg.reaction()?;
    let field = read_snapshot(&dir.join(&p.snapshot)).map_err(|e| CliError::Config(e.to_string()))?;
    let mut diag = Table::read(&dir.join(DIAGNOSTICS)).map_err(|e| CliError::Config(e.to_string()))?;
    diag.expect_columns(&["t", "beta", "kappa"]).map_err(|e| CliError::Config(e.to_string()))?;
    let mut run = Integration::resume(Kpp(&r), &cfg.grid, p.t_ref, p.k, field.u)?;
    let mut rd = RunDir::reopen(dir, m.files.clone());
    advance(&mut run, &cfg, &mut rd, &mut diag, p.snapshots_written, None)?;
    let summary = format!("resumed at t = {}, finished at t = {}\n", p.t_ref + p.k as f64 * cfg.grid.dt, run.t());
    rd.finish(Task::Simulate, RunStatus::Complete, &cfg, None)?;
    Ok(Outcome::done(summary))
}

// ---- type I ----

pub struct Type1Member {
    pub c: f64,
    pub theta: f64,
    pub params: TypeIParams,
    pub rows: Vec<Type1Row>,
}

/// Every `(c, theta)` pair; construction failures become failed checks.
pub fn type1_members(r: &Reaction, cfg: &RunConfig) -> Result<(VerificationReport, Vec<Type1Member>), CliError> {
    let v = reference_stationary(r)?;
    let jobs: Vec<(f64, f64)> = cfg.c.iter().flat_map(|&c| cfg.theta.iter().map(move |&t| (c, t))).collect();
    let results = exec::map(&jobs, |&(c, theta)| {
        let w = wave_with(r, c, &WaveOptions::default())?;
        let tc = Type1Config {
            grid: cfg.grid,
            t_start: cfg.t_start,
            t_after: cfg.t_end - theta / c,
            out_interval: cfg.out_interval,
            sandwich_rtol: SANDWICH_RTOL,
        };
        let run = build_type1(r, &w, theta, cfg.delta, &tc)?;
        let (rep, rows) = verify_type1(&run, r, &w, &v, SANDWICH_RTOL);
        Ok::<_, kpp_halfline::Error>((rep, Type1Member { c, theta, params: run.params, rows }))
    });
    let mut rep = VerificationReport::new(format!("type1:{}", r.name()));
    let mut members = Vec::new();
    for (&(c, theta), res) in jobs.iter().zip(results) {
        let prefix = format!("c={c}:theta={theta}");
        match res {
            Ok((sub, m)) => {
                rep.absorb(&prefix, sub);
                members.push(m);
            }
            Err(e) => rep.push(Check::errored(&format!("{prefix}/construction"), "sub-super-sandwich", e)),
        }
    }
    Ok((rep, members))
}

fn type1(r: &Reaction, cfg: &RunConfig, dir: Option<&mut RunDir>) -> Result<Outcome, CliError> {
    let (rep, members) = type1_members(r, cfg)?;
    if let Some(dir) = dir {
        for m in &members {
            let p = &m.params;
            let t = type1_table(&m.rows)
                .meta("c", fmt_f64(m.c))
                .meta("theta", fmt_f64(m.theta))
                .meta("lam_c", fmt_f64(p.lam_c))
                .meta("A_c", fmt_f64(p.a_c))
                .meta("rho_rate", fmt_f64(p.rate()));
            dir.write(&format!("type1_c{}_theta{}.csv", m.c, m.theta), &t.render())?;
        }
        write_report(dir, &rep)?;
    }
    Ok(Outcome::from_report(&rep))
}

// ---- type II and level sets ----

fn type2_config(cfg: &RunConfig) -> Type2Config {
    Type2Config { grid: cfg.grid, ds: cfg.ds, s_max: cfg.s_max, ..Default::default() }
}

fn write_type2_run(run: &TypeIIRun, cfg: &RunConfig, dir: &mut RunDir) -> Result<(), CliError> {
    let base = format!("n{}", run.n);
    let diag = diagnostics_table(&run.trajectory).meta("t_n", fmt_f64(run.t_n));
    dir.write(&format!("{base}/diagnostics.csv"), &diag.render())?;
    let mut j = 0;
    for snap in &run.trajectory.snapshots {
        let q = snap.t / cfg.out_interval;
        if (q - q.round()).abs() < 1e-6 {
            let t = snapshot_table(snap, &run.grid).meta("t_n", fmt_f64(run.t_n));
            dir.write(&format!("{base}/snap_{j:03}.csv"), &t.render())?;
            j += 1;
        }
    }
    Ok(())
}

/// Level-set and recentered checks for every level in `cfg.m` on `run`.
fn level_reports(
    r: &Reaction,
    run: &TypeIIRun,
    cfg: &RunConfig,
    rep: &mut VerificationReport,
    mut dir: Option<&mut RunDir>,
) -> Result<(), CliError> {
    let dx = run.grid.dx();
    for &m in &cfg.m {
        let tag = format!("m={m}");
        let ls = match level_set(&run.trajectory, dx, r, m) {
            Ok(ls) => ls,
            Err(e) => {
                rep.push(Check::errored(&format!("level:{tag}"), "front-recedes", e));
                continue;
            }
        };
        rep.absorb(&format!("level:{tag}"), verify_level_set(&ls, r, cfg.ds));
        let res: Vec<f64> = ls.resolvable().map(|p| p.s).collect();
        let s_first = run.trajectory.snapshots[0].t;
        let s_list = recentering_times(&res, s_first, cfg.ds, RECENTER.1);
        let recentered = recentered_limit(&run.trajectory, &ls, r, &s_list, RECENTER);
        if let Some(dir) = dir.as_deref_mut() {
            let t = level_set_table(&ls).meta("n", run.n);
            dir.write(&format!("levelset_m{m}.csv"), &t.render())?;
        }
        match recentered {
            Ok((rows, sub)) => {
                rep.absorb(&format!("recentered:{tag}"), sub);
                if let Some(dir) = dir.as_deref_mut() {
                    let mut t = Table::new(&["s", "xi", "sup_gap", "ut_front", "centre_gap"])
                        .meta("m", fmt_f64(m))
                        .meta("X", fmt_f64(RECENTER.0))
                        .meta("T", fmt_f64(RECENTER.1));
                    for row in &rows {
                        t.push(vec![row.s, row.xi, row.sup_gap, row.ut_front, row.centre_gap]);
                    }
                    dir.write(&format!("recentered_m{m}.csv"), &t.render())?;
                }
            }
            Err(e) => rep.push(Check::errored(&format!("recentered:{tag}"), "recentered-limit", e)),
        }
    }
    Ok(())
}

/// Runs of the type II sequence for `ns`, in order; failures become checks.
fn type2_runs(r: &Reaction, cfg: &RunConfig, ns: &[usize], rep: &mut VerificationReport) -> Result<Vec<TypeIIRun>, CliError> {
    let big_n = choose_n(r)?;
    let v = reference_stationary(r)?;
    let tc = type2_config(cfg);
    let runs = exec::map(ns, |&n| run_type2(r, n, big_n, v.vp0, &tc));
    let mut ok = Vec::new();
    for (&n, res) in ns.iter().zip(runs) {
        match res {
            Ok(run) => ok.push(run),
            Err(e) => rep.push(Check::errored(&format!("n={n}/run"), "shift-diverges", e)),
        }
    }
    Ok(ok)
}

/// Type II sequence, limit diagnostics and level sets of the finest run.
fn type2(r: &Reaction, cfg: &RunConfig, mut dir: Option<&mut RunDir>) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new(format!("type2:{}", r.name()));
    let runs = type2_runs(r, cfg, &cfg.n, &mut rep)?;
    match type2_limit(r, &runs, &LIMIT_WINDOW) {
        Ok((rows, sub)) => {
            rep.absorb("limit", sub);
            if let Some(dir) = dir.as_deref_mut() {
                dir.write("type2.csv", &type2_table(&rows).render())?;
            }
        }
        Err(e) => rep.push(Check::errored("limit", "limit-exists", e)),
    }
    if let Some(dir) = dir.as_deref_mut() {
        for run in &runs {
            write_type2_run(run, cfg, dir)?;
        }
    }
    match runs.last() {
        Some(fine) => level_reports(r, fine, cfg, &mut rep, dir.as_deref_mut())?,
        None => rep.push(Check::insufficient("level", "front-recedes", "no successful runs")),
    }
    if let Some(dir) = dir {
        write_report(dir, &rep)?;
    }
    Ok(rep)
}

fn levelset(r: &Reaction, cfg: &RunConfig, dir: &mut RunDir) -> Result<Outcome, CliError> {
    let mut rep = VerificationReport::new(format!("levelset:{}", r.name()));
    let n = *cfg.n.last().expect("validated");
    let runs = type2_runs(r, cfg, &[n], &mut rep)?;
    if let Some(run) = runs.first() {
        write_type2_run(run, cfg, dir)?;
        level_reports(r, run, cfg, &mut rep, Some(dir))?;
    }
    write_report(dir, &rep)?;
    Ok(Outcome::from_report(&rep))
}

fn verify(r: &Reaction, cfg: &RunConfig, suite: Suite, dir: &mut RunDir) -> Result<Outcome, CliError> {
    let solver = SolverSuite { grid: cfg.grid, seed: cfg.seed, pairs: cfg.pairs, ..Default::default() };
    let rep = match suite {
        Suite::Profiles => suite_profiles(r),
        Suite::Solver => suite_solver(r, &solver),
        Suite::Type1 => type1_members(r, cfg)?.0,
        Suite::Type2 => type2(r, cfg, None)?,
        Suite::All => {
            let mut rep = VerificationReport::new(format!("all:{}", r.name()));
            rep.absorb("profiles", suite_profiles(r));
            rep.absorb("solver", suite_solver(r, &solver));
            rep.absorb("type1", type1_members(r, cfg)?.0);
            rep.absorb("type2", type2(r, cfg, None)?);
            rep
        }
    };
    write_report(dir, &rep)?;
    Ok(Outcome::from_report(&rep))
}
