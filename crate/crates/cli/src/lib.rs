//! Command-line driver for `kpp-halfline`.
//!
//! Every run-producing command writes into one output directory and ends by
//! writing `manifest.json` there: the task, the resolved configuration, the
//! run status and a SHA-256 for every file written. Exit codes are 0 on
//! success, 1 when a verification fails and 2 on usage, configuration or
//! checksum errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kpp_halfline::reaction::Preset;
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod manifest;
pub mod plot;
pub mod sweep;

use config::{Init, RunConfig, Suite, Task};
use manifest::RunStatus;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("checksum mismatch: {0}")]
    Checksum(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Run(#[from] kpp_halfline::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Checksum(_) | CliError::Schema(_) => 2,
            CliError::Io(_) | CliError::Run(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kpp-halfline", version, about = "Fisher-KPP entire solutions on the half line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by the run-producing commands. Flags override values
/// read from `--config`.
#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// logistic, cubic or sine.
    #[arg(long)]
    reaction: Option<String>,
    /// Rate of the logistic reaction.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    c: Vec<f64>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    theta: Vec<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, num_args = 1..)]
    n: Vec<usize>,
    #[arg(long, num_args = 1..)]
    m: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long)]
    out_interval: Option<f64>,
    #[arg(long)]
    ds: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, value_enum)]
    init: Option<Init>,
    /// Output directory (default `runs/<command>`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the KPP and concavity hypotheses of the reaction.
    Validate(Common),
    /// Traveling-wave profiles for each `--c`.
    Wave(Common),
    /// Stationary profile on `[0, L]`.
    Stationary(Common),
    /// Solve from `psi_n` or zero data, writing snapshots every `out_interval`.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Stop at the first snapshot at or after this time; `resume` continues.
        #[arg(long)]
        halt_at: Option<f64>,
    },
    /// Entire solutions squeezed between a wave and a subsolution.
    Type1(Common),
    /// Shifted limit of solutions started from `psi_n`.
    Type2(Common),
    /// Level sets of the type II run for the largest `n`.
    Levelset(Common),
    /// Run a verification suite and write its report.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Run a JSON list of tasks on a worker pool.
    Sweep {
        /// JSON array of `{"task": {...}, "config": {...}}`.
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads.
        #[arg(long, env = "KPP_HALFLINE_JOBS")]
        jobs: Option<usize>,
    },
    /// Continue a halted `simulate` run.
    Resume { run_dir: PathBuf },
    /// Render a CSV written by another command as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_preset(name: &str, rate: Option<f64>) -> Result<Preset, CliError> {
    match (name, rate) {
        ("logistic", rate) => Ok(Preset::Logistic { rate: rate.unwrap_or(1.0) }),
        ("cubic", None) => Ok(Preset::Cubic),
        ("sine", None) => Ok(Preset::Sine),
        ("cubic" | "sine", Some(_)) => Err(CliError::Usage(format!("--rate does not apply to {name}"))),
        _ => Err(CliError::Usage(format!("unknown reaction {name}; expected logistic, cubic or sine"))),
    }
}

impl Common {
    fn into_config(self, task: Task) -> Result<(RunConfig, PathBuf), CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        match (self.reaction.as_deref(), self.rate) {
            (Some(name), rate) => cfg.reaction = parse_preset(name, rate)?,
            (None, Some(rate)) => match cfg.reaction {
                Preset::Logistic { .. } => cfg.reaction = Preset::Logistic { rate },
                _ => return Err(CliError::Usage("--rate applies to the logistic reaction only".into())),
            },
            (None, None) => {}
        }
        if let Some(l) = self.l {
            cfg.grid.l = l;
        }
        if let Some(nx) = self.nx {
            cfg.grid.nx = nx;
        }
        if let Some(dt) = self.dt {
            cfg.grid.dt = dt;
        }
        let list = |dst: &mut Vec<f64>, src: Vec<f64>| {
            if !src.is_empty() {
                *dst = src;
            }
        };
        list(&mut cfg.c, self.c);
        list(&mut cfg.theta, self.theta);
        list(&mut cfg.m, self.m);
        if !self.n.is_empty() {
            cfg.n = self.n;
        }
        cfg.delta = self.delta.or(cfg.delta);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        set!(t_start, t_end, out_interval, ds, s_max, seed, pairs, init);
        let out = self
            .out
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| PathBuf::from("runs").join(task.name()));
        let cfg = cfg.resolve(task)?;
        cfg.validate(task)?;
        Ok((cfg, out))
    }
}

fn report(outcome: &commands::Outcome, out: &Path) -> i32 {
    print!("{}", outcome.summary);
    println!("{:?}: {}", outcome.status, out.display());
    match outcome.status {
        RunStatus::FailedVerification => 1,
        RunStatus::Complete | RunStatus::Partial => 0,
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    let (task, common, halt_at) = match command {
        Command::Validate(c) => (Task::Validate, c, None),
        Command::Wave(c) => (Task::Wave, c, None),
        Command::Stationary(c) => (Task::Stationary, c, None),
        Command::Simulate { common, halt_at } => (Task::Simulate, common, halt_at),
        Command::Type1(c) => (Task::Type1, c, None),
        Command::Type2(c) => (Task::Type2, c, None),
        Command::Levelset(c) => (Task::Levelset, c, None),
        Command::Verify { suite, common } => (Task::Verify { suite }, common, None),
        Command::Sweep { plan, out, jobs } => {
            let outcome = sweep::run(&plan, &out, jobs)?;
            return Ok(report(&outcome, &out));
        }
        Command::Resume { run_dir } => {
            let outcome = commands::resume(&run_dir)?;
            return Ok(report(&outcome, &run_dir));
        }
        Command::Plot { input, out } => {
            let table = kpp_halfline::io::Table::read(&input).map_err(|e| CliError::Schema(e.to_string()))?;
            let svg = plot::render(&table)?;
            std::fs::write(&out, svg).map_err(|e| CliError::io(&out, e))?;
            println!("wrote {}", out.display());
            return Ok(0);
        }
    };
    if let Some(h) = halt_at {
        if !h.is_finite() {
            return Err(CliError::Usage(format!("--halt-at must be finite, got {h}")));
        }
    }
    let (cfg, out) = common.into_config(task)?;
    let outcome = commands::execute(task, &cfg, &out, halt_at)?;
    Ok(report(&outcome, &out))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
