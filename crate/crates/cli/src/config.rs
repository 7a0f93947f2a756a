//! Run configuration: JSON file, command-line overrides, per-command
//! defaults and validation.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use kpp_halfline::entire::LEVEL_RANGE;
use kpp_halfline::halfline::Grid;
use kpp_halfline::reaction::{Preset, Reaction};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Initial datum of `simulate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// `psi_n` with `n` the first entry of the `n` list.
    #[default]
    Psi,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Profiles,
    Solver,
    Type1,
    Type2,
    All,
}

/// What a run directory holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    Validate,
    Wave,
    Stationary,
    Simulate,
    Type1,
    Type2,
    Levelset,
    Verify { suite: Suite },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Validate => "validate",
            Task::Wave => "wave",
            Task::Stationary => "stationary",
            Task::Simulate => "simulate",
            Task::Type1 => "type1",
            Task::Type2 => "type2",
            Task::Levelset => "levelset",
            Task::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub reaction: Preset,
    pub grid: Grid,
    /// Wave speeds.
    pub c: Vec<f64>,
    /// Phases of the type I construction.
    pub theta: Vec<f64>,
    /// Margin exponent at the minimal speed.
    pub delta: Option<f64>,
    /// Type II sequence indices; for `simulate`, `n[0]` selects `psi_n`.
    pub n: Vec<usize>,
    /// Levels for level-set tracking.
    pub m: Vec<f64>,
    pub t_start: f64,
    pub t_end: f64,
    /// Spacing of written snapshots.
    pub out_interval: f64,
    /// Shifted-time spacing of type II snapshots.
    pub ds: f64,
    /// Last shifted time of type II runs.
    pub s_max: f64,
    pub seed: u64,
    /// Random ordered pairs in the solver suite.
    pub pairs: usize,
    pub init: Init,
    /// Accepted in files, never echoed into manifests.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            reaction: Preset::default(),
            grid: Grid::default(),
            c: Vec::new(),
            theta: vec![0.0],
            delta: None,
            n: Vec::new(),
            m: vec![0.5],
            t_start: -20.0,
            t_end: 40.0,
            out_interval: 1.0,
            ds: 0.1,
            s_max: 1.0,
            seed: 0,
            pairs: 100,
            init: Init::Psi,
            out: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }

    pub fn reaction(&self) -> Result<Reaction, CliError> {
        Reaction::preset(self.reaction).map_err(|e| bad(e.to_string()))
    }

    /// Fills lists left empty with the defaults of `task`.
    pub fn resolve(mut self, task: Task) -> Result<Self, CliError> {
        let c0 = self.reaction()?.c0();
        let wants_c = matches!(task, Task::Wave | Task::Type1 | Task::Verify { suite: Suite::Type1 | Suite::All });
        if self.c.is_empty() && wants_c {
            self.c = vec![1.25 * c0, c0];
        }
        if self.n.is_empty() {
            self.n = match task {
                Task::Simulate => vec![1],
                Task::Levelset => vec![64],
                _ => vec![8, 16, 32, 64],
            };
        }
        Ok(self)
    }

    /// Checks every numeric field `task` uses.
    pub fn validate(&self, task: Task) -> Result<(), CliError> {
        let r = self.reaction()?;
        self.grid.validate().map_err(|e| bad(e.to_string()))?;
        let c0 = r.c0();
        let uses = |t: &[Task]| t.contains(&task) || matches!(task, Task::Verify { suite: Suite::All });
        if !(self.out_interval > 0.0 && self.out_interval.is_finite()) {
            return Err(bad(format!("out_interval must be positive, got {}", self.out_interval)));
        }
        if uses(&[Task::Wave, Task::Type1, Task::Verify { suite: Suite::Type1 }]) {
            if self.c.is_empty() {
                return Err(bad("no wave speed given"));
            }
            if let Some(c) = self.c.iter().find(|&&c| !(c.is_finite() && c >= c0 * (1.0 - 1e-12))) {
                return Err(bad(format!("wave speed {c} is below the minimal speed {c0}")));
            }
        }
        if uses(&[Task::Type1, Task::Verify { suite: Suite::Type1 }]) {
            if self.theta.is_empty() || self.theta.iter().any(|t| !t.is_finite()) {
                return Err(bad("theta must be a non-empty list of finite numbers"));
            }
            if let Some(d) = self.delta {
                if !(d > 0.0 && d < r.fp0()) {
                    return Err(bad(format!("delta must lie in (0, {}), got {d}", r.fp0())));
                }
            }
            for &c in &self.c {
                for &th in &self.theta {
                    let ts = th / c;
                    if !(self.t_start < ts.min(0.0)) {
                        return Err(bad(format!(
                            "t_start = {} must precede min(0, theta/c) = {} (c = {c}, theta = {th})",
                            self.t_start,
                            ts.min(0.0)
                        )));
                    }
                    if !(self.t_end >= ts) {
                        return Err(bad(format!("t_end = {} precedes theta/c = {ts}", self.t_end)));
                    }
                }
            }
        }
        if uses(&[Task::Simulate, Task::Type2, Task::Levelset, Task::Verify { suite: Suite::Type2 }])
            && (self.n.is_empty() || self.n.contains(&0))
        {
            return Err(bad("n must be a non-empty list of positive integers"));
        }
        if uses(&[Task::Type2, Task::Levelset, Task::Verify { suite: Suite::Type2 }]) {
            if self.n.windows(2).any(|w| w[1] <= w[0]) {
                return Err(bad("n must be strictly increasing"));
            }
            if !(self.ds > 0.0 && self.ds.is_finite() && self.s_max >= 0.0 && self.s_max.is_finite()) {
                return Err(bad("ds must be positive and s_max non-negative"));
            }
            if self.m.is_empty() {
                return Err(bad("no level given"));
            }
            if let Some(m) = self.m.iter().find(|&&m| !(m >= LEVEL_RANGE.0 && m <= LEVEL_RANGE.1)) {
                return Err(bad(format!("level {m} outside [{}, {}]", LEVEL_RANGE.0, LEVEL_RANGE.1)));
            }
        }
        if task == Task::Simulate && !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(bad(format!("t_end must be positive, got {}", self.t_end)));
        }
        if uses(&[Task::Verify { suite: Suite::Solver }]) && self.pairs == 0 {
            return Err(bad("pairs must be positive"));
        }
        Ok(())
    }
}
