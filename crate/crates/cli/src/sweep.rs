//! Independent tasks fanned out over a worker pool. Entry `i` owns the
//! directory `<out>/<iii>-<command>`; the sweep manifest lists each entry's
//! status and the checksum of its manifest.

use std::collections::BTreeMap;
use std::path::Path;

use kpp_halfline::exec;
use serde::{Deserialize, Serialize};

use crate::commands::{execute, Outcome};
use crate::config::{RunConfig, Task};
use crate::manifest::{sha256_hex, RunStatus, MANIFEST};
use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub task: Task,
    #[serde(default)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub dir: String,
    pub task: Task,
    pub status: Option<RunStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepManifest {
    pub entries: Vec<Record>,
    pub files: BTreeMap<String, String>,
}

pub fn read_plan(path: &Path) -> Result<Vec<Entry>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn in_pool<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
        Ok(pool.install(f))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        Ok(f())
    }
}

/// Validates every entry, then runs them `jobs` at a time (default: one
/// per core).
pub fn run(plan: &Path, out: &Path, jobs: Option<usize>) -> Result<Outcome, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let entries = read_plan(plan)?;
    let mut resolved = Vec::with_capacity(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        let cfg = e.config.resolve(e.task).and_then(|c| c.validate(e.task).map(|_| c));
        let cfg = cfg.map_err(|err| CliError::Config(format!("entry {i}: {err}")))?;
        resolved.push((format!("{i:03}-{}", e.task.name()), e.task, cfg));
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let results = in_pool(jobs, || {
        exec::map(&resolved, |(dir, task, cfg)| execute(*task, cfg, &out.join(dir), None))
    })?;

    let mut records = Vec::new();
    let mut files = BTreeMap::new();
    let mut summary = String::new();
    let mut failed = false;
    for ((dir, task, _), res) in resolved.iter().zip(results) {
        let (status, error) = match res {
            Ok(o) => (Some(o.status), None),
            Err(e) => (None, Some(e.to_string())),
        };
        failed |= status != Some(RunStatus::Complete);
        summary.push_str(&format!("{dir}: {}\n", error.clone().unwrap_or_else(|| format!("{:?}", status.unwrap()))));
        let rel = format!("{dir}/{MANIFEST}");
        if let Ok(bytes) = std::fs::read(out.join(&rel)) {
            files.insert(rel, sha256_hex(&bytes));
        }
        records.push(Record { dir: dir.clone(), task: *task, status, error });
    }
    let m = SweepManifest { entries: records, files };
    let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    text.push('\n');
    let path = out.join(MANIFEST);
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    let status = if failed { RunStatus::FailedVerification } else { RunStatus::Complete };
    Ok(Outcome { status, summary })
}
