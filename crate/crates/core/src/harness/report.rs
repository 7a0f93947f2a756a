//! Pass/fail records and their JSON / text renderings.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    InsufficientData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
    /// Boolean outcome; `measured` is 1 for true and 0 for false.
    Holds,
}

/// One verification record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    /// `None` when the quantity could not be measured (serialized as `null`).
    pub measured: Option<f64>,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
    pub status: Status,
    pub mandatory: bool,
    /// Property this check certifies, or `"plumbing"`.
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Check {
    fn compare(id: &str, measured: f64, threshold: f64, rel: Relation, anchor: &str) -> Self {
        let pass = measured.is_finite()
            && match rel {
                Relation::Le => measured <= threshold,
                Relation::Lt => measured < threshold,
                Relation::Ge => measured >= threshold,
                Relation::Gt => measured > threshold,
                Relation::Holds => measured == 1.0,
            };
        Self {
            id: id.to_string(),
            measured: measured.is_finite().then_some(measured),
            threshold,
            relation: rel,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            mandatory: true,
            anchor: anchor.to_string(),
            note: None,
        }
    }

    pub fn le(id: &str, measured: f64, threshold: f64, anchor: &str) -> Self {
        Self::compare(id, measured, threshold, Relation::Le, anchor)
    }

    pub fn lt(id: &str, measured: f64, threshold: f64, anchor: &str) -> Self {
        Self::compare(id, measured, threshold, Relation::Lt, anchor)
    }

    pub fn ge(id: &str, measured: f64, threshold: f64, anchor: &str) -> Self {
        Self::compare(id, measured, threshold, Relation::Ge, anchor)
    }

    pub fn gt(id: &str, measured: f64, threshold: f64, anchor: &str) -> Self {
        Self::compare(id, measured, threshold, Relation::Gt, anchor)
    }

    pub fn holds(id: &str, ok: bool, anchor: &str) -> Self {
        Self::compare(id, if ok { 1.0 } else { 0.0 }, 1.0, Relation::Holds, anchor)
    }

    /// A check that could not be evaluated; counts as a failure.
    pub fn insufficient(id: &str, anchor: &str, note: impl Into<String>) -> Self {
        Self {
            id: id.to_string(),
            measured: None,
            threshold: f64::NAN,
            relation: Relation::Holds,
            pass: false,
            status: Status::InsufficientData,
            mandatory: true,
            anchor: anchor.to_string(),
            note: Some(note.into()),
        }
    }

    /// A failed check carrying an error message instead of a measurement.
    pub fn errored(id: &str, anchor: &str, err: impl std::fmt::Display) -> Self {
        let mut c = Self::holds(id, false, anchor);
        c.measured = None;
        c.note = Some(err.to_string());
        c
    }

    pub fn optional(mut self) -> Self {
        self.mandatory = false;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self { suite: suite.into(), pass: true, checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.refresh();
    }

    /// Appends all checks of `other`, prefixing their ids.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.id = format!("{prefix}/{}", c.id);
            self.checks.push(c);
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        self.pass = self.checks.iter().filter(|c| c.mandatory).all(|c| c.pass);
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width table, one row per check.
    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "suite {}: {}\n{:<width$}  {:<6}  {:>24}  {:>2}  {:>24}  anchor\n",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            "check",
            "status",
            "measured",
            "",
            "threshold",
        );
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::InsufficientData => "insuff",
            };
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Lt => "<",
                Relation::Ge => ">=",
                Relation::Gt => ">",
                Relation::Holds => "==",
            };
            let measured = c.measured.map_or("-".to_string(), |m| format!("{m:.16e}"));
            let threshold =
                if c.threshold.is_finite() { format!("{:.16e}", c.threshold) } else { "-".into() };
            let mut line = format!(
                "{:<width$}  {:<6}  {:>24}  {:>2}  {:>24}  {}",
                c.id, status, measured, rel, threshold, c.anchor
            );
            if !c.mandatory {
                line.push_str(" (optional)");
            }
            if let Some(n) = &c.note {
                line.push_str(&format!(" [{n}]"));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Outcome of a trend check over a schedule of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trend {
    Increasing,
    Decreasing,
}

/// Minimum number of schedule entries for a trend to be judged.
pub const TREND_MIN_POINTS: usize = 3;

/// Monotone over the whole schedule, with the last step larger than `noise`.
pub fn trend_check(id: &str, values: &[f64], trend: Trend, noise: f64, anchor: &str) -> Check {
    if values.len() < TREND_MIN_POINTS {
        return Check::insufficient(
            id,
            anchor,
            format!("{} values, need at least {TREND_MIN_POINTS}", values.len()),
        );
    }
    let sign = match trend {
        Trend::Increasing => 1.0,
        Trend::Decreasing => -1.0,
    };
    let steps: Vec<f64> = values.windows(2).map(|w| sign * (w[1] - w[0])).collect();
    let monotone = steps.iter().all(|&d| d > 0.0);
    let last = *steps.last().unwrap();
    let mut c = Check::gt(id, if monotone { last } else { f64::min(last, -last.abs()) }, noise, anchor);
    if !monotone {
        c.note = Some("not monotone over the schedule".into());
    }
    c
}
