//! Plain-text tables: `# key=value` comment lines, one header row, then
//! comma-separated numbers printed with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::entire::{LevelSet, Type1Row, Type2Row};
use crate::error::{Error, Result};
use crate::halfline::{Field, Grid, Trajectory};
use crate::phaseplane::{StationaryProfile, WaveProfile};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// `{:.16e}`, which round-trips every finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                let (k, v) = c
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("line {}: comment is not key=value", ln + 1)))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|s| s.trim().to_string()).collect()),
                Some(cols) => {
                    let row: Vec<f64> = line
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
                    if row.len() != cols.len() {
                        return Err(Error::Parse(format!(
                            "line {}: {} cells, header has {}",
                            ln + 1,
                            row.len(),
                            cols.len()
                        )));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| Error::Parse("no header row".into()))?;
        Ok(Self { meta, columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Fails unless the header is exactly `expected`.
    pub fn expect_columns(&self, expected: &[&str]) -> Result<()> {
        if self.columns.iter().map(String::as_str).eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected columns {expected:?}, found {:?}", self.columns)))
        }
    }
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// `# t=<t>`, columns `x,u`.
pub fn snapshot_table(field: &Field, g: &Grid) -> Table {
    let mut t = Table::new(&["x", "u"]).meta("t", fmt_f64(field.t));
    for (i, &u) in field.u.iter().enumerate() {
        t.push(vec![g.x(i), u]);
    }
    t
}

pub fn read_snapshot(path: &Path) -> Result<Field> {
    let t = Table::read(path)?;
    t.expect_columns(&["x", "u"])?;
    let time = t
        .get_meta("t")
        .ok_or_else(|| Error::Parse(format!("{}: missing t", path.display())))?
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(Field::new(time, t.column("u").unwrap()))
}

/// Columns `t,beta,kappa`, one row per step.
pub fn diagnostics_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&["t", "beta", "kappa"]);
    for i in 0..traj.diag_t.len() {
        t.push(vec![traj.diag_t[i], traj.beta[i], traj.kappa[i]]);
    }
    t
}

pub fn wave_table(w: &WaveProfile, a_c: Option<f64>) -> Table {
    let mut t = Table::new(&["z", "phi"])
        .meta("c", fmt_f64(w.c))
        .meta("lam_c", fmt_f64(w.lam_c))
        .meta("critical", w.critical);
    if let Some(a) = a_c {
        t = t.meta("A_c", fmt_f64(a));
    }
    for (i, &p) in w.phi.iter().enumerate() {
        t.push(vec![w.z0 + i as f64 * w.dz, p]);
    }
    t
}

pub fn stationary_table(v: &StationaryProfile) -> Table {
    let mut t = Table::new(&["x", "V"]).meta("Vp0", fmt_f64(v.vp0));
    for (i, &y) in v.v.iter().enumerate() {
        t.push(vec![i as f64 * v.dx, y]);
    }
    t
}

/// Columns `s,xi,xi_prime,identity_residual`; unresolved entries are `NaN`.
pub fn level_set_table(ls: &LevelSet) -> Table {
    let mut t = Table::new(&["s", "xi", "xi_prime", "identity_residual"]).meta("m", fmt_f64(ls.m));
    for p in &ls.samples {
        t.push(vec![p.s, opt(p.xi), opt(p.xi_prime), opt(p.residual)]);
    }
    t
}

pub fn type1_table(rows: &[Type1Row]) -> Table {
    let mut t = Table::new(&["t", "d_wave", "rho", "d_V"]);
    for r in rows {
        t.push(vec![r.t, r.d_wave, r.rho, r.d_v]);
    }
    t
}

pub fn type2_table(rows: &[Type2Row]) -> Table {
    let mut t = Table::new(&["n", "t_n", "eta_at_tn", "beta00"]);
    for r in rows {
        t.push(vec![r.n as f64, r.t_n, r.eta_at_tn, r.beta00]);
    }
    t
}
