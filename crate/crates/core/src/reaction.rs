//! KPP nonlinearities, hypothesis checks and the spatially uniform flow.

use std::f64::consts::PI;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::report::{Check, VerificationReport};
use crate::numerics::ode;

/// Built-in reactions, selectable by name from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    /// `r u (1 - u)`.
    Logistic {
        #[serde(default = "one")]
        rate: f64,
    },
    /// `u - u^3 = u (1 - u^2)`.
    Cubic,
    /// `sin(pi u) / pi`.
    Sine,
}

fn one() -> f64 {
    1.0
}

impl Default for Preset {
    fn default() -> Self {
        Preset::Logistic { rate: 1.0 }
    }
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

struct Custom {
    name: String,
    f: Box<ScalarFn>,
    df: Box<ScalarFn>,
    d2f: Option<Box<ScalarFn>>,
}

#[derive(Clone)]
enum Kind {
    Preset(Preset),
    Custom(Arc<Custom>),
}

/// A reaction term `f` on `[0, 1]`, extended linearly with slope `f'(0)`
/// to negative arguments.
#[derive(Clone)]
pub struct Reaction {
    kind: Kind,
    fp0: f64,
    fp1: f64,
    mu: f64,
    c0: f64,
}

impl fmt::Debug for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reaction")
            .field("name", &self.name())
            .field("fp0", &self.fp0)
            .field("fp1", &self.fp1)
            .finish()
    }
}

impl Default for Reaction {
    fn default() -> Self {
        Self::logistic()
    }
}

impl Reaction {
    pub fn preset(p: Preset) -> Result<Self> {
        if let Preset::Logistic { rate } = p {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::InvalidReaction(format!(
                    "logistic rate must be positive, got {rate}"
                )));
            }
        }
        let kind = Kind::Preset(p);
        let fp0 = raw_df(&kind, 0.0);
        let fp1 = raw_df(&kind, 1.0);
        Ok(Self::assemble(kind, fp0, fp1))
    }

    pub fn logistic() -> Self {
        Self::preset(Preset::Logistic { rate: 1.0 }).expect("unit rate is valid")
    }

    pub fn cubic() -> Self {
        Self::preset(Preset::Cubic).expect("valid preset")
    }

    pub fn sine() -> Self {
        Self::preset(Preset::Sine).expect("valid preset")
    }

    /// A reaction given by closures on `[0, 1]`. `f'(0)` and `f'(1)` are read
    /// from `df`; values below zero use the linear extension regardless of
    /// what `f` does there.
    pub fn custom<F, D>(
        name: impl Into<String>,
        f: F,
        df: D,
        d2f: Option<Box<ScalarFn>>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let custom = Custom { name: name.into(), f: Box::new(f), df: Box::new(df), d2f };
        let kind = Kind::Custom(Arc::new(custom));
        let fp0 = raw_df(&kind, 0.0);
        let fp1 = raw_df(&kind, 1.0);
        if !fp0.is_finite() || !fp1.is_finite() {
            return Err(Error::InvalidReaction("non-finite derivative at an endpoint".into()));
        }
        Ok(Self::assemble(kind, fp0, fp1))
    }

    fn assemble(kind: Kind, fp0: f64, fp1: f64) -> Self {
        let mu = fp0.sqrt();
        Self { kind, fp0, fp1, mu, c0: 2.0 * mu }
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            Kind::Preset(Preset::Logistic { .. }) => "logistic",
            Kind::Preset(Preset::Cubic) => "cubic",
            Kind::Preset(Preset::Sine) => "sine",
            Kind::Custom(c) => &c.name,
        }
    }

    pub fn as_preset(&self) -> Option<Preset> {
        match self.kind {
            Kind::Preset(p) => Some(p),
            Kind::Custom(_) => None,
        }
    }

    pub fn fp0(&self) -> f64 {
        self.fp0
    }

    pub fn fp1(&self) -> f64 {
        self.fp1
    }

    /// `sqrt(f'(0))`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Minimal wave speed `2 sqrt(f'(0))`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Lower end of the extended domain; the linear extension is used on
    /// all of `(-inf, 0)`.
    pub fn u_lo(&self) -> f64 {
        f64::NEG_INFINITY
    }

    pub fn f(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.fp0 * u
        } else {
            raw_f(&self.kind, u)
        }
    }

    pub fn df(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.fp0
        } else {
            raw_df(&self.kind, u)
        }
    }

    /// Analytic second derivative if one is known.
    pub fn d2f(&self, u: f64) -> Option<f64> {
        if u < 0.0 {
            return Some(0.0);
        }
        match &self.kind {
            Kind::Preset(Preset::Logistic { rate }) => Some(-2.0 * rate),
            Kind::Preset(Preset::Cubic) => Some(-6.0 * u),
            Kind::Preset(Preset::Sine) => Some(-PI * (PI * u).sin()),
            Kind::Custom(c) => c.d2f.as_ref().map(|g| g(u)),
        }
    }

    /// Centered second difference of `f` with step `h`.
    pub fn d2f_fd(&self, u: f64, h: f64) -> f64 {
        (self.f(u + h) - 2.0 * self.f(u) + self.f(u - h)) / (h * h)
    }

    /// `f(base + delta) - f(base)` evaluated without cancellation for the
    /// presets when both arguments are non-negative.
    pub fn increment(&self, base: f64, delta: f64) -> f64 {
        let top = base + delta;
        if base < 0.0 || top < 0.0 {
            return self.f(top) - self.f(base);
        }
        match self.kind {
            Kind::Preset(Preset::Logistic { rate }) => rate * delta * (1.0 - 2.0 * base - delta),
            Kind::Preset(Preset::Cubic) => {
                delta * (1.0 - (3.0 * base * base + 3.0 * base * delta + delta * delta))
            }
            Kind::Preset(Preset::Sine) => {
                2.0 * (PI * (2.0 * base + delta) / 2.0).cos() * (PI * delta / 2.0).sin() / PI
            }
            Kind::Custom(_) => self.f(top) - self.f(base),
        }
    }

    /// `eta_m(t)` with the default relative tolerance.
    pub fn eta(&self, m: f64, t: f64) -> Result<f64> {
        self.eta_with_tol(m, t, 1e-10)
    }

    /// Solution of `eta' = f(eta)`, `eta(0) = m`, at time `t` (either sign).
    pub fn eta_with_tol(&self, m: f64, t: f64, rtol: f64) -> Result<f64> {
        Ok(self.eta_many_with_tol(m, &[t], rtol)?[0])
    }

    pub fn eta_many(&self, m: f64, ts: &[f64]) -> Result<Vec<f64>> {
        self.eta_many_with_tol(m, ts, 1e-10)
    }

    /// `eta_m` at each of `ts`, in input order.
    pub fn eta_many_with_tol(&self, m: f64, ts: &[f64], rtol: f64) -> Result<Vec<f64>> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Domain(format!("eta needs m in (0,1), got {m}")));
        }
        if !(rtol > 0.0) {
            return Err(Error::Domain(format!("tolerance must be positive, got {rtol}")));
        }
        let opts = ode::Options { rtol, atol: rtol * 1e-6, ..Default::default() };
        let rhs = |_: f64, y: &[f64; 1]| [self.f(y[0])];
        let mut out = vec![0.0; ts.len()];

        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
        let split = order.partition_point(|&i| ts[i] < 0.0);
        let (neg, pos) = order.split_at(split);

        for (idx, dir) in [(pos.to_vec(), 1.0), (neg.iter().rev().copied().collect::<Vec<_>>(), -1.0)]
        {
            let mut t = 0.0;
            let mut y = [m];
            for i in idx {
                let target = ts[i];
                if !target.is_finite() {
                    return Err(Error::Domain(format!("non-finite time {target}")));
                }
                debug_assert!((target - t) * dir >= 0.0);
                let (tn, yn) =
                    ode::integrate(rhs, t, y, target, &opts, |_| ControlFlow::Continue(()))?;
                t = tn;
                y = yn;
                out[i] = y[0];
            }
        }
        Ok(out)
    }
}

fn raw_f(kind: &Kind, u: f64) -> f64 {
    match kind {
        Kind::Preset(Preset::Logistic { rate }) => rate * u * (1.0 - u),
        Kind::Preset(Preset::Cubic) => u * (1.0 - u * u),
        // reflect so values near u = 1 keep full relative precision
        Kind::Preset(Preset::Sine) if u > 0.5 => (PI * (1.0 - u)).sin() / PI,
        Kind::Preset(Preset::Sine) => (PI * u).sin() / PI,
        Kind::Custom(c) => (c.f)(u),
    }
}

fn raw_df(kind: &Kind, u: f64) -> f64 {
    match kind {
        Kind::Preset(Preset::Logistic { rate }) => rate * (1.0 - 2.0 * u),
        Kind::Preset(Preset::Cubic) => 1.0 - 3.0 * u * u,
        Kind::Preset(Preset::Sine) if u > 0.5 => -(PI * (1.0 - u)).cos(),
        Kind::Preset(Preset::Sine) => (PI * u).cos(),
        Kind::Custom(c) => (c.df)(u),
    }
}

/// Default tolerance for equality checks.
pub const EQ_TOL: f64 = 1e-9;

/// Checks the KPP hypotheses on a uniform sample of `samples` interior points.
pub fn validate_kpp(r: &Reaction, samples: usize) -> Result<VerificationReport> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let us: Vec<f64> = (1..=samples).map(|i| i as f64 / (samples + 1) as f64).collect();
    for &u in us.iter().chain([0.0, 1.0].iter()) {
        if !r.f(u).is_finite() || !r.df(u).is_finite() {
            return Err(Error::InvalidReaction(format!("non-finite value at u = {u}")));
        }
    }
    let mut rep = VerificationReport::new(format!("validate-kpp:{}", r.name()));
    rep.push(Check::le("f-at-0", r.f(0.0).abs(), EQ_TOL, "kpp-hypotheses"));
    rep.push(Check::le("f-at-1", r.f(1.0).abs(), EQ_TOL, "kpp-hypotheses"));
    rep.push(Check::gt("fp0-positive", r.fp0(), 0.0, "kpp-hypotheses"));
    rep.push(Check::lt("fp1-negative", r.fp1(), 0.0, "kpp-hypotheses"));
    let min_f = us.iter().map(|&u| r.f(u)).fold(f64::INFINITY, f64::min);
    rep.push(Check::gt("f-positive-inside", min_f, 0.0, "kpp-hypotheses"));
    let max_excess = us.iter().map(|&u| r.df(u) - r.fp0()).fold(f64::NEG_INFINITY, f64::max);
    rep.push(Check::le("df-below-fp0", max_excess, EQ_TOL, "kpp-hypotheses"));
    Ok(rep)
}

/// Tolerance used for concavity when `f''` comes from finite differences.
pub const FD_CONCAVITY_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-5;

/// Checks `f'' <= 0` on `samples` uniform points of `[0, 1]`.
pub fn validate_concavity(r: &Reaction, samples: usize) -> Result<VerificationReport> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let analytic = r.d2f(0.5).is_some();
    let lo = 2.0 * FD_STEP;
    let hi = 1.0 - 2.0 * FD_STEP;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..samples {
        let s = i as f64 / (samples - 1) as f64;
        let value = if analytic {
            r.d2f(s).unwrap_or(f64::NAN)
        } else {
            let u = lo + (hi - lo) * s;
            let a = r.d2f_fd(u, FD_STEP);
            let b = r.d2f_fd(u, 2.0 * FD_STEP);
            let scale = 1.0 + a.abs().max(b.abs());
            if !a.is_finite() || (a - b).abs() > 1e-3 * scale {
                return Err(Error::Unsupported(format!(
                    "no second derivative and f is not smooth near u = {u}"
                )));
            }
            a
        };
        if !value.is_finite() {
            return Err(Error::InvalidReaction(format!("non-finite f'' at u = {s}")));
        }
        worst = worst.max(value);
    }
    let tol = if analytic { EQ_TOL } else { FD_CONCAVITY_TOL };
    let mut rep = VerificationReport::new(format!("validate-concavity:{}", r.name()));
    rep.push(Check::le("d2f-nonpositive", worst, tol, "concavity-hypothesis"));
    Ok(rep)
}
