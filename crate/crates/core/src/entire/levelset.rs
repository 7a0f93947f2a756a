//! Level-set tracking `xi_m(s)` with `u(xi_m(s), s) = m`, and the
//! recentered comparison against the plateau ODE.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfline::{discrete_derivatives, Trajectory};
use crate::harness::report::{trend_check, Check, Trend, VerificationReport};
use crate::numerics::interp;
use crate::reaction::Reaction;

/// Levels closer to 0 or 1 are dominated by interpolation noise.
pub const LEVEL_RANGE: (f64, f64) = (0.05, 0.95);

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelSample {
    pub s: f64,
    /// `None` when the snapshot stays below the level.
    pub xi: Option<f64>,
    /// Centered difference; needs the level at both neighbours.
    pub xi_prime: Option<f64>,
    pub ux: Option<f64>,
    pub ut: Option<f64>,
    /// `|u_x xi' + u_t|` at the level point.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSet {
    pub m: f64,
    pub dx: f64,
    pub samples: Vec<LevelSample>,
}

impl LevelSet {
    /// Samples with a centered derivative, in increasing `s`.
    pub fn resolvable(&self) -> impl Iterator<Item = &LevelSample> {
        self.samples.iter().filter(|p| p.xi_prime.is_some())
    }
}

/// First crossing of `m` from below, linearly interpolated.
fn crossing(u: &[f64], m: f64) -> Option<(usize, f64)> {
    let i = u.iter().position(|&v| v >= m)?;
    if i == 0 {
        return Some((0, 0.0));
    }
    let w = (m - u[i - 1]) / (u[i] - u[i - 1]);
    Some((i - 1, w))
}

pub fn level_set(traj: &Trajectory, dx: f64, r: &Reaction, m: f64) -> Result<LevelSet> {
    if !(m >= LEVEL_RANGE.0 && m <= LEVEL_RANGE.1) {
        return Err(Error::Domain(format!(
            "level {m} outside [{}, {}]",
            LEVEL_RANGE.0, LEVEL_RANGE.1
        )));
    }
    let d = discrete_derivatives(traj, dx, r);
    let mut samples: Vec<LevelSample> = traj
        .snapshots
        .iter()
        .zip(&d)
        .map(|(snap, d)| {
            let hit = crossing(&snap.u, m);
            let lerp = |v: &[f64]| hit.map(|(i, w)| (1.0 - w) * v[i] + w * v[(i + 1).min(v.len() - 1)]);
            LevelSample {
                s: snap.t,
                xi: hit.map(|(i, w)| (i as f64 + w) * dx),
                xi_prime: None,
                ux: lerp(&d.ux),
                ut: lerp(&d.ut),
                residual: None,
            }
        })
        .collect();
    for j in 1..samples.len().saturating_sub(1) {
        let (a, b) = (samples[j - 1], samples[j + 1]);
        if let (Some(xa), Some(xb)) = (a.xi, b.xi) {
            let p = &mut samples[j];
            let xp = (xb - xa) / (b.s - a.s);
            p.xi_prime = Some(xp);
            p.residual = Some((p.ux.unwrap() * xp + p.ut.unwrap()).abs());
        }
    }
    Ok(LevelSet { m, dx, samples })
}

/// Front receding backward in time, identity residual, and front speed of
/// growth against `f(m)`.
pub fn verify_level_set(ls: &LevelSet, r: &Reaction, ds: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("level-set:m={}", ls.m));
    let back: Vec<&LevelSample> = ls.resolvable().collect::<Vec<_>>().into_iter().rev().collect();
    let xi: Vec<f64> = back.iter().map(|p| p.xi.unwrap()).collect();
    let xp: Vec<f64> = back.iter().map(|p| p.xi_prime.unwrap()).collect();
    rep.push(trend_check("xi-grows-backward", &xi, Trend::Increasing, 0.0, "front-recedes"));
    let max_xp = xp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rep.push(if xp.is_empty() {
        Check::insufficient("xi-prime-negative", "front-recedes", "no resolvable level points")
    } else {
        Check::lt("xi-prime-negative", max_xp, 0.0, "front-recedes")
    });
    let speed: Vec<f64> = xp.iter().map(|v| v.abs()).collect();
    rep.push(trend_check("xi-speed-grows-backward", &speed, Trend::Increasing, 0.0, "front-recedes"));
    let res = back.iter().map(|p| p.residual.unwrap()).fold(0.0, f64::max);
    rep.push(Check::le("identity-residual", res, 5.0 * (ls.dx + ds), "level-set-identity"));
    match back.last() {
        Some(p) => {
            let fm = r.f(ls.m);
            let rel = (p.ut.unwrap() - fm).abs() / fm;
            rep.push(
                Check::le("front-ut-vs-f(m)", rel, 0.1, "front-growth-rate")
                    .with_note(format!("s = {}, u_t = {}", p.s, p.ut.unwrap())),
            );
        }
        None => rep.push(Check::insufficient("front-ut-vs-f(m)", "front-growth-rate", "no resolvable level points")),
    }
    rep
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RecenteredRow {
    pub s: f64,
    pub xi: f64,
    /// `sup |U(x + xi, t + s) - eta_m(t)|` over the window.
    pub sup_gap: f64,
    pub ut_front: f64,
    /// `|U(xi, s) - m|`.
    pub centre_gap: f64,
}

/// Sup-distance between the solution seen from the level point and the
/// plateau ODE, for each `s` in `s_list` whose window fits the data.
/// `window = (X, T)`.
pub fn recentered_limit(
    traj: &Trajectory,
    ls: &LevelSet,
    r: &Reaction,
    s_list: &[f64],
    window: (f64, f64),
) -> Result<(Vec<RecenteredRow>, VerificationReport)> {
    let (wx, wt) = window;
    if !(wx > 0.0 && wt >= 0.0) {
        return Err(Error::Domain("window needs X > 0 and T >= 0".into()));
    }
    let snaps = &traj.snapshots;
    let times: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let dx = ls.dx;
    let find = |t: f64| times.iter().position(|&v| (v - t).abs() < 1e-9);
    let offsets: Vec<f64> = {
        let k = (wx / dx).round() as i64;
        (-k..=k).map(|j| j as f64 * dx).collect()
    };
    let mut rows = Vec::new();
    for &s in s_list {
        let Some(j0) = find(s) else {
            return Err(Error::Domain(format!("no snapshot at s = {s}")));
        };
        let p = &ls.samples[j0];
        let (Some(xi), Some(ut)) = (p.xi, p.ut) else {
            return Err(Error::Domain(format!("level {} not attained at s = {s}", ls.m)));
        };
        if xi - wx < 0.0 {
            return Err(Error::Domain(format!("window leaves the half line at s = {s}")));
        }
        let x_end = dx * (snaps[j0].u.len() - 1) as f64;
        if xi + wx > x_end {
            return Err(Error::Domain(format!("window leaves the grid at s = {s}")));
        }
        let mut shifts = Vec::new();
        let mut eta_t = Vec::new();
        for (j, &t) in times.iter().enumerate() {
            if (t - s).abs() <= wt + 1e-9 {
                shifts.push(j);
                eta_t.push(t - s);
            }
        }
        if times[0] > s - wt + 1e-9 || *times.last().unwrap() < s + wt - 1e-9 {
            return Err(Error::Domain(format!("time window leaves the data at s = {s}")));
        }
        let eta = r.eta_many_with_tol(ls.m, &eta_t, 1e-12)?;
        let mut sup: f64 = 0.0;
        for (&j, &e) in shifts.iter().zip(&eta) {
            let u = &snaps[j].u;
            for &o in &offsets {
                sup = sup.max((interp::linear_uniform(0.0, dx, u, xi + o) - e).abs());
            }
        }
        let centre = (interp::linear_uniform(0.0, dx, &snaps[j0].u, xi) - ls.m).abs();
        rows.push(RecenteredRow { s, xi, sup_gap: sup, ut_front: ut, centre_gap: centre });
    }

    let mut rep = VerificationReport::new(format!("recentered:m={}", ls.m));
    let mut back = rows.clone();
    back.sort_by(|a, b| b.s.total_cmp(&a.s));
    let gaps: Vec<f64> = back.iter().map(|r| r.sup_gap).collect();
    rep.push(trend_check("window-sup-shrinks-backward", &gaps, Trend::Decreasing, 0.0, "recentered-limit"));
    let centre = rows.iter().map(|r| r.centre_gap).fold(0.0, f64::max);
    rep.push(Check::lt("centre-on-level", centre, 1e-8, "level-definition"));
    let fm = r.f(ls.m);
    let ut_err: Vec<f64> = back.iter().map(|r| (r.ut_front - fm).abs()).collect();
    rep.push(trend_check("front-ut-approaches-f(m)", &ut_err, Trend::Decreasing, 0.0, "front-growth-rate").optional());
    Ok((rows, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfline::Field;
    use crate::phaseplane::stationary;

    #[test]
    fn stationary_level_is_fixed() {
        let r = Reaction::logistic();
        let v = stationary(&r, 40.0, 4000).unwrap();
        let u = v.sample(0.05, 800);
        let traj = Trajectory {
            snapshots: (0..5).map(|k| Field::new(k as f64 * 0.1, u.clone())).collect(),
            ..Default::default()
        };
        let ls = level_set(&traj, 0.05, &r, 0.5).unwrap();
        let xi0 = ls.samples[0].xi.unwrap();
        assert!(ls.samples.iter().all(|p| (p.xi.unwrap() - xi0).abs() < 1e-14));
        assert!(ls.resolvable().all(|p| p.xi_prime.unwrap() == 0.0));
        assert_eq!(ls.resolvable().count(), 3);
        // V = 1 - 1.5 sech^2(x/2 + a), cosh a = sqrt(1.5)
        let exact = 2.0 * (3f64.sqrt().acosh() - 1.5f64.sqrt().acosh());
        assert!((xi0 - exact).abs() < 2e-3, "{xi0} vs {exact}");
        assert!(level_set(&traj, 0.05, &r, 0.99).is_err());
    }

    #[test]
    fn unattained_level_is_recorded() {
        let r = Reaction::logistic();
        let low = vec![0.0, 0.1, 0.2, 0.3, 0.3];
        let high = vec![0.0, 0.3, 0.6, 0.8, 0.8];
        let traj = Trajectory {
            snapshots: vec![Field::new(0.0, low.clone()), Field::new(1.0, high.clone()), Field::new(2.0, high)],
            ..Default::default()
        };
        let ls = level_set(&traj, 1.0, &r, 0.5).unwrap();
        assert!(ls.samples[0].xi.is_none());
        assert!((ls.samples[1].xi.unwrap() - (1.0 + 2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(ls.resolvable().count(), 0);
    }
}
