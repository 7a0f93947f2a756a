use std::ops::ControlFlow;

use serde::Serialize;

use super::eigen::{eigenvalues, is_critical, lam_c};
use crate::error::{Error, Result};
use crate::numerics::{aitken, interp, linear_fit, ode};
use crate::reaction::Reaction;

#[derive(Debug, Clone, Copy)]
pub struct WaveOptions {
    /// Output grid covers `[-z_span, z_span]` (clipped to the solved range).
    pub z_span: f64,
    pub nz: usize,
    /// Distance from `(1, 0)` of the shooting start point.
    pub eps: f64,
    /// Shooting stops once the profile drops below this value.
    pub tail_floor: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        Self {
            z_span: 80.0,
            nz: 16_001,
            eps: 1e-8,
            tail_floor: 1e-10,
            rtol: 1e-12,
            atol: 1e-22,
        }
    }
}

/// Traveling-wave profile on a uniform grid, normalized so that the
/// interpolated profile equals 1/2 at `z = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct WaveProfile {
    pub c: f64,
    pub lam_c: f64,
    pub lam1_minus: f64,
    /// Minimal-speed wave; its tail carries an extra linear factor.
    pub critical: bool,
    pub z0: f64,
    pub dz: f64,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

pub fn wave(r: &Reaction, c: f64, z_span: f64, nz: usize) -> Result<WaveProfile> {
    wave_with(r, c, &WaveOptions { z_span, nz, ..Default::default() })
}

pub fn wave_with(r: &Reaction, c: f64, opts: &WaveOptions) -> Result<WaveProfile> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("wave speed must be positive, got {c}")));
    }
    if !(opts.z_span > 0.0) || opts.nz < 3 {
        return Err(Error::Domain("wave grid needs z_span > 0 and nz >= 3".into()));
    }
    let ev = eigenvalues(r, c);
    let l1 = ev.lam1_minus;
    let norm = (1.0 + l1 * l1).sqrt();
    let start = [1.0 - opts.eps / norm, -opts.eps * l1 / norm];

    let rhs = |_: f64, y: &[f64; 2]| [y[1], c * y[1] - r.f(y[0])];
    let ode_opts =
        ode::Options { rtol: opts.rtol, atol: opts.atol, h_max: 0.05, ..Default::default() };

    let mut zs = vec![0.0];
    let mut qs = vec![start[0]];
    let mut ps = vec![start[1]];
    let mut failure: Option<(f64, String)> = None;
    let mut reached_floor = false;
    ode::integrate(rhs, 0.0, start, -1e5, &ode_opts, |s| {
        let (q, p) = (s.y[0], s.y[1]);
        if !(q > 0.0 && q < 1.0 && p >= 0.0) {
            failure = Some((s.t, format!("orbit left the strip at q = {q:e}, p = {p:e}")));
            return ControlFlow::Break(());
        }
        zs.push(s.t);
        qs.push(q);
        ps.push(p);
        if q < opts.tail_floor {
            reached_floor = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    if let Some((z, reason)) = failure {
        return Err(Error::ShootingFailure { z, reason });
    }
    if !reached_floor {
        return Err(Error::ShootingFailure {
            z: *zs.last().unwrap(),
            reason: "tail floor not reached".into(),
        });
    }
    let lam = lam_c(r, c)?;

    zs.reverse();
    qs.reverse();
    ps.reverse();
    let dps: Vec<f64> = qs.iter().zip(&ps).map(|(q, p)| c * p - r.f(*q)).collect();

    let k = qs.partition_point(|&q| q < 0.5);
    if k == 0 || k == qs.len() {
        return Err(Error::ShootingFailure { z: 0.0, reason: "no half level crossing".into() });
    }
    let i = k - 1;
    let (mut lo, mut hi) = (zs[i], zs[i + 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = interp::hermite(zs[i], zs[i + 1], qs[i], qs[i + 1], ps[i], ps[i + 1], mid);
        if v < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
            break;
        }
    }
    let shift = 0.5 * (lo + hi);
    for z in &mut zs {
        *z -= shift;
    }

    let dz = 2.0 * opts.z_span / (opts.nz - 1) as f64;
    let first = ((zs[0] + opts.z_span) / dz).ceil().max(0.0) as usize;
    let last = (((zs[zs.len() - 1] + opts.z_span) / dz).floor() as usize).min(opts.nz - 1);
    if last <= first + 2 {
        return Err(Error::Domain("solved range does not cover the output grid".into()));
    }
    let z0 = -opts.z_span + first as f64 * dz;
    let mut phi = Vec::with_capacity(last - first + 1);
    let mut dphi = Vec::with_capacity(last - first + 1);
    for g in first..=last {
        let z = -opts.z_span + g as f64 * dz;
        let j = interp::bracket(&zs, z);
        phi.push(interp::hermite(zs[j], zs[j + 1], qs[j], qs[j + 1], ps[j], ps[j + 1], z));
        dphi.push(interp::hermite(zs[j], zs[j + 1], ps[j], ps[j + 1], dps[j], dps[j + 1], z));
    }
    if let Some(w) = phi.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::ShootingFailure {
            z: z0 + w as f64 * dz,
            reason: "profile is not strictly increasing".into(),
        });
    }
    let grid: Vec<f64> = (0..phi.len()).map(|i| z0 + i as f64 * dz).collect();
    interp::limit_monotone_slopes(&grid, &phi, &mut dphi);

    let w = WaveProfile { c, lam_c: lam, lam1_minus: l1, critical: is_critical(r, c), z0, dz, phi, dphi };
    if w.phi[0] >= 0.01 || *w.phi.last().unwrap() <= 0.99 {
        return Err(Error::Domain(format!(
            "grid [{}, {}] does not reach both plateaus; enlarge z_span",
            w.z_min(),
            w.z_max()
        )));
    }
    Ok(w)
}

impl WaveProfile {
    pub fn z_min(&self) -> f64 {
        self.z0
    }

    pub fn z_max(&self) -> f64 {
        self.z0 + (self.phi.len() - 1) as f64 * self.dz
    }

    pub fn z(&self) -> Vec<f64> {
        (0..self.phi.len()).map(|i| self.z0 + i as f64 * self.dz).collect()
    }

    fn tail_weight(&self, z: f64) -> f64 {
        if self.critical {
            1.0 + z.abs()
        } else {
            1.0
        }
    }

    /// Profile value anywhere on the line, with asymptotic extensions
    /// outside the grid.
    pub fn value(&self, z: f64) -> f64 {
        let zmin = self.z_min();
        let zmax = self.z_max();
        if z < zmin {
            let w = self.tail_weight(z) / self.tail_weight(zmin);
            return self.phi[0] * w * (self.lam_c * (z - zmin)).exp();
        }
        let n = self.phi.len() - 1;
        if z > zmax {
            return 1.0 - (1.0 - self.phi[n]) * (self.lam1_minus * (z - zmax)).exp();
        }
        let i = (((z - zmin) / self.dz) as usize).min(n - 1);
        let za = zmin + i as f64 * self.dz;
        interp::hermite(
            za,
            za + self.dz,
            self.phi[i],
            self.phi[i + 1],
            self.dphi[i],
            self.dphi[i + 1],
            z,
        )
    }

    pub fn slope(&self, z: f64) -> f64 {
        let zmin = self.z_min();
        let zmax = self.z_max();
        if z < zmin {
            let v = self.value(z);
            let extra = if self.critical { 1.0 / (1.0 + z.abs()) } else { 0.0 };
            return v * (self.lam_c - extra);
        }
        let n = self.phi.len() - 1;
        if z > zmax {
            return -self.lam1_minus
                * (1.0 - self.phi[n])
                * (self.lam1_minus * (z - zmax)).exp();
        }
        let i = (((z - zmin) / self.dz) as usize).min(n - 1);
        let za = zmin + i as f64 * self.dz;
        interp::hermite_slope(
            za,
            za + self.dz,
            self.phi[i],
            self.phi[i + 1],
            self.dphi[i],
            self.dphi[i + 1],
            z,
        )
    }

    /// Largest `|phi'' - c phi' + f(phi)|` over interior nodes, with `phi''`
    /// from second differences of the stored values.
    pub fn residual(&self, r: &Reaction) -> f64 {
        let h2 = self.dz * self.dz;
        (1..self.phi.len() - 1)
            .map(|i| {
                let d2 = (self.phi[i + 1] - 2.0 * self.phi[i] + self.phi[i - 1]) / h2;
                (d2 - self.c * self.dphi[i] + r.f(self.phi[i])).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup_{z <= 0} phi(z) / (weight(z) e^{lam_c z})` over the samples,
    /// raised to the extrapolated `z -> -inf` limit when that is larger.
    pub(crate) fn sup_ratio(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let ratio = |i: usize| {
            let z = self.z0 + i as f64 * self.dz;
            self.phi[i] / (weight(z) * (self.lam_c * z).exp())
        };
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.phi.len() {
            if self.z0 + i as f64 * self.dz > 0.0 {
                break;
            }
            best = best.max(ratio(i));
        }
        let stride = (1.0 / self.dz).ceil() as usize;
        if 2 * stride < self.phi.len() && self.z0 + (2 * stride) as f64 * self.dz <= 0.0 {
            if let Some(lim) = aitken(ratio(2 * stride), ratio(stride), ratio(0)) {
                best = best.max(lim);
            }
        }
        best
    }
}

/// Fitted tail exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// Slope of `ln phi` against `z`.
    pub lambda_est: f64,
    /// For the minimal-speed wave, slope of `ln phi - ln|z|`.
    pub c0_correction: Option<f64>,
}

const FIT_LO: f64 = 1e-6;
const FIT_HI: f64 = 1e-3;

/// Least-squares decay exponents over the window `phi in [1e-6, 1e-3]`.
pub fn tail_fit(w: &WaveProfile) -> Result<TailFit> {
    if w.phi[0] > FIT_LO {
        return Err(Error::TailTooShort { min_phi: w.phi[0], needed: FIT_LO });
    }
    let mut zs = Vec::new();
    let mut ln = Vec::new();
    let mut corrected = Vec::new();
    for (i, &p) in w.phi.iter().enumerate() {
        if p > FIT_HI {
            break;
        }
        if p >= FIT_LO {
            let z = w.z0 + i as f64 * w.dz;
            zs.push(z);
            ln.push(p.ln());
            corrected.push(p.ln() - z.abs().ln());
        }
    }
    if zs.len() < 3 || zs.iter().any(|&z| z >= 0.0) {
        return Err(Error::TailTooShort { min_phi: w.phi[0], needed: FIT_LO });
    }
    let (lambda_est, _) = linear_fit(&zs, &ln).ok_or(Error::TailTooShort {
        min_phi: w.phi[0],
        needed: FIT_LO,
    })?;
    let c0_correction = if w.critical { linear_fit(&zs, &corrected).map(|(s, _)| s) } else { None };
    Ok(TailFit { lambda_est, c0_correction })
}

/// Tail amplitude `A_c` with `phi(z) <= A_c e^{lam_c z}` for `z <= 0`.
pub fn amplitude_ac(w: &WaveProfile) -> Result<f64> {
    if w.critical {
        return Err(Error::Domain(
            "minimal-speed wave has no pure exponential bound; use the weighted amplitude".into(),
        ));
    }
    Ok(w.sup_ratio(|_| 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: f64 = 0.408_248_290_463_863; // 1/sqrt(6)

    fn exact(z: f64) -> f64 {
        let s = (2f64.sqrt() - 1.0) * (-z * K).exp();
        (1.0 + s).powi(-2)
    }

    #[test]
    fn closed_form_solves_profile_equation() {
        let c = 5.0 / 6f64.sqrt();
        for i in 0..=400 {
            let z = -20.0 + 0.1 * i as f64;
            let s = (2f64.sqrt() - 1.0) * (-z * K).exp();
            let phi = (1.0 + s).powi(-2);
            let d1 = 2.0 * K * s * (1.0 + s).powi(-3);
            let d2 = 2.0 * K * K * s * (2.0 * s - 1.0) * (1.0 + s).powi(-4);
            assert!((d2 - c * d1 + phi * (1.0 - phi)).abs() < 1e-12, "{z}");
        }
    }

    #[test]
    fn exact_wave_recovered() {
        let r = Reaction::logistic();
        let c = 5.0 / 6f64.sqrt();
        let w = wave_with(&r, c, &WaveOptions::default()).unwrap();
        assert!((w.value(0.0) - 0.5).abs() < 1e-12);
        let mut err: f64 = 0.0;
        for i in 0..=4000 {
            let z = -20.0 + 0.01 * i as f64;
            err = err.max((w.value(z) - exact(z)).abs());
        }
        assert!(err < 1e-4, "{err}");
        let a = amplitude_ac(&w).unwrap();
        assert!((a - (2f64.sqrt() + 1.0).powi(2)).abs() < 1e-3, "{a}");
        let fit = tail_fit(&w).unwrap();
        assert!((fit.lambda_est / (2.0 / 6f64.sqrt()) - 1.0).abs() < 0.02);
        assert!(fit.c0_correction.is_none());
    }

    #[test]
    fn profile_invariants() {
        let r = Reaction::logistic();
        let w = wave_with(&r, 2.5, &WaveOptions::default()).unwrap();
        assert!(w.phi.windows(2).all(|p| p[1] > p[0]));
        assert!(w.residual(&r) < 1e-6, "{}", w.residual(&r));
        let fit = tail_fit(&w).unwrap();
        assert!((fit.lambda_est / 0.5 - 1.0).abs() < 0.02, "{fit:?}");
        let a = amplitude_ac(&w).unwrap();
        for (i, p) in w.phi.iter().enumerate() {
            let z = w.z0 + i as f64 * w.dz;
            if z <= 0.0 {
                assert!(p - a * (w.lam_c * z).exp() <= 1e-12);
            }
        }
        let a3 = amplitude_ac(&wave_with(&r, 3.0, &WaveOptions::default()).unwrap()).unwrap();
        assert!(a3.is_finite() && a3 >= 0.5);
    }

    #[test]
    fn critical_wave_tail() {
        let r = Reaction::logistic();
        let w = wave_with(&r, 2.0, &WaveOptions::default()).unwrap();
        assert!(w.critical);
        let fit = tail_fit(&w).unwrap();
        let corr = fit.c0_correction.unwrap();
        assert!((corr - 1.0).abs() < 0.05, "{corr}");
        assert!(amplitude_ac(&w).is_err());
    }

    #[test]
    fn extensions_are_continuous() {
        let r = Reaction::logistic();
        let w = wave_with(&r, 2.5, &WaveOptions { z_span: 30.0, nz: 6001, ..Default::default() })
            .unwrap();
        for z in [w.z_min(), w.z_max()] {
            let (a, b) = (w.value(z - 1e-9), w.value(z + 1e-9));
            assert!((a - b).abs() < 1e-12 * a.max(1e-300) + 1e-15);
            let (a, b) = (w.slope(z - 1e-9), w.slope(z + 1e-9));
            assert!((a - b).abs() <= 1e-4 * a.abs() + 1e-14, "{z}: {a} {b}");
        }
        assert!(w.value(-200.0) > 0.0 && w.value(200.0) <= 1.0);
    }

    #[test]
    fn slow_speed_fails() {
        let r = Reaction::logistic();
        assert!(matches!(
            wave_with(&r, 1.5, &WaveOptions::default()),
            Err(Error::ShootingFailure { .. })
        ));
    }
}
