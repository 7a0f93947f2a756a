//! Crank–Nicolson diffusion with an explicit midpoint source.
//!
//! With `A` the three-point Laplacian (Dirichlet at node 0, reflecting ghost
//! node past `nx`) and `M = I - dt/2 A`, one step from `t` reads
//!
//! ```text
//! M u*      = u^n + dt/2 S(t, u^n)                    u*_0      = b(t + dt/2)
//! M u^{n+1} = (I + dt/2 A) u^n + dt S(t + dt/2, u*)   u^{n+1}_0 = b(t + dt)
//! ```
//!
//! The first [`RANNACHER_STEPS`] steps are each replaced by two implicit
//! Euler half steps with the same matrix, which damps the undamped
//! high-frequency modes that Crank–Nicolson leaves behind on rough data.
//! Step `k` always starts at `t_ref + k dt`, so a run restarted from a saved
//! state at step `k` reproduces the uninterrupted run bit for bit.

use crate::error::{Error, Result};
use crate::numerics::tridiag::Tridiagonal;
use crate::reaction::Reaction;

use super::grid::{Field, Grid, Trajectory};

pub const RANNACHER_STEPS: u64 = 2;

/// Right-hand side and boundary data of `u_t = u_xx + S(x, t, u)`.
pub trait Problem: Sync {
    /// Dirichlet value at `x = 0`.
    fn boundary(&self, _t: f64) -> f64 {
        0.0
    }

    /// Writes `S(x_i, t, u_i)` for every node into `out`.
    fn source(&self, t: f64, x: &[f64], u: &[f64], out: &mut [f64]);
}

/// `S = f(u)`.
pub struct Kpp<'a>(pub &'a Reaction);

impl Problem for Kpp<'_> {
    fn source(&self, _t: f64, _x: &[f64], u: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(u) {
            *o = self.0.f(v);
        }
    }
}

/// `S = rate * u`.
pub struct Linear {
    pub rate: f64,
}

impl Problem for Linear {
    fn source(&self, _t: f64, _x: &[f64], u: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(u) {
            *o = self.rate * v;
        }
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    fn boundary(&self, t: f64) -> f64 {
        (**self).boundary(t)
    }

    fn source(&self, t: f64, x: &[f64], u: &[f64], out: &mut [f64]) {
        (**self).source(t, x, u, out)
    }
}

/// One-sided second-order `u_x(0)`.
pub fn beta(u: &[f64], dx: f64) -> f64 {
    (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
}

/// A running integration: grid, factored matrix, state and step counter.
pub struct Integration<P: Problem> {
    grid: Grid,
    problem: P,
    lu: Tridiagonal,
    r: f64,
    x: Vec<f64>,
    t_ref: f64,
    k: u64,
    u: Vec<f64>,
    s: Vec<f64>,
    rhs: Vec<f64>,
    star: Vec<f64>,
}

impl<P: Problem> Integration<P> {
    /// Starts at `u0.t` with step counter 0.
    pub fn new(problem: P, grid: &Grid, u0: &Field) -> Result<Self> {
        Self::resume(problem, grid, u0.t, 0, u0.u.clone())
    }

    /// Continues from a state saved after `k` steps of a run that started at
    /// `t_ref`.
    pub fn resume(problem: P, grid: &Grid, t_ref: f64, k: u64, u: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if u.len() != grid.nx + 1 {
            return Err(Error::Domain(format!(
                "field has {} values, grid needs {}",
                u.len(),
                grid.nx + 1
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: t_ref + k as f64 * grid.dt, node: i });
        }
        let n = grid.nx;
        let dx = grid.dx();
        let r = grid.dt / (2.0 * dx * dx);
        let mut lower = vec![-r; n];
        let diag = vec![1.0 + 2.0 * r; n];
        let upper = vec![-r; n];
        lower[n - 1] = -2.0 * r;
        let lu = Tridiagonal::factor(&lower, &diag, &upper);
        Ok(Self {
            grid: *grid,
            problem,
            lu,
            r,
            x: grid.nodes(),
            t_ref,
            k,
            u,
            s: vec![0.0; n + 1],
            rhs: vec![0.0; n],
            star: vec![0.0; n + 1],
        })
    }

    pub fn t(&self) -> f64 {
        self.t_ref + self.k as f64 * self.grid.dt
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn field(&self) -> Field {
        Field::new(self.t(), self.u.clone())
    }

    pub fn beta(&self) -> f64 {
        beta(&self.u, self.grid.dx())
    }

    pub fn kappa(&self) -> f64 {
        self.u[self.grid.nx]
    }

    /// Advances by one step of size `dt`.
    pub fn step(&mut self) -> Result<()> {
        let t = self.t();
        if self.k < RANNACHER_STEPS {
            let h = 0.5 * self.grid.dt;
            self.euler_half(t)?;
            self.euler_half(t + h)?;
        } else {
            self.midpoint(t)?;
        }
        self.k += 1;
        Ok(())
    }

    fn check(&self, t: f64) -> Result<()> {
        match self.u.iter().position(|v| !v.is_finite()) {
            Some(node) => Err(Error::BlowUp { t, node }),
            None => Ok(()),
        }
    }

    fn euler_half(&mut self, t: f64) -> Result<()> {
        let h = 0.5 * self.grid.dt;
        let n = self.grid.nx;
        self.problem.source(t, &self.x, &self.u, &mut self.s);
        for j in 0..n {
            self.rhs[j] = self.u[j + 1] + h * self.s[j + 1];
        }
        let b = self.problem.boundary(t + h);
        self.rhs[0] += self.r * b;
        self.lu.solve_in_place(&mut self.rhs);
        self.u[0] = b;
        self.u[1..].copy_from_slice(&self.rhs);
        self.check(t + h)
    }

    fn midpoint(&mut self, t: f64) -> Result<()> {
        let dt = self.grid.dt;
        let n = self.grid.nx;
        let r = self.r;

        self.problem.source(t, &self.x, &self.u, &mut self.s);
        for j in 0..n {
            self.rhs[j] = self.u[j + 1] + 0.5 * dt * self.s[j + 1];
        }
        let b_half = self.problem.boundary(t + 0.5 * dt);
        self.rhs[0] += r * b_half;
        self.lu.solve_in_place(&mut self.rhs);
        self.star[0] = b_half;
        self.star[1..].copy_from_slice(&self.rhs);
        if let Some(node) = self.star.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: t + 0.5 * dt, node });
        }

        self.problem.source(t + 0.5 * dt, &self.x, &self.star, &mut self.s);
        let u = &self.u;
        for i in 1..n {
            self.rhs[i - 1] = u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + dt * self.s[i];
        }
        self.rhs[n - 1] = u[n] + 2.0 * r * (u[n - 1] - u[n]) + dt * self.s[n];
        let b_new = self.problem.boundary(t + dt);
        self.rhs[0] += r * b_new;
        self.lu.solve_in_place(&mut self.rhs);
        self.u[0] = b_new;
        self.u[1..].copy_from_slice(&self.rhs);
        self.check(t + dt)
    }
}

/// One step from `u`, taken as a step with index `RANNACHER_STEPS` (plain
/// midpoint scheme).
pub fn step<P: Problem>(problem: P, grid: &Grid, u: &Field) -> Result<Field> {
    let mut run = Integration::resume(problem, grid, u.t - RANNACHER_STEPS as f64 * grid.dt, RANNACHER_STEPS, u.u.clone())?;
    run.step()?;
    Ok(run.field())
}

/// Integrates from `u0` to `t_end`, returning snapshots at `out_times`
/// (linear in time between steps) and per-step diagnostics.
pub fn solve<P: Problem>(
    problem: P,
    grid: &Grid,
    u0: &Field,
    t_end: f64,
    out_times: &[f64],
) -> Result<Trajectory> {
    let mut run = Integration::new(problem, grid, u0)?;
    run_to(&mut run, t_end, out_times)
}

/// Continues `run` up to `t_end`; see [`solve`].
pub fn run_to<P: Problem>(
    run: &mut Integration<P>,
    t_end: f64,
    out_times: &[f64],
) -> Result<Trajectory> {
    let t0 = run.t();
    let dt = run.grid.dt;
    if !(t_end >= t0) {
        return Err(Error::Domain(format!("t_end = {t_end} precedes the start time {t0}")));
    }
    let eps = 1e-9 * dt;
    if out_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("output times must be strictly increasing".into()));
    }
    if let Some(&bad) = out_times.iter().find(|&&s| s < t0 - eps || s > t_end + eps) {
        return Err(Error::Domain(format!("output time {bad} outside [{t0}, {t_end}]")));
    }
    let dx = run.grid.dx();
    let mut traj = Trajectory::default();
    traj.diag_t.push(t0);
    traj.beta.push(run.beta());
    traj.kappa.push(run.kappa());

    let mut next = 0;
    while next < out_times.len() && out_times[next] <= t0 + eps {
        traj.snapshots.push(Field::new(out_times[next], run.u.clone()));
        next += 1;
    }
    let mut prev = run.u.clone();
    while run.t() < t_end - eps {
        let t_prev = run.t();
        prev.copy_from_slice(&run.u);
        run.step()?;
        let t_now = run.t();
        traj.diag_t.push(t_now);
        traj.beta.push(beta(&run.u, dx));
        traj.kappa.push(run.kappa());
        while next < out_times.len() && out_times[next] <= t_now + eps {
            let s = out_times[next];
            let w = (s - t_prev) / dt;
            let u = if w >= 1.0 - 1e-9 {
                run.u.clone()
            } else if w <= 1e-9 {
                prev.clone()
            } else {
                prev.iter().zip(&run.u).map(|(a, b)| (1.0 - w) * a + w * b).collect()
            };
            traj.snapshots.push(Field::new(s, u));
            next += 1;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phaseplane::stationary;

    #[test]
    fn zero_is_preserved() {
        let g = Grid::new(20.0, 200, 0.05).unwrap();
        let r = Reaction::logistic();
        let u0 = Field::zeros(&g, 0.0);
        let tr = solve(Kpp(&r), &g, &u0, 3.0, &[0.0, 1.0, 3.0]).unwrap();
        assert!(tr.snapshots.iter().all(|s| s.u.iter().all(|&v| v == 0.0)));
        assert_eq!(tr.snapshots.len(), 3);
        assert_eq!(tr.diag_t.len(), 61);
    }

    #[test]
    fn stationary_profile_error_drops_under_refinement() {
        let r = Reaction::logistic();
        let v = stationary(&r, 40.0, 8000).unwrap();
        let err = |nx: usize, dt: f64| {
            let g = Grid::new(20.0, nx, dt).unwrap();
            let vs = v.sample(g.dx(), g.nx);
            let tr = solve(Kpp(&r), &g, &Field::new(0.0, vs.clone()), 1.0, &[1.0]).unwrap();
            tr.snapshots[0].sup_distance(&vs)
        };
        let coarse = err(100, 0.1);
        let fine = err(200, 0.05);
        assert!(coarse / fine >= 3.5, "{coarse} {fine}");
        let one = step(Kpp(&r), &Grid::new(20.0, 200, 0.05).unwrap(), &Field::new(0.0, v.sample(0.1, 200)))
            .unwrap();
        assert!(one.sup_distance(&v.sample(0.1, 200)) < 1e-4);
    }

    #[test]
    fn snapshots_interpolate_in_time() {
        let g = Grid::new(10.0, 100, 0.1).unwrap();
        let u0 = Field::new(0.0, g.sample(|x| (x / 2.0).min(1.0)));
        let lin = Linear { rate: 0.3 };
        let tr = solve(&lin, &g, &u0, 1.0, &[0.35, 0.4, 1.0]).unwrap();
        let a = solve(&lin, &g, &u0, 0.3, &[0.3]).unwrap();
        let b = solve(&lin, &g, &u0, 0.4, &[0.4]).unwrap();
        for i in 0..=g.nx {
            let mid = 0.5 * (a.snapshots[0].u[i] + b.snapshots[0].u[i]);
            assert!((tr.snapshots[0].u[i] - mid).abs() < 1e-15);
            assert_eq!(tr.snapshots[1].u[i], b.snapshots[0].u[i]);
        }
        assert!(solve(&lin, &g, &u0, 1.0, &[2.0]).is_err());
    }

    #[test]
    fn resume_is_bitwise() {
        let g = Grid::new(20.0, 200, 0.05).unwrap();
        let r = Reaction::logistic();
        let u0 = Field::new(0.0, g.sample(|x| 0.2 * (x / 3.0).min(1.0)));
        let mut full = Integration::new(Kpp(&r), &g, &u0).unwrap();
        for _ in 0..40 {
            full.step().unwrap();
        }
        let mut first = Integration::new(Kpp(&r), &g, &u0).unwrap();
        for _ in 0..13 {
            first.step().unwrap();
        }
        let mut second = Integration::resume(Kpp(&r), &g, 0.0, first.k(), first.u().to_vec()).unwrap();
        for _ in 13..40 {
            second.step().unwrap();
        }
        assert_eq!(full.u(), second.u());
        assert_eq!(full.t(), second.t());
    }

    #[test]
    fn blow_up_is_reported() {
        let g = Grid::new(20.0, 200, 0.1).unwrap();
        let u0 = Field::new(0.0, g.sample(|x| x.min(1.0)));
        let res = solve(Linear { rate: 1e4 }, &g, &u0, 10.0, &[]);
        assert!(matches!(res, Err(Error::BlowUp { .. })));
    }
}
