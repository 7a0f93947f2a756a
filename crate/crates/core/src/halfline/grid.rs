use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_i = i L / nx`, `i = 0..=nx`, and a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    pub l: f64,
    pub nx: usize,
    pub dt: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { l: 200.0, nx: 4000, dt: 0.025 }
    }
}

impl Grid {
    pub fn new(l: f64, nx: usize, dt: f64) -> Result<Self> {
        let g = Self { l, nx, dt };
        g.validate()?;
        Ok(g)
    }

    /// Grid with spacing `dx` (rounded to a whole number of cells).
    pub fn with_spacing(l: f64, dx: f64, dt: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::Domain(format!("dx must be positive, got {dx}")));
        }
        Self::new(l, (l / dx).round() as usize, dt)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::Domain(format!("L must be positive, got {}", self.l)));
        }
        if self.nx < 64 {
            return Err(Error::Domain(format!("nx must be at least 64, got {}", self.nx)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt > self.dx() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "dt = {} exceeds dx = {}",
                self.dt,
                self.dx()
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.l / self.nx as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.nx).map(|i| self.x(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=self.nx).map(|i| f(self.x(i))).collect()
    }
}

/// Solution values at the grid nodes at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub t: f64,
    pub u: Vec<f64>,
}

impl Field {
    pub fn new(t: f64, u: Vec<f64>) -> Self {
        Self { t, u }
    }

    pub fn zeros(g: &Grid, t: f64) -> Self {
        Self { t, u: vec![0.0; g.nx + 1] }
    }

    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        self.u.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Snapshots at requested times plus per-step boundary diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    /// Time of each diagnostic sample (every step, initial state included).
    pub diag_t: Vec<f64>,
    /// One-sided second-order `u_x(0, t)`.
    pub beta: Vec<f64>,
    /// `u(L, t)`.
    pub kappa: Vec<f64>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> Option<&Field> {
        self.snapshots.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::new(200.0, 4000, 0.025).is_ok());
        assert!(Grid::new(200.0, 32, 0.025).is_err());
        assert!(Grid::new(200.0, 4000, 0.1).is_err());
        assert!(Grid::new(-1.0, 4000, 0.0001).is_err());
        let g = Grid::with_spacing(200.0, 0.05, 0.025).unwrap();
        assert_eq!(g.nx, 4000);
        assert_eq!(g.nodes().len(), 4001);
    }
}
