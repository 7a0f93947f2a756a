use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reaction::Reaction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Node,
    FocusCenter,
    Saddle,
}

/// Linearization of `q' = p, p' = c p - f(q)` at `(0,0)` and `(1,0)`.
///
/// For `c < c0` the origin has complex eigenvalues; `lam0_plus` and
/// `lam0_minus` then both hold the real part and `lam0_imag` the imaginary
/// part of the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalues {
    pub c: f64,
    pub lam0_plus: f64,
    pub lam0_minus: f64,
    pub lam0_imag: f64,
    pub lam1_plus: f64,
    pub lam1_minus: f64,
    /// Type of the origin. `(1,0)` is always a saddle.
    pub classification: Classification,
}

/// Whether `c` is the minimal speed up to rounding.
pub fn is_critical(r: &Reaction, c: f64) -> bool {
    (c - r.c0()).abs() <= 1e-12 * r.c0()
}

fn disc0(r: &Reaction, c: f64) -> f64 {
    if is_critical(r, c) {
        0.0
    } else {
        c * c - 4.0 * r.fp0()
    }
}

pub fn eigenvalues(r: &Reaction, c: f64) -> Eigenvalues {
    let d0 = disc0(r, c);
    let (lam0_plus, lam0_minus, lam0_imag, classification) = if d0 >= 0.0 {
        let s = d0.sqrt();
        let plus = (c + s) / 2.0;
        // product form avoids cancellation for large c
        let minus = if plus != 0.0 { r.fp0() / plus } else { 0.0 };
        (plus, minus, 0.0, Classification::Node)
    } else {
        (c / 2.0, c / 2.0, (-d0).sqrt() / 2.0, Classification::FocusCenter)
    };
    let s1 = (c * c - 4.0 * r.fp1()).sqrt();
    let lam1_plus = (c + s1) / 2.0;
    Eigenvalues {
        c,
        lam0_plus,
        lam0_minus,
        lam0_imag,
        lam1_plus,
        lam1_minus: r.fp1() / lam1_plus,
        classification,
    }
}

fn require_admissible(r: &Reaction, c: f64) -> Result<()> {
    if !(c.is_finite() && (c >= r.c0() || is_critical(r, c))) {
        return Err(Error::Domain(format!("speed {c} is below the minimal speed {}", r.c0())));
    }
    Ok(())
}

/// Slow decay rate of the wave tail, the smaller root at the origin.
pub fn lam_c(r: &Reaction, c: f64) -> Result<f64> {
    require_admissible(r, c)?;
    Ok(eigenvalues(r, c).lam0_minus)
}

/// `2c / (c + sqrt(c^2 - 4 f'(0)))`, so that `c lam_c = f'(0) b_c`.
pub fn bc_constant(r: &Reaction, c: f64) -> Result<f64> {
    require_admissible(r, c)?;
    Ok(2.0 * c / (c + disc0(r, c).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_values() {
        let r = Reaction::logistic();
        let e = eigenvalues(&r, 2.0);
        assert_eq!((e.lam0_plus, e.lam0_minus), (1.0, 1.0));
        let e = eigenvalues(&r, 2.5);
        assert!((e.lam0_plus - 2.0).abs() < 1e-15 && (e.lam0_minus - 0.5).abs() < 1e-15);
        let s = 10.25f64.sqrt();
        assert!((e.lam1_plus - (2.5 + s) / 2.0).abs() < 1e-14);
        assert!((e.lam1_minus - (2.5 - s) / 2.0).abs() < 1e-14);
        assert!((e.lam1_plus - 2.8508).abs() < 1e-4 && (e.lam1_minus + 0.3508).abs() < 1e-4);
        assert_eq!(e.classification, Classification::Node);
        let e = eigenvalues(&r, 1.0);
        assert_eq!(e.classification, Classification::FocusCenter);
        assert!(e.lam1_minus < 0.0 && e.lam1_plus > 0.0);
    }

    #[test]
    fn bc_values() {
        let r = Reaction::logistic();
        assert_eq!(bc_constant(&r, 2.0).unwrap(), 2.0);
        let b = bc_constant(&r, 2.5).unwrap();
        assert!((b - 1.25).abs() < 1e-15);
        assert!((2.5 * lam_c(&r, 2.5).unwrap() - r.fp0() * b).abs() < 1e-12);
        assert!((bc_constant(&r, 100.0).unwrap() - 1.0).abs() < 1e-3);
        assert!(bc_constant(&r, 1.9).is_err());
        assert!(lam_c(&r, 1.9).is_err());
    }
}
