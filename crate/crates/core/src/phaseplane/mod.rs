//! Phase-plane constructions: equilibrium eigenvalues, the stationary
//! half-line profile and traveling-wave profiles.

mod eigen;
mod stationary;
mod wave;

pub use eigen::{bc_constant, eigenvalues, is_critical, lam_c, Classification, Eigenvalues};
pub use stationary::{stationary, stationary_with, StationaryProfile, FAR_TOL};
pub use wave::{amplitude_ac, tail_fit, wave, wave_with, TailFit, WaveOptions, WaveProfile};
