//! Fisher-KPP reaction-diffusion on the half line `x > 0` with a Dirichlet
//! condition at the origin: reaction terms, phase-plane profiles, a
//! finite-difference solver, constructions of entire solutions and the
//! verification suites that check them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entire;
pub mod error;
pub mod exec;
pub mod halfline;
pub mod harness;
pub mod io;
pub mod numerics;
pub mod phaseplane;
pub mod reaction;

pub use error::{Error, Result};
