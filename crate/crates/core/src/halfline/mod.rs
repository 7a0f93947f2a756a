//! Finite-difference solver on a truncated half line `[0, L]` with a
//! Dirichlet condition at `x = 0` and zero flux at `x = L`, plus closed-form
//! linear oracles and discrete derivative helpers.

mod derivatives;
mod grid;
mod oracles;
mod stepper;

pub use derivatives::{discrete_derivatives, space_derivatives, time_derivatives, FieldDerivatives};
pub use grid::{Field, Grid, Trajectory};
pub use oracles::{oracle_v, oracle_v_far, oracle_w};
pub use stepper::{
    beta, run_to, solve, step, Integration, Kpp, Linear, Problem, RANNACHER_STEPS,
};
