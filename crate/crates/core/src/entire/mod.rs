//! Entire-solution constructions: the wave-to-stationary family built from a
//! sub/supersolution pair, and the family obtained as a limit of small
//! concave initial data shifted in time, together with front tracking.

mod levelset;
mod psi;
mod type1;
mod type2;

pub use levelset::{level_set, recentered_limit, verify_level_set, LEVEL_RANGE, LevelSample, LevelSet, RecenteredRow};
pub use psi::{choose_n, psi_n, psi_n_prime, psi_n_second, psi_field};
pub use type1::{
    amplitude_c0, build_type1, sup_linear_exp, type1_params, verify_type1, Deviation,
    Type1Config, Type1Row, Type1Run, TypeIParams,
};
pub use type2::{
    run_type2, sign_summary, type2_limit, LimitWindow, SignSummary, Type2Config, Type2Row,
    TypeIIRun,
};
