//! Measurement statistics of one- and two-bit spin systems derived from
//! discrete outcomes plus classical transformation rules obeyed on average,
//! together with CHSH tests against local hidden-variable models and an
//! amplitude-based cross-check.

pub mod axis;
pub mod chsh;
pub mod composite;
pub mod dichotomic;
pub mod error;
pub mod oracle;
pub mod sampling;
pub mod verify;

pub use axis::{angle_between, complete_frame, make_axis, Frame, UnitAxis};
pub use chsh::{
    chsh_value, lhv_deterministic_scan, lhv_sign_correlator, monte_carlo_chsh, quantum_correlator,
    sample_singlet_pair, ChshConfig, ChshResult, CorrelatorModel, DeterministicStrategy,
};
pub use composite::{
    j_squared_composite, mixture_transition_table, rotated_m33, singlet_statistics,
    tensor_for_state, transition_table, CompositeModel, CompositeState, Level, SecondMomentTensor,
    TernaryDistribution,
};
pub use dichotomic::{
    expectation, j_squared, measure, second_moment, stokes_experiment, transition_probability,
    BinaryDistribution, ElementaryState, Sign, StokesRecord,
};
pub use error::{Error, Result};
