//! Observation functionals for the conservative flow, observability
//! constants over data suites, and the coupling inequalities tying the
//! conservative, linearly damped, and nonlinearly damped trajectories of
//! one datum together.
//!
//! Everything here is quadratic in the datum, so the reported constants
//! are scale-invariant; fitted quantities are labeled empirical and are
//! never presented as certified bounds.

mod constants;
mod data;
mod functional;
mod lemmas;

pub use constants::{
    check_energy_observability, check_weak_observability, fit_exponential_observability,
    DatumCheck, ExpFitReport, FitEntry, ObservabilityKind, ObservabilityReport,
};
pub use data::DataSet;
pub use functional::{observation_functional, reversed_datum, FunctionalValue};
pub use lemmas::{
    check_kinetic_feedback_bound, check_observation_transfer, check_velocity_comparison,
    lemma_margins_csv, LemmaReport,
};
