//! Numerical laboratory for energy decay of damped 1D wave systems.
//!
//! The crate builds explicit decay envelopes for the energy of a wave
//! equation with monotone (possibly nonlinear, possibly localized) velocity
//! damping on the unit interval with homogeneous Dirichlet ends, and checks
//! the inequalities the envelopes rest on:
//!
//! * [`damping`] — damping nonlinearities `g`/`rho` with sector bounds and a
//!   nonnegative, possibly localized coefficient `a(x)`;
//! * [`weight`] — convex transform `R`, its conjugate, the optimal weight
//!   `f`, the kernel `K_r`/`psi_r`, and the decay envelopes built from them;
//! * [`seqlab`] — the discrete-to-continuous comparison lab for contraction
//!   recurrences against their limiting ODE and closed-form bounds;
//! * [`wavesim`] — exact modal propagation for the conservative equation and
//!   an implicit-damping leapfrog scheme for the damped ones;
//! * [`obscheck`] — observation functionals, observability constants, and
//!   the coupling inequalities between conservative, linearly damped and
//!   nonlinearly damped trajectories.
//!
//! All inverses are computed by safeguarded bisection on certified monotone
//! maps; quadrature is adaptive Gauss–Kronrod; randomness is seedable
//! ChaCha, so every run is reproducible.

pub mod damping;
pub mod error;
pub mod numerics;
pub mod obscheck;
pub mod seqlab;
pub mod wavesim;
pub mod weight;

pub use damping::{validate_admissibility, CoefficientField, DampingLaw, LawFieldSpec, ValidationReport};
pub use error::{Error, Result};
pub use numerics::Extended;
pub use obscheck::{DataSet, ExpFitReport, LemmaReport, ObservabilityReport};
pub use seqlab::{BoundReport, ChainReport, SequenceInstance};
pub use wavesim::{Dynamics, EnergyTrace, InitialData, Scheme, WaveConfig, WaveState};
pub use weight::{
    DecayEnvelope, DecayKernel, EnvelopeSpec, EnvelopeValue, GrowthFunc, GrowthKind, GrowthSpec,
    WeightSystem,
};
