//! Optimal-weight construction and the decay envelopes built on it.
//!
//! From a damping nonlinearity `g` this module derives the convex transform
//! `R(x) = sqrt(x) g(sqrt(x))`, its Legendre conjugate, the strictly
//! increasing weight `f`, and the kernel machinery (`K_r`, the shifted map
//! `psi_r`, and its inverse) that turns a one-step energy recurrence into an
//! explicit decay bound in time. Growth factors model how the observability
//! constant degrades with the size of the data: through a weaker norm, a
//! ratio of energies, or not at all.

mod envelope;
mod growth;
mod kernel;
mod system;

pub use envelope::{
    beta_for_contraction, contraction_factor, linear_decay_multiplier, ContractionDiagnostic,
    DecayEnvelope, EnvelopeValue,
};
pub use growth::{GrowthFunc, GrowthKind, GrowthSpec};
pub use kernel::{DecayKernel, EnvelopeSpec};
pub use system::WeightSystem;
