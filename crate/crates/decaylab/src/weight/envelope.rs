//! Decay envelopes: the kernel-driven bound for nonlinear damping, the
//! inverse-ratio multiplier for linear damping, and one-step contraction
//! diagnostics.

use serde::{Deserialize, Serialize};

use crate::damping::DampingLaw;
use crate::error::{Error, Result};

use super::growth::{GrowthKind, GrowthSpec};
use super::kernel::{DecayKernel, EnvelopeSpec};
use super::system::WeightSystem;

/// An envelope evaluation: the bound only takes effect past a threshold
/// time determined by the kernel's fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeValue {
    Valid(f64),
    NotYetValid { threshold: f64 },
}

impl EnvelopeValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            EnvelopeValue::Valid(v) => Some(*v),
            EnvelopeValue::NotYetValid { .. } => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, EnvelopeValue::Valid(_))
    }
}

/// The decay envelope `t -> beta * T * m^{-1}(1 / psi^{-1}((t - T) / T0))`
/// for the composite map `m` = weight times growth factor.
#[derive(Debug)]
pub struct DecayEnvelope {
    kernel: DecayKernel,
    spec: EnvelopeSpec,
    /// `beta * horizon`, the prefactor of the bound.
    scale: f64,
    /// Earliest time the bound is defined, `horizon + time_scale * z0`.
    threshold: f64,
}

impl DecayEnvelope {
    pub fn new(ws: WeightSystem, gs: GrowthSpec, spec: EnvelopeSpec) -> Result<Self> {
        let scale = ws.beta() * spec.horizon;
        let kernel = DecayKernel::new(ws, gs, &spec)?;
        let threshold = spec.horizon + spec.time_scale * kernel.z0();
        Ok(DecayEnvelope { kernel, spec, scale, threshold })
    }

    /// Evaluate the bound at time `t`.
    pub fn eval(&self, t: f64) -> Result<EnvelopeValue> {
        if !t.is_finite() {
            return Err(Error::domain(format!("time {t} is not finite")));
        }
        if t < self.threshold {
            return Ok(EnvelopeValue::NotYetValid { threshold: self.threshold });
        }
        let w = (t - self.spec.horizon) / self.spec.time_scale;
        let z = self.kernel.psi_inverse(w)?;
        let u = self.kernel.map_inverse_from_log(-z.ln())?;
        Ok(EnvelopeValue::Valid(self.scale * u))
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn spec(&self) -> &EnvelopeSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &DecayKernel {
        &self.kernel
    }
}

/// Energy multiplier for linear damping under an increasing ratio map `H`
/// with `H(x)/x` nondecreasing: the energy at time `t` is bounded by
/// `H^{-1}(1 / (1 + t))` times the squared stronger norm of the data.
///
/// For saturating `H` the bound is vacuous at `t = 0` (the inverse argument
/// sits at the range supremum) and surfaces as a domain error.
pub fn linear_decay_multiplier(gs: &GrowthSpec, t: f64, data_norm_sq: f64) -> Result<f64> {
    if gs.kind() != GrowthKind::EnergyRatio {
        return Err(Error::config(
            "linear decay multiplier needs an energy-ratio growth factor".to_string(),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time {t} must be >= 0")));
    }
    if !(data_norm_sq >= 0.0) {
        return Err(Error::domain(format!("squared norm {data_norm_sq} must be >= 0")));
    }
    if !gs.ratio_over_x_nondecreasing(512) {
        return Err(Error::premise(
            "ratio map over identity is not nondecreasing on (0, 1)".to_string(),
        ));
    }
    Ok(gs.func().inverse(1.0 / (1.0 + t))? * data_norm_sq)
}

/// One-step contraction estimate at an initial normalized energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionDiagnostic {
    /// Normalization used for the weighted energy.
    pub beta: f64,
    /// `gain * factor(e0) - horizon / (beta * norm_sq)`; must be positive
    /// for the recurrence to contract.
    pub gain_term: f64,
    /// The per-step multiplier `1 - gain_term * f(e0)`.
    pub factor: f64,
    /// The weight evaluated at the initial normalized energy.
    pub weight_at_ratio: f64,
    /// Doublings of `beta` performed before the estimate held.
    pub doublings: u32,
}

/// Contraction factor of the one-step energy recurrence at normalized
/// initial energy `ehat0`, for a given weight normalization.
pub fn contraction_factor(
    ws: &WeightSystem,
    gs: &GrowthSpec,
    horizon: f64,
    ehat0: f64,
    data_norm_sq: f64,
    obs_gain: f64,
) -> Result<ContractionDiagnostic> {
    if !(horizon > 0.0 && ehat0 > 0.0 && data_norm_sq > 0.0 && obs_gain > 0.0) {
        return Err(Error::config(
            "horizon, initial energy, norm, and gain must all be positive".to_string(),
        ));
    }
    if ehat0 >= ws.f_domain_sup() {
        return Err(Error::domain(format!(
            "initial energy {ehat0} is outside the weight domain [0, {:e}); increase beta",
            ws.f_domain_sup()
        )));
    }
    let growth = gs.factor_log_from_log(ehat0.ln()).exp();
    let gain_term = obs_gain * growth - horizon / (ws.beta() * data_norm_sq);
    let weight_at_ratio = ws.weight_f(ehat0)?;
    Ok(ContractionDiagnostic {
        beta: ws.beta(),
        gain_term,
        factor: 1.0 - gain_term * weight_at_ratio,
        weight_at_ratio,
        doublings: 0,
    })
}

/// Smallest power-of-two multiple of `beta_start` whose weight system
/// yields a genuine contraction (`gain_term > 0`, factor in `(0, 1)`).
pub fn beta_for_contraction(
    law: &DampingLaw,
    gs: &GrowthSpec,
    horizon: f64,
    ehat0: f64,
    data_norm_sq: f64,
    obs_gain: f64,
    beta_start: f64,
) -> Result<ContractionDiagnostic> {
    if !(beta_start > 0.0 && beta_start.is_finite()) {
        return Err(Error::config(format!("beta must start positive, got {beta_start}")));
    }
    let mut beta = beta_start;
    for doublings in 0..=60u32 {
        let ws = WeightSystem::new(law.clone(), beta)?;
        if ehat0 < ws.f_domain_sup() {
            let diag = contraction_factor(&ws, gs, horizon, ehat0, data_norm_sq, obs_gain)?;
            if diag.gain_term > 0.0 && diag.factor > 0.0 && diag.factor < 1.0 {
                return Ok(ContractionDiagnostic { doublings, ..diag });
            }
        }
        beta *= 2.0;
    }
    Err(Error::numerical(
        "no contracting normalization within 60 doublings of beta".to_string(),
    ))
}
