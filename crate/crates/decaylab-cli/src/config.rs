//! The experiment configuration: on-disk schema, cross-field validation,
//! and the annotated example file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use decaylab::damping::{FamilySpec, FieldSpec, LawFieldSpec};
use decaylab::wavesim::{Dynamics, InitialData, Scheme, WaveConfig};
use decaylab::weight::{
    DecayEnvelope, EnvelopeSpec, GrowthFunc, GrowthKind, GrowthSpec, WeightSystem,
};
use decaylab::{CoefficientField, DampingLaw, Error, Result};

/// Which experiment a file is meant to drive. The subcommand actually
/// invoked takes precedence; this field records the intent and is kept so
/// a config is self-describing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Envelope,
    Simulate,
    Compare,
    Observability,
    Lemmas,
    Seqlab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    CubicExp,
    Linear,
}

/// The damping nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSection {
    pub family: Family,
    /// Exponent of the power family; meaningless elsewhere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Sector constant overrides; default to the family's own values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    Constant,
    Bump,
    PiecewiseConstant,
}

/// The damping coefficient `a(x)` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    pub kind: CoeffKind,
    /// Level of the constant kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Support of the localized kinds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amax: Option<f64>,
}

/// The growth map entering the decay composite and the observability checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    pub kind: GrowthKind,
    /// Interpolation exponent of the weak-norm flavor, in (0, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Optional asserted observability constant; when present the measured
    /// constant is checked against it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_t: Option<f64>,
    /// Exponent candidate fed to the exponential-observability fit.
    #[serde(default = "default_beta_obs")]
    pub beta_obs: f64,
    /// The map itself; absent for the identity kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<GrowthFunc>,
}

fn default_beta_obs() -> f64 {
    0.5
}

/// Envelope parameters: window length, time unit, per-window gain, kernel
/// radius and its ceiling, and the weight normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeSection {
    pub horizon: f64,
    pub time_scale: f64,
    pub gain: f64,
    pub r: f64,
    pub eta: f64,
    pub beta: f64,
}

/// An initial state for the wave runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumSpec {
    /// Position and velocity amplitude on one sine mode.
    SingleMode { mode: usize, position: f64, velocity: f64 },
    /// Explicit mode-coefficient lists (position, velocity).
    Modes { position: Vec<f64>, velocity: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Interior grid points; the mesh width is `1/(n+1)`.
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Trace/snapshot sampling stride in steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
    pub data: DatumSpec,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Seed for every sampled data set and sequence instance.
    #[serde(default)]
    pub seed: u64,
    pub law: LawSection,
    pub coefficient: CoefficientSection,
    pub growth: GrowthSection,
    pub envelope: EnvelopeSection,
    pub simulation: SimulationSection,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Everything a task needs, built and cross-validated from one config.
pub struct Lab {
    pub law: DampingLaw,
    pub field: CoefficientField,
    pub gs: GrowthSpec,
    pub env: EnvelopeSpec,
    pub beta: f64,
    pub data: InitialData,
    pub beta_obs: f64,
    pub c_t: Option<f64>,
    /// Power-family exponent, when the law has one; drives the closed-form
    /// envelope column.
    pub power_exponent: Option<f64>,
    pub wave: WaveConfig,
}

impl LawSection {
    fn family_spec(&self) -> Result<FamilySpec> {
        match self.family {
            Family::Power => {
                let p = self
                    .p
                    .ok_or_else(|| Error::config("the power family needs an exponent p".to_string()))?;
                Ok(FamilySpec::Power { p })
            }
            Family::CubicExp | Family::Linear => {
                if self.p.is_some() {
                    return Err(Error::config(
                        "the exponent p only applies to the power family".to_string(),
                    ));
                }
                Ok(match self.family {
                    Family::CubicExp => FamilySpec::CubicExp,
                    _ => FamilySpec::Linear,
                })
            }
        }
    }
}

impl CoefficientSection {
    fn field_spec(&self) -> Result<FieldSpec> {
        let localized = |name: &str| -> Result<(f64, f64, f64, f64)> {
            if self.value.is_some() {
                return Err(Error::config(format!(
                    "the {name} coefficient takes omega/a0/amax, not value"
                )));
            }
            let omega = self
                .omega
                .ok_or_else(|| Error::config(format!("the {name} coefficient needs omega")))?;
            let a0 = self
                .a0
                .ok_or_else(|| Error::config(format!("the {name} coefficient needs a0")))?;
            let amax = self
                .amax
                .ok_or_else(|| Error::config(format!("the {name} coefficient needs amax")))?;
            Ok((omega[0], omega[1], a0, amax))
        };
        match self.kind {
            CoeffKind::Constant => {
                if self.omega.is_some() || self.a0.is_some() || self.amax.is_some() {
                    return Err(Error::config(
                        "the constant coefficient takes only value".to_string(),
                    ));
                }
                let value = self.value.ok_or_else(|| {
                    Error::config("the constant coefficient needs value".to_string())
                })?;
                Ok(FieldSpec::Constant { value })
            }
            CoeffKind::Bump => {
                let (l, u, a0, amax) = localized("bump")?;
                Ok(FieldSpec::Bump { omega: [l, u], a0, amax })
            }
            CoeffKind::PiecewiseConstant => {
                let (l, u, a0, amax) = localized("piecewise-constant")?;
                Ok(FieldSpec::PiecewiseConstant { omega: [l, u], a0, amax })
            }
        }
    }
}

impl GrowthSection {
    fn build(&self) -> Result<GrowthSpec> {
        if let Some(ct) = self.c_t {
            if !(ct > 0.0 && ct.is_finite()) {
                return Err(Error::config(format!("c_t must be positive, got {ct}")));
            }
        }
        if !(self.beta_obs > 0.0 && self.beta_obs.is_finite()) {
            return Err(Error::config(format!(
                "beta_obs must be positive, got {}",
                self.beta_obs
            )));
        }
        match self.kind {
            GrowthKind::Identity => {
                if self.map.is_some() || self.theta.is_some() {
                    return Err(Error::config(
                        "the identity growth takes neither a map nor theta".to_string(),
                    ));
                }
                Ok(GrowthSpec::identity())
            }
            GrowthKind::WeakNormRatio => {
                let map = self.map.ok_or_else(|| {
                    Error::config("the weak-norm growth needs a map".to_string())
                })?;
                let theta = self.theta.ok_or_else(|| {
                    Error::config("the weak-norm growth needs theta".to_string())
                })?;
                GrowthSpec::weak_norm_ratio(map, theta)
            }
            GrowthKind::EnergyRatio => {
                if self.theta.is_some() {
                    return Err(Error::config(
                        "theta only applies to the weak-norm growth".to_string(),
                    ));
                }
                let map = self.map.ok_or_else(|| {
                    Error::config("the energy-ratio growth needs a map".to_string())
                })?;
                GrowthSpec::energy_ratio(map)
            }
        }
    }
}

impl DatumSpec {
    fn build(&self, n: usize) -> Result<InitialData> {
        let data = match self {
            DatumSpec::SingleMode { mode, position, velocity } => {
                if *mode == 0 || *mode > n {
                    return Err(Error::config(format!(
                        "mode {mode} must lie in 1..={n} for the configured grid"
                    )));
                }
                InitialData::single_mode(*mode, *position, *velocity)
            }
            DatumSpec::Modes { position, velocity } => {
                if position.len() > n || velocity.len() > n {
                    return Err(Error::config(format!(
                        "datum excites {} modes but the grid resolves only {n}",
                        position.len().max(velocity.len())
                    )));
                }
                if position.is_empty() && velocity.is_empty() {
                    return Err(Error::config("datum has no coefficients".to_string()));
                }
                InitialData::Modes { w: position.clone(), v: velocity.clone() }
            }
        };
        Ok(data)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| Error::config(format!("configuration does not parse: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::config(format!("configuration does not serialize: {e}")))
    }

    /// Build every object a run needs, validating cross-field consistency
    /// (the kernel radius inside the composite's range, the CFL bound, the
    /// datum against the grid) before any task starts.
    pub fn build(&self) -> Result<Lab> {
        let family = self.law.family_spec()?;
        let defaults = match family {
            FamilySpec::Power { p } => DampingLaw::power(p, self.law.r0)?,
            FamilySpec::CubicExp => DampingLaw::cubic_exp(self.law.r0)?,
            FamilySpec::Linear => {
                if self.law.r0.is_some() {
                    return Err(Error::config("the linear law fixes r0 = 1".to_string()));
                }
                DampingLaw::linear()
            }
        };
        let c1 = self.law.c1.unwrap_or(defaults.c1());
        let c2 = self.law.c2.unwrap_or(defaults.c2());
        if !(c1 > 0.0 && c1.is_finite() && c2 >= c1 && c2.is_finite()) {
            return Err(Error::config(format!(
                "sector constants need 0 < c1 <= c2, got {c1}, {c2}"
            )));
        }
        let power_exponent = match family {
            FamilySpec::Power { p } => Some(p),
            _ => None,
        };
        let spec = LawFieldSpec {
            family,
            c1,
            c2,
            r0: defaults.r0(),
            a: self.coefficient.field_spec()?,
        };
        let (law, field) = spec.build()?;

        let gs = self.growth.build()?;
        let e = &self.envelope;
        let env = EnvelopeSpec::new(e.horizon, e.time_scale, e.gain, e.r, e.eta)?;
        let ws = WeightSystem::new(law.clone(), e.beta)?;
        // Fails here if r falls outside the configured composite's range.
        DecayEnvelope::new(ws, gs, env)?;

        let sim = &self.simulation;
        let data = sim.data.build(sim.n)?;
        let dynamics = match sim.scheme {
            Scheme::Leapfrog => Dynamics::NonlinearDamped,
            Scheme::Spectral => Dynamics::Conservative,
        };
        let wave = WaveConfig {
            n: sim.n,
            dt: sim.dt,
            t_final: sim.t_final,
            scheme: sim.scheme,
            modes: sim.n,
            dynamics,
            law: law.clone(),
            field: field.clone(),
            stride: sim.stride,
        };
        wave.validate()?;

        Ok(Lab {
            law,
            field,
            gs,
            env,
            beta: e.beta,
            data,
            beta_obs: self.growth.beta_obs,
            c_t: self.growth.c_t,
            power_exponent,
            wave,
        })
    }
}

impl Lab {
    pub fn weight_system(&self) -> Result<WeightSystem> {
        WeightSystem::new(self.law.clone(), self.beta)
    }

    /// The weight-times-growth composite of the weak-norm route; the
    /// energy-ratio flavor does not enter it, so it falls back to the
    /// plain weight.
    pub fn main_growth(&self) -> GrowthSpec {
        match self.gs.kind() {
            GrowthKind::EnergyRatio => GrowthSpec::identity(),
            _ => self.gs,
        }
    }

    /// The weight-times-ratio-map composite of the energy-ratio route;
    /// with no such map configured it degenerates to the identity map,
    /// which reproduces the plain-weight envelope.
    pub fn mainbis_growth(&self) -> Result<GrowthSpec> {
        match self.gs.kind() {
            GrowthKind::EnergyRatio => Ok(self.gs),
            _ => GrowthSpec::energy_ratio(GrowthFunc::Identity),
        }
    }

    pub fn envelope_main(&self) -> Result<DecayEnvelope> {
        DecayEnvelope::new(self.weight_system()?, self.main_growth(), self.env)
    }

    pub fn envelope_mainbis(&self) -> Result<DecayEnvelope> {
        DecayEnvelope::new(self.weight_system()?, self.mainbis_growth()?, self.env)
    }

    /// The envelope for the composite the config actually selects.
    pub fn envelope_configured(&self) -> Result<DecayEnvelope> {
        DecayEnvelope::new(self.weight_system()?, self.gs, self.env)
    }

    /// Ratio map for the sequence-lab explicit bound: the configured map
    /// when it is invertible, the identity otherwise.
    pub fn bound_growth(&self) -> GrowthFunc {
        let func = *self.gs.func();
        match self.gs.kind() {
            GrowthKind::Identity => GrowthFunc::Identity,
            _ if func.is_strictly_increasing() => func,
            _ => GrowthFunc::Identity,
        }
    }
}

/// The annotated example configuration; every physical default documented
/// in place.
pub const EXAMPLE: &str = r#"# decaylab experiment configuration.
# The wave equation lives on (0, 1) with homogeneous Dirichlet ends; time
# is in the equation's own units.

# Which experiment this file is meant to drive. The subcommand actually
# invoked wins; this field records the intent.
task = "compare"
# Output directory, created if missing.
out = "out"
# Seed for every sampled data set and sequence instance.
seed = 42

[law]
# Damping nonlinearity g on [0, r0]. Families:
#   "power"     g(x) = x^p, p > 1        (needs p)
#   "cubic_exp" g(x) = x^3 exp(-1/x^2)
#   "linear"    g(x) = x
family = "power"
p = 3.0
# Sector constants c1 x <= ... <= c2 x near 0 and the matching radius r0
# default to the family's own values (1, 1, 1 here).
#c1 = 1.0
#c2 = 1.0
#r0 = 1.0

[coefficient]
# Damping coefficient a(x). Kinds:
#   "constant"           the same value everywhere
#   "bump"               amax plateau on omega, cosine ramps to zero
#   "piecewise_constant" amax on omega, zero outside (discontinuous)
kind = "constant"
value = 1.0
# The localized kinds take these instead of value:
#omega = [0.4, 0.6]
#a0 = 1.0
#amax = 1.0

[growth]
# Growth map entering the decay composite and the observability checks.
#   "identity"        no growth factor
#   "weak_norm_ratio" factor G(x^(1/theta - 1)); needs theta in (0, 1) and a map
#   "energy_ratio"    factor H(x); needs a strictly increasing map
kind = "identity"
#theta = 0.5
# Optional asserted observability constant; the measured one is checked
# against it when present.
#c_t = 0.05
# Exponent candidate fed to the exponential-observability fit.
beta_obs = 0.5
# The map itself, e.g. H(x) = exp(-x^(-1/(2 beta_obs))):
#[growth.map]
#kind = "exp_neg_power"
#scale = 1.0
#exponent = 1.0

[envelope]
horizon = 2.0    # observation window T
time_scale = 0.5 # envelope time unit T0
gain = 1.0       # per-window dissipation gain rho_T
r = 0.4          # kernel radius; must lie inside the composite's range
eta = 0.5        # radius ceiling; must exceed r
beta = 1.0       # weight normalization

[simulation]
n = 256                      # interior grid points; mesh width 1/(n+1)
dt = 0.0019455252918287938   # leapfrog stability needs dt * n <= 1
t_final = 12.0
scheme = "leapfrog"          # "leapfrog" (damped) | "spectral" (conservative)
stride = 64                  # sample the trace every this many steps

[simulation.data]
# Initial state: "single_mode" puts position/velocity amplitudes on one
# sine mode; "modes" lists coefficients explicitly.
kind = "single_mode"
mode = 1
position = 0.0
velocity = 3.0
"#;
