//! Wave equation laboratory on (0, 1) with homogeneous Dirichlet ends:
//! the conservative equation, linear damping `a(x) v`, and nonlinear
//! damping `a(x) rho(v)`, with energy, dissipation, and norm traces.
//!
//! Conservative flows always use the exact modal propagator (rotation at
//! frequency `m pi` per mode). Damped flows use a kick-drift-kick leapfrog
//! whose damping kicks solve `v + c rho(v) = v_free` per node; the solve is
//! strictly monotone, so each kick contracts the velocity and the
//! scheme-matched discrete energy never increases.
//!
//! Norms follow the operator scale: `||z||_alpha = ||A^alpha z||` with
//! eigenvalues `lambda_m = (m pi)^2` of `A = -d^2/dx^2`, evaluated as
//! spectral sums of the exact grid transform.

pub(crate) mod basis;
mod solve;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::damping::{CoefficientField, DampingLaw};
use crate::error::{Error, Result};
use crate::weight::GrowthSpec;

pub use basis::evolve_conservative;
pub(crate) use basis::SineBasis;
pub use solve::{energy_identity_residual, read_snapshots, solve, write_snapshots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Leapfrog,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    Conservative,
    LinearDamped,
    NonlinearDamped,
}

/// One simulation setup. `n` counts interior grid points, so the mesh
/// width is `1/(n+1)`; trace and trajectory are sampled every `stride`
/// steps (step 0 and the final step always included).
#[derive(Debug, Clone)]
pub struct WaveConfig {
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Modes retained by the modal propagator and modal initial data.
    pub modes: usize,
    pub dynamics: Dynamics,
    pub law: DampingLaw,
    pub field: CoefficientField,
    pub stride: usize,
}

impl WaveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("need at least one interior grid point".to_string()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        if self.modes == 0 || self.modes > self.n {
            return Err(Error::config(format!(
                "mode count {} must lie in 1..={}",
                self.modes, self.n
            )));
        }
        if self.stride == 0 {
            return Err(Error::config("sampling stride must be at least 1".to_string()));
        }
        match self.scheme {
            Scheme::Leapfrog => {
                if self.dynamics == Dynamics::Conservative {
                    return Err(Error::config(
                        "conservative runs use the exact modal propagator; pick the spectral scheme"
                            .to_string(),
                    ));
                }
                let cfl = self.dt * self.n as f64;
                if cfl > 1.0 + 1e-12 {
                    return Err(Error::config(format!(
                        "CFL violation: dt * n = {cfl} exceeds 1"
                    )));
                }
            }
            Scheme::Spectral => {
                if self.dynamics != Dynamics::Conservative && !self.field.is_identically_zero() {
                    return Err(Error::config(
                        "the modal propagator only advances damped dynamics when the damping \
                         coefficient vanishes identically"
                            .to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }
}

/// State at one time: interior samples only; both boundary values are
/// identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub t: f64,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

/// Initial data, either as coefficients against the orthonormal modes
/// `sqrt(2) sin(m pi x)` (canonical for norms) or as interior samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InitialData {
    Modes { w: Vec<f64>, v: Vec<f64> },
    Nodal { w: Vec<f64>, v: Vec<f64> },
}

impl InitialData {
    /// Datum concentrated on one mode.
    pub fn single_mode(m: usize, coeff_w: f64, coeff_v: f64) -> Self {
        let mut w = vec![0.0; m];
        let mut v = vec![0.0; m];
        w[m - 1] = coeff_w;
        v[m - 1] = coeff_v;
        InitialData::Modes { w, v }
    }

    /// Interior samples on the grid with `n` points.
    pub fn to_state(&self, n: usize) -> Result<WaveState> {
        match self {
            InitialData::Modes { w, v } => {
                if w.len() > n || v.len() > n {
                    return Err(Error::config(format!(
                        "datum holds {} modes but the grid resolves only {n}",
                        w.len().max(v.len())
                    )));
                }
                let basis = SineBasis::new(n);
                Ok(WaveState { t: 0.0, w: basis.synthesize(w), v: basis.synthesize(v) })
            }
            InitialData::Nodal { w, v } => {
                if w.len() != n || v.len() != n {
                    return Err(Error::config(format!(
                        "nodal datum has {} points, grid needs {n}",
                        w.len().max(v.len())
                    )));
                }
                Ok(WaveState { t: 0.0, w: w.clone(), v: v.clone() })
            }
        }
    }

    /// Mode coefficients `1..=count` on the grid with `n` points. Modal
    /// data must fit in the retained modes.
    pub fn to_modes(&self, n: usize, count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            InitialData::Modes { w, v } => {
                if w.len() > count || v.len() > count {
                    return Err(Error::config(format!(
                        "datum holds {} modes but only {count} are retained",
                        w.len().max(v.len())
                    )));
                }
                let mut wm = w.clone();
                let mut vm = v.clone();
                wm.resize(count, 0.0);
                vm.resize(count, 0.0);
                Ok((wm, vm))
            }
            InitialData::Nodal { w, v } => {
                if w.len() != n || v.len() != n {
                    return Err(Error::config(format!(
                        "nodal datum has {} points, grid needs {n}",
                        w.len().max(v.len())
                    )));
                }
                let basis = SineBasis::new(n);
                Ok((basis.analyze(w, count), basis.analyze(v, count)))
            }
        }
    }
}

/// Sampled energy, dissipation, and norm history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    /// `E = (||w||_{1/2}^2 + ||v||^2) / 2` on the operator scale.
    pub energies: Vec<f64>,
    /// Scheme-matched quadratic form; nonincreasing to rounding for damped
    /// runs. Equals `energies` for modal runs.
    pub discrete_energies: Vec<f64>,
    /// Cumulative dissipation `∫∫ a rho(v) v` (trapezoid over steps).
    pub dissipation: Vec<f64>,
    /// `||(w, v)||_{H_1 x H_{1/2}}`.
    pub strong_norms: Vec<f64>,
    /// Weak norm per the growth spec's interpolation exponents.
    pub weak_norms: Vec<f64>,
}

impl EnergyTrace {
    /// Plot-ready table, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,energy,dissipation,strong_norm,weak_norm\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.times[i],
                self.energies[i],
                self.dissipation[i],
                self.strong_norms[i],
                self.weak_norms[i]
            ));
        }
        out
    }
}

pub(crate) fn lambda(m: usize) -> f64 {
    let om = m as f64 * PI;
    om * om
}

/// `sum_m lambda_m^{2 alpha} c_m^2`.
pub(crate) fn graph_sum(coeffs: &[f64], alpha: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| lambda(i + 1).powf(2.0 * alpha) * c * c)
        .sum()
}

/// The three norms of one datum given in mode coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateNorms {
    /// `(||w||_{1/2}^2 + ||v||^2) / 2`.
    pub energy: f64,
    /// `||w||_1^2 + ||v||_{1/2}^2`.
    pub strong_sq: f64,
    /// Squared weak norm with the growth spec's interpolation exponents.
    pub weak_sq: f64,
}

/// Norms from mode coefficients (exact for modal data).
pub fn mode_norms(w: &[f64], v: &[f64], gs: &GrowthSpec) -> StateNorms {
    let (aw, av) = gs.weak_exponents();
    StateNorms {
        energy: 0.5 * (graph_sum(w, 0.5) + graph_sum(v, 0.0)),
        strong_sq: graph_sum(w, 1.0) + graph_sum(v, 0.5),
        weak_sq: graph_sum(w, aw) + graph_sum(v, av),
    }
}

/// Norms of a nodal state via the exact grid transform.
pub fn state_norms(state: &WaveState, gs: &GrowthSpec) -> StateNorms {
    let n = state.w.len();
    let basis = SineBasis::new(n);
    let wm = basis.analyze(&state.w, n);
    let vm = basis.analyze(&state.v, n);
    mode_norms(&wm, &vm, gs)
}

pub fn energy(state: &WaveState) -> f64 {
    state_norms(state, &GrowthSpec::identity()).energy
}

pub fn strong_norm(state: &WaveState) -> f64 {
    state_norms(state, &GrowthSpec::identity()).strong_sq.sqrt()
}

pub fn weak_norm(state: &WaveState, gs: &GrowthSpec) -> f64 {
    state_norms(state, gs).weak_sq.sqrt()
}
