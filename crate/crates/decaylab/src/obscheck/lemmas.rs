//! Coupling inequalities between the conservative, linearly damped, and
//! nonlinearly damped trajectories of one datum.
//!
//! These are theorems for the continuous system; each check recomputes
//! both sides from simulation and reports the margin. A failure beyond
//! quadrature error means an implementation bug, not a counterexample.

use serde::{Deserialize, Serialize};

use crate::damping::{CoefficientField, DampingLaw};
use crate::error::{Error, Result};
use crate::wavesim::{self, mode_norms, Dynamics, InitialData, Scheme, WaveConfig};
use crate::weight::{GrowthSpec, WeightSystem};

use super::functional::observation_functional;

/// Two-sided record of one checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub label: String,
    pub horizon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `rhs / lhs` when the left side is positive.
    pub ratio: Option<f64>,
    pub constants: Vec<(String, f64)>,
    pub pass: bool,
}

impl LemmaReport {
    fn verdict(
        label: &str,
        horizon: f64,
        lhs: f64,
        rhs: f64,
        constants: Vec<(String, f64)>,
    ) -> Self {
        LemmaReport {
            label: label.to_string(),
            horizon,
            lhs,
            rhs,
            margin: rhs - lhs,
            ratio: if lhs > 0.0 { Some(rhs / lhs) } else { None },
            constants,
            pass: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}\n",
            self.label,
            self.horizon,
            self.lhs,
            self.rhs,
            self.margin,
            self.pass
        )
    }
}

/// Margins table for a batch of checked inequalities.
pub fn lemma_margins_csv(reports: &[LemmaReport]) -> String {
    let mut out = String::from("label,horizon,lhs,rhs,margin,pass\n");
    for r in reports {
        out.push_str(&r.csv_row());
    }
    out
}

/// Time-trapezoid accumulations along one damped leapfrog run.
struct RunQuadratures {
    /// `∫∫ a v²`
    velocity_sq: f64,
    /// `∫∫ a rho(v)²` (with `rho = id` for linear dynamics)
    feedback_sq: f64,
    /// `∫∫ a rho(v) v`
    dissipation: f64,
}

fn damped_run_quadratures(
    law: &DampingLaw,
    field: &CoefficientField,
    data: &InitialData,
    dynamics: Dynamics,
    horizon: f64,
    grid: usize,
    dt: f64,
) -> Result<RunQuadratures> {
    let config = WaveConfig {
        n: grid,
        dt,
        t_final: horizon,
        scheme: Scheme::Leapfrog,
        modes: grid,
        dynamics,
        law: law.clone(),
        field: field.clone(),
        stride: 1,
    };
    let (trajectory, trace) = wavesim::solve(&config, data, None)?;
    let h = 1.0 / (grid as f64 + 1.0);
    let coeff: Vec<f64> = (1..=grid).map(|j| field.eval(j as f64 * h)).collect();
    let nonlinear = dynamics == Dynamics::NonlinearDamped;
    let mut velocity_sq = 0.0;
    let mut feedback_sq = 0.0;
    let last = trajectory.len() - 1;
    for (i, frame) in trajectory.iter().enumerate() {
        let mut sv = 0.0;
        let mut sf = 0.0;
        for j in 0..grid {
            if coeff[j] != 0.0 {
                let v = frame.v[j];
                let r = if nonlinear { law.rho(v) } else { v };
                sv += coeff[j] * v * v;
                sf += coeff[j] * r * r;
            }
        }
        let tw = if i == 0 || i == last { 0.5 } else { 1.0 };
        velocity_sq += tw * sv;
        feedback_sq += tw * sf;
    }
    Ok(RunQuadratures {
        velocity_sq: velocity_sq * h * dt,
        feedback_sq: feedback_sq * h * dt,
        dissipation: *trace.dissipation.last().unwrap(),
    })
}

/// `∫∫ a |ż|² ≤ 2 ∫∫ (a |ẇ|² + a |rho(ẇ)|²)` where `z` solves the linear
/// damped equation and `w` the nonlinear one, from the same datum.
pub fn check_velocity_comparison(
    law: &DampingLaw,
    field: &CoefficientField,
    data: &InitialData,
    horizon: f64,
    grid: usize,
    dt: f64,
) -> Result<LemmaReport> {
    let linear =
        damped_run_quadratures(law, field, data, Dynamics::LinearDamped, horizon, grid, dt)?;
    let nonlinear =
        damped_run_quadratures(law, field, data, Dynamics::NonlinearDamped, horizon, grid, dt)?;
    let lhs = linear.velocity_sq;
    let rhs = 2.0 * (nonlinear.velocity_sq + nonlinear.feedback_sq);
    Ok(LemmaReport::verdict(
        "linear damped velocity bounded by nonlinear velocity plus feedback",
        horizon,
        lhs,
        rhs,
        vec![("factor".to_string(), 2.0)],
    ))
}

/// `∫∫ a |φ̇|² ≤ k_T ∫∫ a |ż|²` with the computed transfer constant
/// `k_T = 8 T² ||a||²_∞ + 2`: conservative observation controlled by the
/// linear damping action.
pub fn check_observation_transfer(
    law: &DampingLaw,
    field: &CoefficientField,
    data: &InitialData,
    horizon: f64,
    grid: usize,
    dt: f64,
    samples: usize,
) -> Result<LemmaReport> {
    let lhs = observation_functional(field, data, grid, horizon, samples)?.value;
    let linear =
        damped_run_quadratures(law, field, data, Dynamics::LinearDamped, horizon, grid, dt)?;
    let sup = field.sup_norm();
    let transfer = 8.0 * horizon * horizon * sup * sup + 2.0;
    let rhs = transfer * linear.velocity_sq;
    Ok(LemmaReport::verdict(
        "conservative observation controlled by linear damping action",
        horizon,
        lhs,
        rhs,
        vec![
            ("transfer_constant".to_string(), transfer),
            ("coefficient_sup".to_string(), sup),
        ],
    ))
}

/// Weighted kinetic-plus-feedback bound for the nonlinear damped run:
///
/// `f(Ê₀) ∫∫ a (|ẇ|² + |rho(ẇ)|²)
///    ≤ c_meas T R*(f(Ê₀)) + c_sec (f(Ê₀) + 1) ∫∫ a rho(ẇ) ẇ`
///
/// with `Ê₀ = E(0)/strong²` the scale-invariant energy ratio of the
/// datum, `c_meas = (∫a)(1 + c₂²)`, and `c_sec = 1/c₁ + c₂` from the
/// law's sector constants.
pub fn check_kinetic_feedback_bound(
    ws: &WeightSystem,
    field: &CoefficientField,
    data: &InitialData,
    horizon: f64,
    grid: usize,
    dt: f64,
) -> Result<LemmaReport> {
    let (wm, vm) = data.to_modes(grid, grid)?;
    let norms = mode_norms(&wm, &vm, &GrowthSpec::identity());
    if !(norms.energy > 0.0) {
        return Err(Error::config("zero datum has no energy ratio".to_string()));
    }
    let ehat = norms.energy / norms.strong_sq;
    if ehat >= ws.f_domain_sup() {
        return Err(Error::domain(format!(
            "energy ratio {ehat} falls outside the weight domain [0, {}); raise beta or use \
             smoother data",
            ws.f_domain_sup()
        )));
    }
    let weight = ws.weight_f(ehat)?;
    let conjugate = ws.conjugate_r(weight)?;
    let law = ws.law();
    let run = damped_run_quadratures(
        law,
        field,
        data,
        Dynamics::NonlinearDamped,
        horizon,
        grid,
        dt,
    )?;
    let lhs = weight * (run.velocity_sq + run.feedback_sq);
    let measure = field.integral();
    let c_meas = measure * (1.0 + law.c2() * law.c2());
    let c_sec = 1.0 / law.c1() + law.c2();
    let rhs = c_meas * horizon * conjugate + c_sec * (weight + 1.0) * run.dissipation;
    Ok(LemmaReport::verdict(
        "weighted kinetic and feedback bounded by conjugate pressure and dissipation",
        horizon,
        lhs,
        rhs,
        vec![
            ("measure_factor".to_string(), c_meas),
            ("sector_factor".to_string(), c_sec),
            ("weighted_measure".to_string(), measure),
            ("energy_ratio".to_string(), ehat),
            ("weight_value".to_string(), weight),
            ("conjugate_value".to_string(), conjugate),
        ],
    ))
}
