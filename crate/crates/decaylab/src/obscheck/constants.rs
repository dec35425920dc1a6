//! Observability constants extracted from the observation functional.
//!
//! Two flavors of observability inequality are checked over a data set,
//! differing in how the functional is normalized:
//!
//! * weak-norm flavor: `c · E(0) · G(weak² / E(0)) ≤ functional`, reported
//!   through the largest admissible `c`;
//! * energy-ratio flavor: `C · strong² · H(E(0) / strong²) ≤ functional`,
//!   reported through the largest admissible `C`.
//!
//! Both per-datum constants are invariant under scaling the datum, since
//! functional and norms are quadratic and the growth argument is a ratio.
//! A datum where the growth factor evaluates to zero satisfies its
//! inequality for every constant; it is flagged vacuous and excluded from
//! the infimum.

use serde::{Deserialize, Serialize};

use crate::damping::CoefficientField;
use crate::error::{Error, Result};
use crate::wavesim::mode_norms;
use crate::weight::{GrowthKind, GrowthSpec};

use super::data::DataSet;
use super::functional::observation_functional;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservabilityKind {
    /// Functional against `E(0) * G(weak²/E(0))`.
    WeakNorm,
    /// Functional against `strong² * H(E(0)/strong²)`.
    EnergyRatio,
}

/// Per-datum outcome of an observability check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumCheck {
    pub index: usize,
    pub label: String,
    pub functional: f64,
    pub quadrature_error: f64,
    pub energy: f64,
    pub strong_sq: f64,
    pub weak_sq: f64,
    pub growth_arg: f64,
    pub growth_value: f64,
    /// Largest constant this datum admits; `None` when vacuous.
    pub admissible: Option<f64>,
    pub vacuous: bool,
}

/// Aggregated observability check over a data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityReport {
    pub kind: ObservabilityKind,
    pub horizon: f64,
    /// Infimum of the per-datum admissible constants (non-vacuous data).
    pub constant: Option<f64>,
    /// `8 T² ||a||²_∞ + 2`, always computed, never fitted.
    pub transfer_constant: f64,
    /// Index of the datum attaining the infimum.
    pub worst: Option<usize>,
    pub has_vacuous: bool,
    pub entries: Vec<DatumCheck>,
}

impl ObservabilityReport {
    /// The inequality holds with a positive constant on every non-vacuous
    /// datum, and at least one datum was informative.
    pub fn passed(&self) -> bool {
        self.constant.map_or(false, |c| c > 0.0 && c.is_finite())
    }

    /// Margins table, one row per datum.
    pub fn margins_csv(&self) -> String {
        let mut out =
            String::from("index,label,functional,energy,strong_sq,weak_sq,admissible,vacuous\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                e.index,
                e.label,
                e.functional,
                e.energy,
                e.strong_sq,
                e.weak_sq,
                e.admissible.map_or(String::new(), |c| c.to_string()),
                e.vacuous
            ));
        }
        out
    }
}

/// Largest `c` with `c E(0) G(weak²/E(0)) ≤ functional` across the set.
/// The growth spec must be the weak-norm flavor; its interpolation
/// exponents define the weak norm being observed.
pub fn check_weak_observability(
    field: &CoefficientField,
    gs: &GrowthSpec,
    horizon: f64,
    set: &DataSet,
    grid: usize,
    samples: usize,
) -> Result<ObservabilityReport> {
    if gs.kind() != GrowthKind::WeakNormRatio {
        return Err(Error::config(
            "weak-norm observability needs the weak-norm growth flavor".to_string(),
        ));
    }
    observability_report(ObservabilityKind::WeakNorm, field, gs, horizon, set, grid, samples)
}

/// Largest `C` with `C strong² H(E(0)/strong²) ≤ functional` across the
/// set. The growth spec must be the energy-ratio flavor.
pub fn check_energy_observability(
    field: &CoefficientField,
    gs: &GrowthSpec,
    horizon: f64,
    set: &DataSet,
    grid: usize,
    samples: usize,
) -> Result<ObservabilityReport> {
    if gs.kind() != GrowthKind::EnergyRatio {
        return Err(Error::config(
            "energy-ratio observability needs the energy-ratio growth flavor".to_string(),
        ));
    }
    observability_report(ObservabilityKind::EnergyRatio, field, gs, horizon, set, grid, samples)
}

fn observability_report(
    kind: ObservabilityKind,
    field: &CoefficientField,
    gs: &GrowthSpec,
    horizon: f64,
    set: &DataSet,
    grid: usize,
    samples: usize,
) -> Result<ObservabilityReport> {
    let mut entries = Vec::with_capacity(set.len());
    for (index, (label, data)) in set.entries().iter().enumerate() {
        let functional = observation_functional(field, data, grid, horizon, samples)?;
        let (wm, vm) = data.to_modes(grid, grid)?;
        let norms = mode_norms(&wm, &vm, gs);
        if !(norms.energy > 0.0) {
            return Err(Error::config(format!(
                "datum {index} ({label}) is zero; observability ratios need nonzero data"
            )));
        }
        let (growth_arg, scale) = match kind {
            ObservabilityKind::WeakNorm => (norms.weak_sq / norms.energy, norms.energy),
            ObservabilityKind::EnergyRatio => {
                (norms.energy / norms.strong_sq, norms.strong_sq)
            }
        };
        let growth_value = gs.func().eval(growth_arg);
        let vacuous = !(growth_value > 0.0);
        let admissible = if vacuous {
            None
        } else {
            Some(functional.value / (scale * growth_value))
        };
        entries.push(DatumCheck {
            index,
            label: label.clone(),
            functional: functional.value,
            quadrature_error: functional.quadrature_error,
            energy: norms.energy,
            strong_sq: norms.strong_sq,
            weak_sq: norms.weak_sq,
            growth_arg,
            growth_value,
            admissible,
            vacuous,
        });
    }
    let mut constant: Option<f64> = None;
    let mut worst = None;
    for e in &entries {
        if let Some(c) = e.admissible {
            if constant.map_or(true, |b| c < b) {
                constant = Some(c);
                worst = Some(e.index);
            }
        }
    }
    let sup = field.sup_norm();
    Ok(ObservabilityReport {
        kind,
        horizon,
        constant,
        transfer_constant: 8.0 * horizon * horizon * sup * sup + 2.0,
        worst,
        has_vacuous: entries.iter().any(|e| e.vacuous),
        entries,
    })
}

/// One mode of the exponential-observability fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub mode: usize,
    pub functional: f64,
    pub strong_sq: f64,
    /// `sqrt(strong² / 2E)`, the frequency scale of the datum.
    pub scale_ratio: f64,
    /// `functional / 2E`, the observed fraction of the energy window.
    pub observed_fraction: f64,
    /// `ln(functional / strong²)`, the fitted ordinate.
    pub log_ratio: f64,
}

/// Empirical fit of `ln(functional/strong²) ≈ -rate · scale_ratio^(1/beta)`
/// over single modes. The fitted numbers estimate how fast a localized
/// coefficient loses high frequencies; they are descriptive, not certified
/// bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpFitReport {
    pub horizon: f64,
    pub rate: f64,
    pub beta: f64,
    /// Sum of squared fit residuals at the chosen `beta`.
    pub residual: f64,
    /// Set when the observed fractions carry no spread to fit (full
    /// observation); the rate and beta are then meaningless zeros.
    pub degenerate: bool,
    /// Always true: the numbers are estimates from a finite mode sweep.
    pub empirical: bool,
    pub entries: Vec<FitEntry>,
}

pub fn fit_exponential_observability(
    field: &CoefficientField,
    horizon: f64,
    beta_grid: &[f64],
    modes: std::ops::RangeInclusive<usize>,
    grid: usize,
    samples: usize,
) -> Result<ExpFitReport> {
    let (lo, hi) = (*modes.start(), *modes.end());
    if lo < 1 || hi > grid || hi < lo {
        return Err(Error::config(format!(
            "mode range {lo}..={hi} must sit inside 1..={grid}"
        )));
    }
    if hi - lo + 1 < 3 {
        return Err(Error::config(
            "need at least three modes to fit an exponential trend; widen the range".to_string(),
        ));
    }
    if beta_grid.is_empty() || beta_grid.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(Error::config("beta grid must hold positive finite values".to_string()));
    }

    let gs = GrowthSpec::identity();
    let mut entries = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let data = crate::wavesim::InitialData::single_mode(n, 1.0, 0.0);
        let functional = observation_functional(field, &data, grid, horizon, samples)?;
        let (wm, vm) = data.to_modes(grid, grid)?;
        let norms = mode_norms(&wm, &vm, &gs);
        if !(functional.value > 0.0) {
            return Err(Error::numerical(format!(
                "mode {n} yields a zero functional; the coefficient does not see it"
            )));
        }
        entries.push(FitEntry {
            mode: n,
            functional: functional.value,
            strong_sq: norms.strong_sq,
            scale_ratio: (norms.strong_sq / (2.0 * norms.energy)).sqrt(),
            observed_fraction: functional.value / (2.0 * norms.energy),
            log_ratio: (functional.value / norms.strong_sq).ln(),
        });
    }

    let fractions: Vec<f64> = entries.iter().map(|e| e.observed_fraction).collect();
    let fmax = fractions.iter().fold(f64::MIN, |m, &q| m.max(q));
    let fmin = fractions.iter().fold(f64::MAX, |m, &q| m.min(q));
    if fmax - fmin <= 1e-3 * fmax {
        return Ok(ExpFitReport {
            horizon,
            rate: 0.0,
            beta: 0.0,
            residual: 0.0,
            degenerate: true,
            empirical: true,
            entries,
        });
    }

    let mut best: Option<(f64, f64, f64)> = None;
    for &beta in beta_grid {
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        for e in &entries {
            let x = e.scale_ratio.powf(1.0 / beta);
            sxy += x * e.log_ratio;
            sxx += x * x;
        }
        let rate = -sxy / sxx;
        let ssr: f64 = entries
            .iter()
            .map(|e| {
                let x = e.scale_ratio.powf(1.0 / beta);
                let r = e.log_ratio + rate * x;
                r * r
            })
            .sum();
        if best.map_or(true, |(_, _, b)| ssr < b) {
            best = Some((rate, beta, ssr));
        }
    }
    let (rate, beta, residual) = best.unwrap();
    Ok(ExpFitReport {
        horizon,
        rate,
        beta,
        residual,
        degenerate: false,
        empirical: true,
        entries,
    })
}
