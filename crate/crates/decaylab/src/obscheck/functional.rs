//! The observation functional `∫_0^T ∫ a(x) |φ̇|² dx dt` along the
//! conservative flow.
//!
//! The trajectory is never materialized: each time sample rotates the mode
//! coefficients analytically, synthesizes the velocity only at nodes where
//! the coefficient is positive, and feeds one trapezoid panel. The
//! half-rate trapezoid runs in the same pass, so the returned quadrature
//! error estimate costs nothing extra.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::damping::CoefficientField;
use crate::error::{Error, Result};
use crate::wavesim::{evolve_conservative, InitialData};

/// Functional value with its embedded time-quadrature error estimate
/// (difference against the half-rate trapezoid, Richardson-scaled).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub quadrature_error: f64,
    pub samples: usize,
}

/// Time samples per unit horizon required for `n_max` retained modes:
/// 40 per shortest period `2/n_max`.
fn required_samples(horizon: f64, n_max: usize) -> usize {
    (20.0 * horizon * n_max as f64).ceil() as usize
}

/// Evaluate the observation functional for `data` propagated
/// conservatively over `[0, horizon]`, with `samples` (even) trapezoid
/// panels in time and the `grid`-point interior mesh in space.
pub fn observation_functional(
    field: &CoefficientField,
    data: &InitialData,
    grid: usize,
    horizon: f64,
    samples: usize,
) -> Result<FunctionalValue> {
    if grid == 0 {
        return Err(Error::config("need at least one interior grid point".to_string()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::config(format!("horizon must be positive, got {horizon}")));
    }
    if samples < 2 || samples % 2 != 0 {
        return Err(Error::config(format!(
            "sample count must be even and at least 2 for the embedded error estimate, got {samples}"
        )));
    }
    let (wm, vm) = data.to_modes(grid, grid)?;
    let active: Vec<usize> =
        (0..grid).filter(|&m| wm[m] != 0.0 || vm[m] != 0.0).collect();
    let Some(&top) = active.last() else {
        return Ok(FunctionalValue { value: 0.0, quadrature_error: 0.0, samples });
    };
    let n_max = top + 1;
    let needed = required_samples(horizon, n_max);
    if samples < needed {
        return Err(Error::resolution(format!(
            "time quadrature under-resolved: mode {n_max} over horizon {horizon} needs at \
             least {needed} samples (40 per shortest period), got {samples}"
        )));
    }

    let h = 1.0 / (grid as f64 + 1.0);
    let mut nodes = Vec::new();
    let mut node_weights = Vec::new();
    for j in 0..grid {
        let a = field.eval((j + 1) as f64 * h);
        if a > 0.0 {
            nodes.push(j);
            node_weights.push(h * a);
        }
    }
    if nodes.is_empty() {
        return Ok(FunctionalValue { value: 0.0, quadrature_error: 0.0, samples });
    }
    // rows: synthesis coefficients of the active modes at the kept nodes
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&j| {
            let x = (j + 1) as f64 * h;
            active.iter().map(|&m| SQRT_2 * ((m + 1) as f64 * PI * x).sin()).collect()
        })
        .collect();
    let omegas: Vec<f64> = active.iter().map(|&m| (m + 1) as f64 * PI).collect();

    let dt = horizon / samples as f64;
    let mut fine = 0.0;
    let mut coarse = 0.0;
    let mut vhat = vec![0.0; active.len()];
    for i in 0..=samples {
        let t = i as f64 * dt;
        for (k, &m) in active.iter().enumerate() {
            let (s, c) = (omegas[k] * t).sin_cos();
            vhat[k] = vm[m] * c - wm[m] * omegas[k] * s;
        }
        let mut g = 0.0;
        for (row, &q) in rows.iter().zip(&node_weights) {
            let mut vel = 0.0;
            for (b, vh) in row.iter().zip(&vhat) {
                vel += b * vh;
            }
            g += q * vel * vel;
        }
        let endpoint = i == 0 || i == samples;
        fine += if endpoint { 0.5 * g } else { g };
        if i % 2 == 0 {
            coarse += if endpoint { 0.5 * g } else { g };
        }
    }
    let value = fine * dt;
    let half_rate = coarse * 2.0 * dt;
    Ok(FunctionalValue {
        value,
        quadrature_error: (value - half_rate).abs() / 3.0,
        samples,
    })
}

/// Initial data of the time-reversed conservative trajectory: the state at
/// `horizon` with the velocity negated. The functional is invariant under
/// this reversal.
pub fn reversed_datum(data: &InitialData, grid: usize, horizon: f64) -> Result<InitialData> {
    let (wm, vm) = data.to_modes(grid, grid)?;
    let (w, v) = evolve_conservative(&wm, &vm, horizon);
    Ok(InitialData::Modes { w, v: v.into_iter().map(|x| -x).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_field() -> CoefficientField {
        CoefficientField::constant(1.0).unwrap()
    }

    #[test]
    fn full_observation_single_modes() {
        // a == 1, T = 2: value = 2 E(0) = (n pi)^2 for a unit mode
        for n in [1usize, 3, 16] {
            let data = InitialData::single_mode(n, 1.0, 0.0);
            let out = observation_functional(&unit_field(), &data, 127, 2.0, 4096).unwrap();
            let expect = (n as f64 * PI).powi(2);
            assert_relative_eq!(out.value, expect, max_relative = 1e-9);
            assert!(out.quadrature_error <= 1e-9 * expect);
        }
        // T = 4 doubles the window: value = 4 E(0)
        let data = InitialData::single_mode(2, 1.0, 0.0);
        let out = observation_functional(&unit_field(), &data, 127, 4.0, 8192).unwrap();
        assert_relative_eq!(out.value, 2.0 * (2.0 * PI).powi(2), max_relative = 1e-9);
    }

    #[test]
    fn zero_coefficient_and_zero_datum() {
        let field = CoefficientField::constant(0.0).unwrap();
        let data = InitialData::single_mode(2, 1.0, 0.5);
        let out = observation_functional(&field, &data, 63, 2.0, 512).unwrap();
        assert_eq!(out.value, 0.0);

        let zero = InitialData::Modes { w: vec![0.0; 3], v: vec![0.0; 3] };
        let out = observation_functional(&unit_field(), &zero, 63, 2.0, 512).unwrap();
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn quadratic_homogeneity() {
        let field = CoefficientField::bump((0.3, 0.6), 0.5, 1.5).unwrap();
        let data = InitialData::Modes { w: vec![0.4, 0.0, -0.3], v: vec![0.2, 0.1] };
        let scaled = InitialData::Modes {
            w: vec![1.0, 0.0, -0.75],
            v: vec![0.5, 0.25],
        };
        let base = observation_functional(&field, &data, 63, 1.5, 1024).unwrap();
        let big = observation_functional(&field, &scaled, 63, 1.5, 1024).unwrap();
        assert_relative_eq!(big.value, 6.25 * base.value, max_relative = 1e-12);
        assert!(base.value > 0.0);
    }

    #[test]
    fn time_reversal_invariance() {
        let field = CoefficientField::bump((0.2, 0.5), 0.4, 2.0).unwrap();
        let data = InitialData::Modes { w: vec![0.5, -0.2, 0.0, 0.3], v: vec![0.0, 0.4] };
        let forward = observation_functional(&field, &data, 63, 1.25, 2048).unwrap();
        let back = reversed_datum(&data, 63, 1.25).unwrap();
        let reversed = observation_functional(&field, &back, 63, 1.25, 2048).unwrap();
        assert_relative_eq!(forward.value, reversed.value, max_relative = 1e-12);
    }

    #[test]
    fn resolution_and_sample_guards() {
        let data = InitialData::single_mode(32, 1.0, 0.0);
        // 20 * T * n_max = 1280 > 512
        let err = observation_functional(&unit_field(), &data, 63, 2.0, 512).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)), "got {err:?}");
        assert!(err.to_string().contains("1280"));
        assert!(observation_functional(&unit_field(), &data, 63, 2.0, 2048).is_ok());

        let odd = observation_functional(&unit_field(), &data, 63, 2.0, 2047);
        assert!(matches!(odd.unwrap_err(), Error::Config(_)));
    }
}
