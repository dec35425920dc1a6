//! Discrete comparison sequences: the damped Euler recurrence, its
//! comparison ODE, the sandwich between a recurrence-satisfying sequence
//! and both of them, and the explicit decay bound for step functions
//! obeying a contraction recurrence.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode_solve;
use crate::weight::{DecayKernel, EnvelopeSpec, GrowthFunc};

type MapFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const DELTA_SCAN_STEPS: usize = 4096;

/// One instance of the comparison setup: a nondecreasing dissipation map
/// `M`, a per-step gain, a step length, and the radius `delta` on which the
/// step map `x - rho_T M(x)` is strictly increasing.
#[derive(Clone)]
pub struct SequenceInstance {
    e0: f64,
    rho_t: f64,
    horizon: f64,
    map: MapFn,
    map_label: String,
    /// Set when `M(v) = v F^{-1}(v)`; required by the explicit bound.
    growth: Option<GrowthFunc>,
    delta: f64,
}

impl fmt::Debug for SequenceInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceInstance")
            .field("e0", &self.e0)
            .field("rho_t", &self.rho_t)
            .field("horizon", &self.horizon)
            .field("map", &self.map_label)
            .field("growth", &self.growth)
            .field("delta", &self.delta)
            .finish()
    }
}

/// Per-index comparison of a sequence against its Euler and ODE majorants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub index: usize,
    pub time: f64,
    /// The checked sequence value.
    pub value: f64,
    /// Euler majorant at the same index.
    pub euler: f64,
    /// ODE solution at the same time.
    pub ode: f64,
    /// `euler - value`; nonnegative when the chain holds.
    pub euler_slack: f64,
    /// `ode - euler`; nonnegative when the chain holds.
    pub ode_slack: f64,
}

/// Result of the two-sided comparison check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Whether the input satisfied the recurrence premise at all.
    pub premise_ok: bool,
    pub premise_detail: Option<String>,
    pub first_violation: Option<usize>,
    pub entries: Vec<ChainEntry>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.premise_ok && self.first_violation.is_none()
    }
}

/// Per-sample comparison of a step function against the explicit bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub index: usize,
    pub time: f64,
    pub value: f64,
    /// The bound, once the time is past its validity threshold.
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

/// Result of the explicit-bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub premise_ok: bool,
    pub premise_detail: Option<String>,
    /// Earliest time at which the bound is defined.
    pub threshold_time: f64,
    /// Earliest sampled time from which the bound holds at every later
    /// sample.
    pub first_holding_time: Option<f64>,
    /// Largest value-to-bound ratio over the samples where both exist.
    pub max_ratio: Option<f64>,
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    /// True when the premises held and the bound held from some sample on.
    pub fn passed(&self) -> bool {
        self.premise_ok && self.first_holding_time.is_some()
    }
}

/// Largest prefix radius on which `x - rho_t M(x)` keeps strictly
/// increasing sampled differences: the first sampled sign change of the
/// difference, minus one grid step. `ceiling` if no change is seen.
fn estimate_delta(map: &MapFn, rho_t: f64, ceiling: f64) -> Result<f64> {
    let n = DELTA_SCAN_STEPS;
    let h = ceiling / n as f64;
    let mut prev_map = map(0.0);
    if !prev_map.is_finite() || prev_map < 0.0 {
        return Err(Error::premise(format!(
            "dissipation map must be finite and nonnegative at 0, got {prev_map}"
        )));
    }
    let mut prev_psi = -rho_t * prev_map;
    for i in 1..=n {
        let x = ceiling * i as f64 / n as f64;
        let mv = map(x);
        if !mv.is_finite() {
            return Err(Error::premise(format!("dissipation map is not finite at {x}")));
        }
        let psi = x - rho_t * mv;
        if psi <= prev_psi {
            return Ok((x - 2.0 * h).max(0.0));
        }
        if mv < prev_map {
            return Err(Error::premise(format!(
                "dissipation map decreases near {x} inside its monotonicity radius"
            )));
        }
        prev_map = mv;
        prev_psi = psi;
    }
    Ok(ceiling)
}

impl SequenceInstance {
    /// Instance with an explicit dissipation map.
    pub fn new(
        e0: f64,
        rho_t: f64,
        horizon: f64,
        map: impl Fn(f64) -> f64 + Send + Sync + 'static,
        label: &str,
    ) -> Result<Self> {
        Self::build(e0, rho_t, horizon, Arc::new(map), label.to_string(), None)
    }

    /// Instance with `M(v) = v F^{-1}(v)` for a strictly increasing `F`;
    /// the form the explicit decay bound needs.
    pub fn from_growth(e0: f64, rho_t: f64, horizon: f64, func: GrowthFunc) -> Result<Self> {
        if !func.is_strictly_increasing() {
            return Err(Error::config("ratio map must be strictly increasing".to_string()));
        }
        let map: MapFn = Arc::new(move |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            match func.inverse(v) {
                Ok(u) => v * u,
                Err(_) => f64::NAN,
            }
        });
        Self::build(e0, rho_t, horizon, map, format!("v * inv({func:?})(v)"), Some(func))
    }

    fn build(
        e0: f64,
        rho_t: f64,
        horizon: f64,
        map: MapFn,
        map_label: String,
        growth: Option<GrowthFunc>,
    ) -> Result<Self> {
        if !(e0 >= 0.0 && e0.is_finite()) {
            return Err(Error::config(format!("initial value must be finite and >= 0, got {e0}")));
        }
        if !(rho_t > 0.0 && rho_t.is_finite()) {
            return Err(Error::config(format!("gain must be positive, got {rho_t}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::config(format!("step length must be positive, got {horizon}")));
        }
        let mut ceiling = 2.0 * e0.max(1.0);
        if let Some(func) = &growth {
            // the inverse only exists below the range supremum
            ceiling = ceiling.min(func.range_sup() * (1.0 - 1e-9));
        }
        let delta = estimate_delta(&map, rho_t, ceiling)?;
        if !(e0 < delta) {
            return Err(Error::config(format!(
                "initial value {e0} must lie below the monotonicity radius {delta}"
            )));
        }
        Ok(SequenceInstance { e0, rho_t, horizon, map, map_label, growth, delta })
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn rho_t(&self) -> f64 {
        self.rho_t
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// The derived time scale `T / rho_T`.
    pub fn time_scale(&self) -> f64 {
        self.horizon / self.rho_t
    }

    /// Radius on which the step map is strictly increasing.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn growth(&self) -> Option<&GrowthFunc> {
        self.growth.as_ref()
    }

    /// Human-readable description of the dissipation map.
    pub fn map_label(&self) -> &str {
        &self.map_label
    }

    /// The dissipation map `M`.
    pub fn map_value(&self, v: f64) -> f64 {
        (self.map)(v)
    }

    /// The exact fixed-step recurrence `y_{k+1} = y_k - rho_T M(y_k)`,
    /// values at indices `0..=n`. The second return is the first index
    /// whose value left `[0, delta]`; entries past it are still the exact
    /// recurrence but the comparison statements no longer apply.
    pub fn euler_sequence(&self, n: usize) -> (Vec<f64>, Option<usize>) {
        let mut values = Vec::with_capacity(n + 1);
        let mut escaped = None;
        let mut y = self.e0;
        for k in 0..=n {
            if escaped.is_none() && !(0.0..=self.delta).contains(&y) {
                escaped = Some(k);
            }
            values.push(y);
            y -= self.rho_t * (self.map)(y);
        }
        (values, escaped)
    }

    /// The comparison ODE `y' = -(rho_T / T) M(y)` from `y(0) = E0`,
    /// integrated to each requested ascending time.
    pub fn ode_solution_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        for &t in times {
            if !(t >= 0.0) {
                return Err(Error::domain(format!("time {t} must be >= 0")));
            }
        }
        let rate = self.rho_t / self.horizon;
        let map = self.map.clone();
        ode_solve(move |_, y| -rate * map(y.max(0.0)), 0.0, self.e0, times, 1e-12, 1e-12)
    }

    pub fn ode_solution(&self, t: f64) -> Result<f64> {
        Ok(self.ode_solution_many(&[t])?[0])
    }

    /// Verify the two-sided comparison: a sequence satisfying
    /// `E_{k+1} <= E_k - rho_T M(E_k)` stays below the Euler recurrence,
    /// which stays below the ODE solution at the step times.
    pub fn check_chain(&self, e: &[f64]) -> Result<ChainReport> {
        if e.is_empty() {
            return Err(Error::config("empty sequence".to_string()));
        }
        let premise_detail = self.chain_premise_failure(e);
        if premise_detail.is_some() {
            return Ok(ChainReport {
                premise_ok: false,
                premise_detail,
                first_violation: None,
                entries: Vec::new(),
            });
        }
        let n = e.len() - 1;
        let (euler, _) = self.euler_sequence(n);
        let times: Vec<f64> = (0..=n).map(|k| self.horizon * k as f64).collect();
        let ode = self.ode_solution_many(&times)?;
        let mut entries = Vec::with_capacity(n + 1);
        let mut first_violation = None;
        for k in 0..=n {
            let entry = ChainEntry {
                index: k,
                time: times[k],
                value: e[k],
                euler: euler[k],
                ode: ode[k],
                euler_slack: euler[k] - e[k],
                ode_slack: ode[k] - euler[k],
            };
            let tol = 1e-12 + 1e-9 * euler[k].abs().max(ode[k].abs());
            if first_violation.is_none() && (entry.euler_slack < -tol || entry.ode_slack < -tol) {
                first_violation = Some(k);
            }
            entries.push(entry);
        }
        Ok(ChainReport { premise_ok: true, premise_detail: None, first_violation, entries })
    }

    fn chain_premise_failure(&self, e: &[f64]) -> Option<String> {
        if e[0] > self.e0 * (1.0 + 1e-12) {
            return Some(format!("first value {} exceeds the instance start {}", e[0], self.e0));
        }
        if !(e[0] < self.delta) {
            return Some(format!(
                "first value {} is not below the monotonicity radius {}",
                e[0], self.delta
            ));
        }
        for k in 0..e.len() - 1 {
            if e[k] < 0.0 {
                return Some(format!("value at index {k} is negative"));
            }
            let allowed = e[k] - self.rho_t * (self.map)(e[k]);
            if e[k + 1] > allowed + 1e-12 * e[k].abs().max(1.0) {
                return Some(format!(
                    "recurrence fails at index {k}: {} > {allowed}",
                    e[k + 1]
                ));
            }
        }
        None
    }

    /// Check a nonincreasing step function obeying the contraction
    /// recurrence `E_{k+1} <= E_k (1 - rho_T F^{-1}(E_k))` against the
    /// explicit bound `T F(1 / psi_r^{-1}((t - T) rho_T / T0))` at the
    /// sample times `k T`.
    pub fn discretcont_bound(&self, env: &EnvelopeSpec, ehat: &[f64]) -> Result<BoundReport> {
        let func = self.growth.ok_or_else(|| {
            Error::config("explicit bound needs an instance built from a ratio map".to_string())
        })?;
        if (env.horizon - self.horizon).abs() > 1e-12 * self.horizon {
            return Err(Error::config(format!(
                "envelope horizon {} does not match the instance step {}",
                env.horizon, self.horizon
            )));
        }
        if (env.gain - self.rho_t).abs() > 1e-12 * self.rho_t {
            return Err(Error::config(format!(
                "envelope gain {} does not match the instance gain {}",
                env.gain, self.rho_t
            )));
        }
        if ehat.is_empty() {
            return Err(Error::config("empty sequence".to_string()));
        }
        let kernel = DecayKernel::from_map(func, env)?;
        let threshold_time = self.horizon + kernel.z0() * env.time_scale / self.rho_t;
        if let Some(detail) = self.bound_premise_failure(&func, ehat) {
            return Ok(BoundReport {
                premise_ok: false,
                premise_detail: Some(detail),
                threshold_time,
                first_holding_time: None,
                max_ratio: None,
                entries: Vec::new(),
            });
        }
        let mut entries = Vec::with_capacity(ehat.len());
        let mut max_ratio: Option<f64> = None;
        for (k, &value) in ehat.iter().enumerate() {
            let t = self.horizon * k as f64;
            let mut bound = None;
            let mut ratio = None;
            if t >= threshold_time * (1.0 - 1e-12) {
                let arg = ((t - self.horizon) * self.rho_t / env.time_scale).max(kernel.z0());
                let z = kernel.psi_inverse(arg)?;
                let b = self.horizon * kernel.map_eval(1.0 / z)?;
                if b > 0.0 {
                    ratio = Some(value / b);
                    max_ratio = Some(max_ratio.map_or(value / b, |m: f64| m.max(value / b)));
                }
                bound = Some(b);
            }
            entries.push(BoundEntry { index: k, time: t, value, bound, ratio });
        }
        let mut first_holding_time = None;
        let mut all_later_hold = true;
        for entry in entries.iter().rev() {
            if let Some(b) = entry.bound {
                if entry.value <= b * (1.0 + 1e-9) {
                    if all_later_hold {
                        first_holding_time = Some(entry.time);
                    }
                } else {
                    all_later_hold = false;
                    first_holding_time = None;
                }
            }
        }
        Ok(BoundReport {
            premise_ok: true,
            premise_detail: None,
            threshold_time,
            first_holding_time,
            max_ratio,
            entries,
        })
    }

    fn bound_premise_failure(&self, func: &GrowthFunc, ehat: &[f64]) -> Option<String> {
        if !(ehat[0] < self.delta) {
            return Some(format!(
                "first value {} is not below the monotonicity radius {}",
                ehat[0], self.delta
            ));
        }
        for k in 0..ehat.len() - 1 {
            if ehat[k] < 0.0 {
                return Some(format!("value at index {k} is negative"));
            }
            if ehat[k + 1] > ehat[k] {
                return Some(format!("sequence increases at index {k}"));
            }
            let inv = if ehat[k] == 0.0 {
                0.0
            } else {
                match func.inverse(ehat[k]) {
                    Ok(u) => u,
                    Err(_) => {
                        return Some(format!(
                            "value {} at index {k} is outside the ratio map's range",
                            ehat[k]
                        ))
                    }
                }
            };
            let allowed = ehat[k] * (1.0 - self.rho_t * inv);
            if ehat[k + 1] > allowed + 1e-12 * ehat[k].abs().max(1.0) {
                return Some(format!(
                    "contraction recurrence fails at index {k}: {} > {allowed}",
                    ehat[k + 1]
                ));
            }
        }
        None
    }
}

/// Randomized instances `M(v) = c v^a`, `a` drawn from [1, 3] and `c`
/// scaled so the step map keeps a positive margin on the drawn radius.
/// Reproducible from the seed.
pub fn sample_instances(seed: u64, count: usize) -> Vec<SequenceInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a: f64 = rng.gen_range(1.0..=3.0);
        let rho: f64 = rng.gen_range(0.05..=0.5);
        let radius: f64 = rng.gen_range(0.5..=2.0);
        let head: f64 = rng.gen_range(0.2..=0.9);
        let c = head / (rho * a * radius.powf(a - 1.0));
        let e0 = rng.gen_range(0.05..=0.8) * radius;
        let label = format!("{c:.3} v^{a:.3}");
        if let Ok(inst) =
            SequenceInstance::new(e0, rho, 1.0, move |v: f64| c * v.max(0.0).powf(a), &label)
        {
            out.push(inst);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad_instance() -> SequenceInstance {
        SequenceInstance::new(1.0, 0.1, 1.0, |v: f64| v * v, "v^2").unwrap()
    }

    #[test]
    fn euler_oracles() {
        let (flat, esc) = SequenceInstance::new(1.0, 0.5, 1.0, |_| 0.0, "0")
            .unwrap()
            .euler_sequence(5);
        assert!(esc.is_none());
        assert!(flat.iter().all(|&v| v == 1.0));

        let (quad, esc) = quad_instance().euler_sequence(2);
        assert!(esc.is_none());
        assert_relative_eq!(quad[1], 0.9, max_relative = 1e-14);
        assert_relative_eq!(quad[2], 0.819, max_relative = 1e-14);

        let (geo, esc) = SequenceInstance::new(1.0, 0.5, 1.0, |v| v, "v")
            .unwrap()
            .euler_sequence(20);
        assert!(esc.is_none());
        for (k, &v) in geo.iter().enumerate() {
            assert_eq!(v, 2f64.powi(-(k as i32)));
        }
    }

    #[test]
    fn euler_escape_is_flagged() {
        // M(0) > 0 drives the recurrence below zero
        let inst = SequenceInstance::new(0.3, 0.5, 1.0, |v| 0.5 + v, "0.5 + v").unwrap();
        let (vals, esc) = inst.euler_sequence(3);
        assert_eq!(esc, Some(1));
        assert!(vals[1] < 0.0);
    }

    #[test]
    fn delta_scan_matches_known_radii() {
        // step map x - 0.1 x^2 increasing on the whole scanned range
        assert_relative_eq!(quad_instance().delta(), 2.0, max_relative = 1e-12);
        // x - x^2 turns at 0.5
        let inst = SequenceInstance::new(0.3, 1.0, 1.0, |v: f64| v * v, "v^2").unwrap();
        assert_relative_eq!(inst.delta(), 0.5, epsilon = 2e-3);
        // start at or past the radius is rejected
        assert!(SequenceInstance::new(0.6, 1.0, 1.0, |v: f64| v * v, "v^2").is_err());
    }

    #[test]
    fn ode_oracles() {
        let flat = SequenceInstance::new(1.0, 0.5, 1.0, |_| 0.0, "0").unwrap();
        assert_relative_eq!(flat.ode_solution(5.0).unwrap(), 1.0, max_relative = 1e-12);

        // rate rho_T / T = 1: y(t) = e^{-t}
        let lin = SequenceInstance::new(1.0, 0.5, 0.5, |v| v, "v").unwrap();
        for t in [0.25, 1.0, 3.0] {
            assert_relative_eq!(lin.ode_solution(t).unwrap(), (-t).exp(), max_relative = 1e-9);
        }

        // y' = -y^2: y(t) = E0 / (1 + E0 t)
        let quad = SequenceInstance::new(0.3, 1.0, 1.0, |v: f64| v * v, "v^2").unwrap();
        for t in [0.5, 2.0, 10.0] {
            assert_relative_eq!(
                quad.ode_solution(t).unwrap(),
                0.3 / (1.0 + 0.3 * t),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn ode_matches_kernel_characterization() {
        // M(v) = v inv(F)(v) with F = identity: y' = -(rho/T) y^2, and the
        // kernel built from F satisfies K_r(y(t)) = t / T0 with r = E0.
        let inst = SequenceInstance::from_growth(0.1, 0.5, 1.0, GrowthFunc::Identity).unwrap();
        let env = EnvelopeSpec::new(1.0, inst.time_scale(), 0.5, 0.1, 1.0).unwrap();
        let kernel = DecayKernel::from_map(GrowthFunc::Identity, &env).unwrap();
        for t in [1.0, 5.0, 40.0] {
            let y = inst.ode_solution(t).unwrap();
            assert_relative_eq!(y, 1.0 / (10.0 + 0.5 * t), max_relative = 1e-9);
            assert_relative_eq!(
                kernel.k_r(y).unwrap(),
                t / inst.time_scale(),
                max_relative = 1e-8
            );
        }
    }

    #[test]
    fn chain_holds_with_equality_and_with_slack() {
        let inst = quad_instance();
        let (euler, esc) = inst.euler_sequence(30);
        assert!(esc.is_none());
        let report = inst.check_chain(&euler).unwrap();
        assert!(report.passed());
        for e in &report.entries {
            assert_eq!(e.euler_slack, 0.0);
            assert!(e.ode_slack >= -1e-12);
        }

        let shaved: Vec<f64> = euler
            .iter()
            .enumerate()
            .map(|(k, &v)| if k == 0 { v } else { v * (1.0 - 1e-3) })
            .collect();
        let report = inst.check_chain(&shaved).unwrap();
        assert!(report.passed());
        assert!(report.entries[1..].iter().all(|e| e.euler_slack > 0.0));
    }

    #[test]
    fn chain_premise_failures() {
        let inst = quad_instance();
        let increasing = inst.check_chain(&[0.5, 0.6]).unwrap();
        assert!(!increasing.premise_ok);
        assert!(increasing.premise_detail.is_some());
        let too_high = inst.check_chain(&[1.5, 0.5]).unwrap();
        assert!(!too_high.premise_ok);
    }

    #[test]
    fn chain_sweep_over_sampled_instances() {
        let instances = sample_instances(7, 200);
        assert_eq!(instances.len(), 200);
        for inst in &instances {
            let (euler, esc) = inst.euler_sequence(25);
            assert!(esc.is_none(), "escaped: {inst:?}");
            let report = inst.check_chain(&euler).unwrap();
            assert!(report.passed(), "chain failed: {inst:?}");
        }
        // same seed reproduces the same draw
        let again = sample_instances(7, 1);
        assert_eq!(again[0].e0(), instances[0].e0());
        assert_eq!(again[0].delta(), instances[0].delta());
    }

    #[test]
    fn explicit_bound_identity_ratio() {
        // F identity: the bound at t = kT is 1 / (4k - 1.5) in closed form.
        let inst = SequenceInstance::from_growth(0.1, 4.0, 2.0, GrowthFunc::Identity).unwrap();
        let env = EnvelopeSpec::new(2.0, 0.5, 4.0, 0.1, 0.5).unwrap();
        let mut ehat = vec![0.1];
        for _ in 0..100 {
            let e = *ehat.last().unwrap();
            ehat.push(e * (1.0 - 4.0 * e));
        }
        let report = inst.discretcont_bound(&env, &ehat).unwrap();
        assert!(report.premise_ok);
        assert_relative_eq!(report.threshold_time, 3.25, max_relative = 1e-9);
        assert_eq!(report.first_holding_time, Some(4.0));
        assert!(report.max_ratio.unwrap() < 1.0);
        for k in [2usize, 10, 50] {
            let b = report.entries[k].bound.unwrap();
            assert_relative_eq!(b, 1.0 / (4.0 * k as f64 - 1.5), max_relative = 1e-7);
        }

        // the power parametrization with unit exponent is the same map
        let power = GrowthFunc::power(1.0, 1.0).unwrap();
        let inst2 = SequenceInstance::from_growth(0.1, 4.0, 2.0, power).unwrap();
        let report2 = inst2.discretcont_bound(&env, &ehat).unwrap();
        for (a, b) in report.entries.iter().zip(&report2.entries) {
            match (a.bound, b.bound) {
                (Some(x), Some(y)) => assert_relative_eq!(x, y, max_relative = 1e-12),
                (x, y) => assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn explicit_bound_trivial_and_failing_inputs() {
        let inst = SequenceInstance::from_growth(0.1, 4.0, 2.0, GrowthFunc::Identity).unwrap();
        let env = EnvelopeSpec::new(2.0, 0.5, 4.0, 0.1, 0.5).unwrap();

        let zeros = vec![0.0; 30];
        let report = inst.discretcont_bound(&env, &zeros).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_ratio, Some(0.0));

        let rising = inst.discretcont_bound(&env, &[0.05, 0.08]).unwrap();
        assert!(!rising.premise_ok);

        // mismatched step length is a configuration error
        let bad_env = EnvelopeSpec::new(1.0, 0.5, 4.0, 0.1, 0.5).unwrap();
        assert!(inst.discretcont_bound(&bad_env, &zeros).is_err());

        // instances without a ratio map cannot run the bound
        let plain = quad_instance();
        assert!(plain.discretcont_bound(&env, &zeros).is_err());
    }

    #[test]
    fn reports_round_trip_as_json() {
        let inst = quad_instance();
        let (euler, _) = inst.euler_sequence(5);
        let report = inst.check_chain(&euler).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: ChainReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
