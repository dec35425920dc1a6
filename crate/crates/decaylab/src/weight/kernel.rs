//! The decay kernel built from a strictly increasing composite map `m`:
//! the integral `K_r`, the shifted map `psi_r`, and their inverses.
//!
//! With `w = ln(1/v)` the kernel integral becomes
//! `K_r(tau) = integral of dw / m^{-1}(exp(-w))` from `ln(1/r)` to
//! `ln(1/tau)`, which stays well-conditioned where `v` itself underflows
//! (composites with exponentially flat factors pushed to very large times).
//! Cumulative values are cached on a fixed geometric ladder of breakpoints,
//! so repeated `psi` evaluations and the bisection inside `psi_inverse` pay
//! only for the final partial panel. Panel values depend on the panel
//! bounds alone, never on query order, so results are reproducible.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect_root, integrate};

use super::growth::{GrowthFunc, GrowthSpec};
use super::system::WeightSystem;

/// Horizon, time scale, gain, and kernel radius shared by the decay bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    /// Observability horizon (the recurrence step length).
    pub horizon: f64,
    /// Time scale dividing `t - horizon` in the envelopes.
    pub time_scale: f64,
    /// Per-step contraction gain of the recurrence.
    pub gain: f64,
    /// Kernel radius; the upper limit of the kernel integral.
    pub r: f64,
    /// Upper bound the radius must stay below.
    pub eta: f64,
}

impl EnvelopeSpec {
    pub fn new(horizon: f64, time_scale: f64, gain: f64, r: f64, eta: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::config(format!("horizon must be positive, got {horizon}")));
        }
        if !(time_scale > 0.0 && time_scale.is_finite()) {
            return Err(Error::config(format!("time scale must be positive, got {time_scale}")));
        }
        if !(gain > 0.0 && gain.is_finite()) {
            return Err(Error::config(format!("gain must be positive, got {gain}")));
        }
        if !(0.0 < r && r < eta) {
            return Err(Error::config(format!("need 0 < r < eta, got r={r}, eta={eta}")));
        }
        Ok(EnvelopeSpec { horizon, time_scale, gain, r, eta })
    }
}

/// The composite map under the kernel: either the weight times a growth
/// factor, or a raw increasing map.
#[derive(Debug)]
enum KernelMap {
    Weighted { ws: WeightSystem, gs: GrowthSpec },
    Raw(GrowthFunc),
}

impl KernelMap {
    /// `ln m(exp(s))`, saturating to `+inf` at the weight's domain end.
    fn log_eval_from_log(&self, s: f64) -> f64 {
        match self {
            KernelMap::Weighted { ws, gs } => {
                ws.log_weight_f_saturating(s.exp()) + gs.factor_log_from_log(s)
            }
            KernelMap::Raw(func) => func.log_eval_from_log(s),
        }
    }

    /// Supremum of `ln m` over the domain.
    fn log_range_sup(&self) -> f64 {
        match self {
            KernelMap::Weighted { .. } => f64::INFINITY,
            KernelMap::Raw(func) => func.range_sup().ln(),
        }
    }

    fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::domain(format!("map argument {u} is negative")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        match self {
            KernelMap::Weighted { ws, gs } => {
                Ok(ws.weight_f(u)? * gs.factor_log_from_log(u.ln()).exp())
            }
            KernelMap::Raw(func) => Ok(func.eval(u)),
        }
    }

    /// Solve `ln m(u) = w` by bisection in `ln u`.
    fn inverse_from_log(&self, w: f64) -> Result<f64> {
        if w.is_nan() {
            return Err(Error::domain("log-target is NaN".to_string()));
        }
        if !(w < self.log_range_sup()) {
            return Err(Error::domain(format!(
                "log-target {w} is at or above the composite's log-range supremum"
            )));
        }
        let phi = |s: f64| self.log_eval_from_log(s) - w;
        let mut hi = match self {
            KernelMap::Weighted { ws, .. } => ws.f_domain_sup().ln(),
            KernelMap::Raw(_) => {
                let mut hi = 1.0;
                let mut width = 2.0;
                for _ in 0..64 {
                    if phi(hi) >= 0.0 {
                        break;
                    }
                    hi += width;
                    width *= 2.0;
                }
                hi
            }
        };
        if !(phi(hi) >= 0.0) {
            return Err(Error::numerical(format!("no upper bracket for log-target {w}")));
        }
        let mut lo = hi - 1.0;
        let mut width = 2.0;
        for _ in 0..96 {
            if phi(lo) <= 0.0 {
                break;
            }
            lo -= width;
            width *= 2.0;
        }
        if hi == lo {
            hi += 1.0;
        }
        let s = bisect_root(phi, lo, hi, 0.0)?;
        Ok(s.exp())
    }
}

/// Cached cumulative kernel values on the geometric breakpoint ladder.
#[derive(Debug, Default)]
struct Ladder {
    /// `prefix[k]` = integral from the base point to breakpoint `k`.
    prefix: Vec<f64>,
}

const LADDER_FIRST_WIDTH: f64 = 0.25;
const LADDER_GROWTH: f64 = 1.6;

fn ladder_point(w_lo: f64, k: usize) -> f64 {
    w_lo + LADDER_FIRST_WIDTH * (LADDER_GROWTH.powi(k as i32) - 1.0) / (LADDER_GROWTH - 1.0)
}

/// Kernel and shifted map for one composite and one radius.
#[derive(Debug)]
pub struct DecayKernel {
    map: KernelMap,
    r: f64,
    /// `ln(1/r)`, the lower end of the log-substituted integral.
    w_lo: f64,
    /// Fixed point `1 / m^{-1}(r)` of the shifted map.
    z0: f64,
    ladder: Mutex<Ladder>,
}

impl DecayKernel {
    /// Kernel of the weight/growth composite.
    pub fn new(ws: WeightSystem, gs: GrowthSpec, env: &EnvelopeSpec) -> Result<Self> {
        Self::build(KernelMap::Weighted { ws, gs }, env)
    }

    /// Kernel of a raw strictly increasing map.
    pub fn from_map(func: GrowthFunc, env: &EnvelopeSpec) -> Result<Self> {
        if !func.is_strictly_increasing() {
            return Err(Error::config("kernel map must be strictly increasing".to_string()));
        }
        Self::build(KernelMap::Raw(func), env)
    }

    fn build(map: KernelMap, env: &EnvelopeSpec) -> Result<Self> {
        let r = env.r;
        let u_r = map.inverse_from_log(r.ln()).map_err(|e| {
            Error::config(format!("radius {r} is outside the composite's range: {e}"))
        })?;
        Ok(DecayKernel { map, r, w_lo: -r.ln(), z0: 1.0 / u_r, ladder: Mutex::new(Ladder::default()) })
    }

    /// Left endpoint of the shifted map's domain; its fixed point.
    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The composite map itself.
    pub fn map_eval(&self, u: f64) -> Result<f64> {
        self.map.eval(u)
    }

    /// Inverse of the composite map.
    pub fn map_inverse(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::domain(format!("inverse argument {v} is negative")));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        self.map.inverse_from_log(v.ln())
    }

    pub(crate) fn map_inverse_from_log(&self, w: f64) -> Result<f64> {
        self.map.inverse_from_log(w)
    }

    fn integrand(&self, w: f64) -> f64 {
        match self.map.inverse_from_log(-w) {
            Ok(u) => 1.0 / u,
            Err(_) => f64::NAN,
        }
    }

    /// Kernel integral with the substituted upper limit `w_t = ln(1/tau)`.
    fn k_r_from_w(&self, w_t: f64) -> Result<f64> {
        if w_t <= self.w_lo {
            return Ok(0.0);
        }
        let mut full = 0usize;
        while ladder_point(self.w_lo, full + 1) <= w_t {
            full += 1;
        }
        let cached = {
            let mut ladder = self.ladder.lock().unwrap();
            if ladder.prefix.is_empty() {
                ladder.prefix.push(0.0);
            }
            while ladder.prefix.len() <= full {
                let k = ladder.prefix.len() - 1;
                let (a, b) = (ladder_point(self.w_lo, k), ladder_point(self.w_lo, k + 1));
                let (panel, _) = integrate(|w| self.integrand(w), a, b, 1e-12, 1e-9)?;
                let last = *ladder.prefix.last().unwrap();
                ladder.prefix.push(last + panel);
            }
            ladder.prefix[full]
        };
        let (partial, _) =
            integrate(|w| self.integrand(w), ladder_point(self.w_lo, full), w_t, 1e-12, 1e-9)?;
        let total = cached + partial;
        if total.is_nan() {
            return Err(Error::numerical("kernel integrand left the composite's range".to_string()));
        }
        Ok(total)
    }

    /// `K_r(tau)`: the kernel integral from `tau` up to `r`. Strictly
    /// decreasing in `tau`, zero at `tau = r`.
    pub fn k_r(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!(
                "kernel argument {tau} must be positive (integrand may be non-integrable at 0)"
            )));
        }
        if tau > self.r * (1.0 + 1e-12) {
            return Err(Error::domain(format!("kernel argument {tau} exceeds the radius {}", self.r)));
        }
        self.k_r_from_w(-tau.min(self.r).ln())
    }

    /// The shifted map `psi(z) = z + K_r(m(1/z))` for `z >= z0`.
    pub fn psi(&self, z: f64) -> Result<f64> {
        if !(z >= self.z0 * (1.0 - 1e-9)) {
            return Err(Error::domain(format!(
                "shifted map argument {z} is below the left endpoint {}",
                self.z0
            )));
        }
        let z = z.max(self.z0);
        let w_t = -self.map.log_eval_from_log(-z.ln());
        Ok(z + self.k_r_from_w(w_t.max(self.w_lo))?)
    }

    /// Inverse of the shifted map by bracketed bisection; the bracket
    /// `[z0, w]` is valid because `psi(z) >= z`.
    pub fn psi_inverse(&self, w: f64) -> Result<f64> {
        if !(w >= self.z0 * (1.0 - 1e-12)) {
            return Err(Error::domain(format!(
                "shifted-map value {w} is below the fixed point {}",
                self.z0
            )));
        }
        if w <= self.z0 {
            return Ok(self.z0);
        }
        bisect_root(
            |z| match self.psi(z) {
                Ok(v) => v - w,
                Err(_) => f64::NAN,
            },
            self.z0,
            w.max(self.z0),
            0.0,
        )
    }
}
