//! Growth maps multiplying the weight inside the decay composites.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect_root;

/// Increasing maps on `[0, inf)` used as growth factors and as raw kernel
/// maps. Every variant evaluates in log coordinates as well, so composites
/// stay usable where plain values would under- or overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunc {
    Identity,
    /// Constant factor; increasing information absent, not invertible.
    Constant { value: f64 },
    /// `scale * x^exponent` with positive scale and exponent.
    Power { scale: f64, exponent: f64 },
    /// `exp(-scale * x^(-exponent))`: vanishes to all orders at 0 and
    /// saturates at 1. With `exponent = 1/(2 beta)` this is the map whose
    /// inverse produces `(scale / ln(1+t))^(2 beta)` shapes.
    ExpNegPower { scale: f64, exponent: f64 },
}

impl GrowthFunc {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && exponent > 0.0) {
            return Err(Error::config(format!(
                "power growth needs positive scale and exponent, got {scale}, {exponent}"
            )));
        }
        Ok(GrowthFunc::Power { scale, exponent })
    }

    pub fn exp_neg_power(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && exponent > 0.0) {
            return Err(Error::config(format!(
                "exp_neg_power growth needs positive scale and exponent, got {scale}, {exponent}"
            )));
        }
        Ok(GrowthFunc::ExpNegPower { scale, exponent })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            GrowthFunc::Identity => x,
            GrowthFunc::Constant { value } => *value,
            GrowthFunc::Power { scale, exponent } => scale * x.powf(*exponent),
            GrowthFunc::ExpNegPower { scale, exponent } => {
                if x == 0.0 {
                    0.0
                } else {
                    (-scale * x.powf(-exponent)).exp()
                }
            }
        }
    }

    /// `ln eval(exp(s))` as an analytic function of `s = ln x`, total on the
    /// whole real line.
    pub fn log_eval_from_log(&self, s: f64) -> f64 {
        match self {
            GrowthFunc::Identity => s,
            GrowthFunc::Constant { value } => value.ln(),
            GrowthFunc::Power { scale, exponent } => scale.ln() + exponent * s,
            GrowthFunc::ExpNegPower { scale, exponent } => -scale * (-exponent * s).exp(),
        }
    }

    /// `ln eval(x)` for `x > 0` (`-inf` at 0 except for constants).
    pub fn log_eval(&self, x: f64) -> f64 {
        if x == 0.0 {
            return match self {
                GrowthFunc::Constant { value } => value.ln(),
                _ => f64::NEG_INFINITY,
            };
        }
        self.log_eval_from_log(x.ln())
    }

    /// Supremum of the range (1 for the saturating family, `+inf` for the
    /// unbounded ones, the value itself for constants).
    pub fn range_sup(&self) -> f64 {
        match self {
            GrowthFunc::Identity | GrowthFunc::Power { .. } => f64::INFINITY,
            GrowthFunc::Constant { value } => *value,
            GrowthFunc::ExpNegPower { .. } => 1.0,
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        !matches!(self, GrowthFunc::Constant { .. })
    }

    /// Solve `ln eval(x) = w` by bisection in `ln x`. Errors when the map is
    /// not invertible or `w` lies outside the closure of the log-range.
    pub fn inverse_from_log(&self, w: f64) -> Result<f64> {
        if !self.is_strictly_increasing() {
            return Err(Error::domain("constant map has no inverse".to_string()));
        }
        if let GrowthFunc::ExpNegPower { .. } = self {
            if w >= 0.0 {
                return Err(Error::domain(format!(
                    "map saturates below 1, not invertible at log-value {w}"
                )));
            }
        }
        if !w.is_finite() {
            return Err(Error::domain(format!("log-target {w} is not finite")));
        }
        // Expanding bracket in s = ln x; the log form is total and monotone.
        let phi = |s: f64| self.log_eval_from_log(s) - w;
        let mut lo = -1.0;
        let mut hi = 1.0;
        let mut width = 2.0;
        for _ in 0..64 {
            if phi(hi) >= 0.0 {
                break;
            }
            hi += width;
            width *= 2.0;
        }
        width = 2.0;
        for _ in 0..64 {
            if phi(lo) <= 0.0 {
                break;
            }
            lo -= width;
            width *= 2.0;
        }
        let s = bisect_root(phi, lo, hi, 0.0)?;
        Ok(s.exp())
    }

    /// Functional inverse: solve `eval(x) = y` for `y` in the range.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !self.is_strictly_increasing() {
            return Err(Error::domain("constant map has no inverse".to_string()));
        }
        if y < 0.0 {
            return Err(Error::domain(format!("inverse argument {y} is negative")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y >= self.range_sup() && !matches!(self, GrowthFunc::Identity | GrowthFunc::Power { .. })
        {
            return Err(Error::domain(format!("{y} is at or above the range supremum")));
        }
        self.inverse_from_log(y.ln())
    }
}

/// How a growth map enters the decay composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthKind {
    /// Growth observed on a weak-norm ratio: the factor applied to the
    /// weight is the map composed with `x^(1/theta - 1)`.
    WeakNormRatio,
    /// Growth observed directly on the energy ratio: the factor is the map
    /// itself.
    EnergyRatio,
    /// No growth factor; the composite is the weight alone.
    Identity,
}

/// A growth map together with the way it enters the composite and, for the
/// weak-norm flavor, the interpolation exponent `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpec {
    kind: GrowthKind,
    func: GrowthFunc,
    theta: f64,
}

impl GrowthSpec {
    /// Weak-norm flavor: the factor is `func(x^(1/theta - 1))` with
    /// `theta` strictly inside `(0, 1)`.
    pub fn weak_norm_ratio(func: GrowthFunc, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::config(format!("theta must lie in (0, 1), got {theta}")));
        }
        Ok(GrowthSpec { kind: GrowthKind::WeakNormRatio, func, theta })
    }

    /// Energy-ratio flavor: the factor is `func(x)` directly. The map must
    /// be strictly increasing (a constant carries no ratio information).
    pub fn energy_ratio(func: GrowthFunc) -> Result<Self> {
        if !func.is_strictly_increasing() {
            return Err(Error::config(
                "energy-ratio growth must be strictly increasing".to_string(),
            ));
        }
        Ok(GrowthSpec { kind: GrowthKind::EnergyRatio, func, theta: 0.5 })
    }

    /// No growth factor at all; the composite reduces to the weight.
    pub fn identity() -> Self {
        GrowthSpec {
            kind: GrowthKind::Identity,
            func: GrowthFunc::Constant { value: 1.0 },
            theta: 0.5,
        }
    }

    pub fn kind(&self) -> GrowthKind {
        self.kind
    }

    pub fn func(&self) -> &GrowthFunc {
        &self.func
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Exponent `1/theta - 1` of the weak-norm composition.
    pub fn theta_exponent(&self) -> f64 {
        1.0 / self.theta - 1.0
    }

    /// The weak-norm composed map `func(x^(1/theta - 1))`; only defined for
    /// the weak-norm flavor.
    pub fn theta_composed(&self, x: f64) -> Result<f64> {
        if self.kind != GrowthKind::WeakNormRatio {
            return Err(Error::config(
                "theta composition only applies to the weak-norm flavor".to_string(),
            ));
        }
        if x < 0.0 {
            return Err(Error::domain(format!("argument {x} is negative")));
        }
        Ok(self.func.eval(x.powf(self.theta_exponent())))
    }

    /// Log of the growth factor at `u = exp(s)`; the factor the composite
    /// multiplies onto the weight.
    pub(crate) fn factor_log_from_log(&self, s: f64) -> f64 {
        match self.kind {
            GrowthKind::WeakNormRatio => self.func.log_eval_from_log(self.theta_exponent() * s),
            GrowthKind::EnergyRatio => self.func.log_eval_from_log(s),
            GrowthKind::Identity => 0.0,
        }
    }

    /// Spectral exponents `(alpha, alpha - 1/2)` with
    /// `alpha = (theta - 1/2)/theta`: the pair of operator powers defining
    /// the weak norm the weak-norm flavor observes, one per component.
    pub fn weak_exponents(&self) -> (f64, f64) {
        let alpha = (self.theta - 0.5) / self.theta;
        (alpha, alpha - 0.5)
    }

    /// Sampled check that `x -> func(x)/x` is nondecreasing on `(0, 1)`,
    /// the premise of the linear-decay multiplier path.
    pub fn ratio_over_x_nondecreasing(&self, samples: usize) -> bool {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=samples {
            let x = i as f64 / (samples as f64 + 1.0);
            let v = self.func.log_eval(x) - x.ln();
            if v < prev - 1e-12 * prev.abs().max(1.0) {
                return false;
            }
            prev = v;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_composition_examples() {
        // theta = 1/2 leaves the argument unchanged
        let gs = GrowthSpec::weak_norm_ratio(GrowthFunc::Identity, 0.5).unwrap();
        assert_relative_eq!(gs.theta_composed(0.37).unwrap(), 0.37, max_relative = 1e-14);
        // exponent 2 at theta = 1/3
        let gs = GrowthSpec::weak_norm_ratio(GrowthFunc::Identity, 1.0 / 3.0).unwrap();
        assert_relative_eq!(gs.theta_composed(4.0).unwrap(), 16.0, max_relative = 1e-12);
        // constant growth composes to itself
        let gs =
            GrowthSpec::weak_norm_ratio(GrowthFunc::Constant { value: 1.0 }, 0.25).unwrap();
        assert_eq!(gs.theta_composed(0.9).unwrap(), 1.0);
    }

    #[test]
    fn theta_validation() {
        assert!(GrowthSpec::weak_norm_ratio(GrowthFunc::Identity, 0.0).is_err());
        assert!(GrowthSpec::weak_norm_ratio(GrowthFunc::Identity, 1.0).is_err());
        assert!(GrowthSpec::weak_norm_ratio(GrowthFunc::Identity, 0.5).is_ok());
    }

    #[test]
    fn weak_exponents_at_half() {
        let gs = GrowthSpec::weak_norm_ratio(GrowthFunc::Constant { value: 1.0 }, 0.5).unwrap();
        let (a1, a2) = gs.weak_exponents();
        assert_eq!(a1, 0.0);
        assert_eq!(a2, -0.5);
    }

    #[test]
    fn inverse_round_trips() {
        let maps = [
            GrowthFunc::Identity,
            GrowthFunc::power(2.0, 1.7).unwrap(),
            GrowthFunc::exp_neg_power(2.0, 0.5).unwrap(),
        ];
        for m in maps {
            for i in 1..=40 {
                let x = i as f64 / 10.0;
                let y = m.eval(x);
                let back = m.inverse(y).unwrap();
                assert_relative_eq!(back, x, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn exp_map_inverse_matches_closed_form() {
        // exp(-c x^(-e)) = y  =>  x = (c / ln(1/y))^(1/e)
        let c = 2.0;
        let e = 0.5;
        let m = GrowthFunc::exp_neg_power(c, e).unwrap();
        for t in [1.0f64, 10.0, 1e4, 1e8] {
            let y = 1.0 / (1.0 + t);
            let expected = (c / (1.0 + t).ln()).powf(1.0 / e);
            let got = m.inverse(y).unwrap();
            assert_relative_eq!(got, expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn saturating_map_rejects_values_at_or_above_one() {
        let m = GrowthFunc::exp_neg_power(1.0, 1.0).unwrap();
        assert!(m.inverse(1.0).is_err());
        assert!(m.inverse(1.5).is_err());
        assert!(m.inverse(0.5).is_ok());
    }

    #[test]
    fn constant_map_has_no_inverse() {
        let m = GrowthFunc::Constant { value: 2.0 };
        assert!(m.inverse(1.0).is_err());
        assert!(GrowthSpec::energy_ratio(m).is_err());
    }

    #[test]
    fn log_eval_consistency() {
        let maps = [
            GrowthFunc::Identity,
            GrowthFunc::power(0.5, 2.0).unwrap(),
            GrowthFunc::exp_neg_power(1.0, 0.25).unwrap(),
        ];
        for m in maps {
            for i in 1..=20 {
                let x = i as f64 * 0.3;
                assert_relative_eq!(m.log_eval(x), m.eval(x).ln(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ratio_premise_detects_violation() {
        // exp(-c x^(-e))/x decreases near 1 when c*e < 1
        let gs = GrowthSpec::energy_ratio(GrowthFunc::exp_neg_power(0.5, 0.5).unwrap()).unwrap();
        assert!(!gs.ratio_over_x_nondecreasing(1000));
        // and is nondecreasing when c*e >= 1
        let gs = GrowthSpec::energy_ratio(GrowthFunc::exp_neg_power(2.0, 0.5).unwrap()).unwrap();
        assert!(gs.ratio_over_x_nondecreasing(1000));
        // identity map: ratio is constant
        let gs = GrowthSpec::energy_ratio(GrowthFunc::Identity).unwrap();
        assert!(gs.ratio_over_x_nondecreasing(1000));
    }

    #[test]
    fn spec_serialization_round_trips() {
        let gs =
            GrowthSpec::weak_norm_ratio(GrowthFunc::power(1.0, 2.0).unwrap(), 0.25).unwrap();
        let text = serde_json::to_string(&gs).unwrap();
        let back: GrowthSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(gs, back);
    }
}
