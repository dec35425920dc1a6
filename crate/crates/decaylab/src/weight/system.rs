//! The convex transform of a damping law, its conjugate, and the optimal
//! weight derived from them.
//!
//! For a law with growth function `g` the transform is
//! `R(x) = sqrt(x) g(sqrt(x))` on `[0, r0^2]`, extended by `+inf` outside.
//! Its conjugate is `R*(y) = sup_x { x y - R(x) }`, the normalized conjugate
//! is `L(y) = R*(y)/y`, and the weight is `f(s) = L^{-1}(s / beta)`, a
//! strictly increasing map from `[0, beta r0^2)` onto `[0, inf)`.
//!
//! Everything is evaluated through the parametrization `y = R'(x)`: on the
//! strictly convex part the conjugate's maximizer is interior and
//! `L(R'(x)) = x - R(x)/R'(x)`, so a single bisection in `x` answers every
//! query. The ratio `R(x)/R'(x)` and `ln R'(x)` are computed from the law's
//! logarithmic derivative, which keeps both meaningful deep into the region
//! where `R` itself underflows (laws flat to all orders at 0).

use crate::damping::{r_strictly_convex, DampingLaw};
use crate::error::{Error, Result};
use crate::numerics::{bisect_root, Extended};

/// Number of rows in the cached monotone bracket table.
const TABLE_ROWS: usize = 961;
/// Base-2 logarithmic span of the table below `r0^2`.
const TABLE_SPAN_LOG2: f64 = 60.0;

/// Convex transform, conjugate, and weight for one damping law at one `beta`.
#[derive(Debug, Clone)]
pub struct WeightSystem {
    law: DampingLaw,
    beta: f64,
    r0sq: f64,
    /// Monotone sample tables on a geometric grid of `(0, r0^2]`, used to
    /// bracket the bisections and to certify monotonicity at construction.
    xs: Vec<f64>,
    ls: Vec<f64>,
    log_rps: Vec<f64>,
    /// `L(R'(r0^2))`: targets above this are answered by the boundary
    /// (affine) part of the conjugate.
    l_split: f64,
    /// `R(r0^2)` and `ln R'(r0^2)`.
    r_top: f64,
    log_rp_top: f64,
}

/// `L(R'(x)) = x - R(x)/R'(x)`, expressed through the law's logarithmic
/// derivative: `R(x)/R'(x) = 2x / (1 + sigma(sqrt(x)))`.
fn l_of(law: &DampingLaw, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let sigma = law.sigma(x.sqrt());
    x * (sigma - 1.0) / (sigma + 1.0)
}

/// `ln R'(x)` from `R'(x) = g(u) (1 + sigma(u)) / (2u)`, `u = sqrt(x)`.
fn log_rp_of(law: &DampingLaw, x: f64) -> f64 {
    let u = x.sqrt();
    law.log_g(u) + law.sigma(u).ln_1p() - (2.0 * u).ln()
}

impl WeightSystem {
    /// Build the system for the law's own convexity radius. Fails when the
    /// strict-convexity certificate does not pass (linear laws) or `beta`
    /// is not a positive finite number.
    pub fn new(law: DampingLaw, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("beta must be positive and finite, got {beta}")));
        }
        let r0 = law.r0();
        if !r_strictly_convex(&law, r0) {
            return Err(Error::config(format!(
                "transform of {} is not strictly convex on [0, {:e}]",
                law.family_name(),
                r0 * r0
            )));
        }
        let r0sq = r0 * r0;
        let mut xs = Vec::with_capacity(TABLE_ROWS);
        for i in 0..TABLE_ROWS {
            let e = -TABLE_SPAN_LOG2 * (1.0 - i as f64 / (TABLE_ROWS - 1) as f64);
            xs.push(r0sq * e.exp2());
        }
        xs[TABLE_ROWS - 1] = r0sq;
        let ls: Vec<f64> = xs.iter().map(|&x| l_of(&law, x)).collect();
        let log_rps: Vec<f64> = xs.iter().map(|&x| log_rp_of(&law, x)).collect();
        for i in 1..TABLE_ROWS {
            if !(ls[i] > ls[i - 1]) || !(log_rps[i] > log_rps[i - 1]) {
                return Err(Error::numerical(format!(
                    "weight tables not strictly increasing near x = {:e}",
                    xs[i]
                )));
            }
        }
        let l_split = ls[TABLE_ROWS - 1];
        let u = r0;
        let r_top = u * law.g(u);
        let log_rp_top = log_rps[TABLE_ROWS - 1];
        Ok(WeightSystem { law, beta, r0sq, xs, ls, log_rps, l_split, r_top, log_rp_top })
    }

    pub fn law(&self) -> &DampingLaw {
        &self.law
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn r0sq(&self) -> f64 {
        self.r0sq
    }

    /// Supremum of the weight's domain, `beta * r0^2`.
    pub fn f_domain_sup(&self) -> f64 {
        self.beta * self.r0sq
    }

    /// The transform `sqrt(x) g(sqrt(x))`, `+inf` beyond the convexity
    /// radius (tagged, never a floating non-finite).
    pub fn eval_r(&self, x: f64) -> Result<Extended> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("transform argument {x} is negative")));
        }
        if x > self.r0sq {
            return Ok(Extended::Infinite);
        }
        let u = x.sqrt();
        Ok(Extended::Finite(u * self.law.g(u)))
    }

    /// `R'(x)` on `[0, r0^2]` (0 at 0 for superlinear laws).
    pub fn r_prime(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.r0sq).contains(&x) {
            return Err(Error::domain(format!(
                "derivative argument {x} outside [0, {:e}]",
                self.r0sq
            )));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(log_rp_of(&self.law, x).exp())
    }

    /// Conjugate `R*(y) = sup_x { x y - R(x) }`, the supremum effectively
    /// over `[0, r0^2]`. Convex, nondecreasing, `R*(0) = 0`; affine
    /// `y r0^2 - R(r0^2)` once the maximizer hits the boundary.
    pub fn conjugate_r(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) || !y.is_finite() {
            return Err(Error::domain(format!("conjugate argument {y} must be finite and >= 0")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let ln_y = y.ln();
        if ln_y >= self.log_rp_top {
            return Ok(y * self.r0sq - self.r_top);
        }
        if ln_y <= self.log_rps[0] {
            // Maximizer below the table floor: the supremum is squeezed
            // between 0 and y * x_floor, indistinguishable from zero.
            return Ok(0.0);
        }
        let x = self.solve_on_table(&self.log_rps, |x| log_rp_of(&self.law, x), ln_y)?;
        let u = x.sqrt();
        Ok(x * y - u * self.law.g(u))
    }

    /// Normalized conjugate `L(y) = R*(y)/y`, with `L(0) = 0`.
    pub fn eval_l(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        Ok(self.conjugate_r(y)? / y)
    }

    /// The weight `f(s) = L^{-1}(s/beta)` on `[0, beta r0^2)`.
    pub fn weight_f(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(self.log_weight_f(s)?.exp())
    }

    /// `ln f(s)`; total on `(0, beta r0^2)` even where `f` underflows.
    pub(crate) fn log_weight_f(&self, s: f64) -> Result<f64> {
        let sup = self.f_domain_sup();
        if !(s >= 0.0 && s < sup) {
            return Err(Error::domain(format!("weight argument {s} outside [0, {sup:e})")));
        }
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let target = s / self.beta;
        if target >= self.l_split {
            // Boundary regime: L(y) = r0^2 - R(r0^2)/y solves in closed form.
            return Ok((self.beta * self.r_top).ln() - (sup - s).ln());
        }
        let x = self.solve_on_table(&self.ls, |x| l_of(&self.law, x), target)?;
        Ok(log_rp_of(&self.law, x))
    }

    /// Extension of `ln f` by `+inf` at and beyond the domain supremum, so
    /// composite-map bisections stay total.
    pub(crate) fn log_weight_f_saturating(&self, s: f64) -> f64 {
        if s >= self.f_domain_sup() {
            f64::INFINITY
        } else {
            self.log_weight_f(s).unwrap_or(f64::NAN)
        }
    }

    /// Relative residual of the defining identity
    /// `R*(f(s)) = s f(s) / beta`.
    pub fn defining_residual(&self, s: f64) -> Result<f64> {
        let fs = self.weight_f(s)?;
        let lhs = self.conjugate_r(fs)?;
        let rhs = s * fs / self.beta;
        Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
    }

    /// Bracket on the cached table, then bisect `fun(x) = target` to float
    /// resolution. `col` must be one of the construction-certified columns.
    fn solve_on_table(
        &self,
        col: &[f64],
        fun: impl Fn(f64) -> f64,
        target: f64,
    ) -> Result<f64> {
        let k = col.partition_point(|&v| v < target);
        let lo = if k == 0 { 0.0 } else { self.xs[k - 1] };
        let hi = if k == col.len() { self.r0sq } else { self.xs[k] };
        bisect_root(|x| fun(x) - target, lo, hi, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::damping::DampingLaw;
    use approx::assert_relative_eq;

    fn cubic() -> WeightSystem {
        WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 1.0).unwrap()
    }

    /// Brute-force conjugate: grid maximization of `x y - R(x)` over
    /// `[0, r0^2]`.
    fn conjugate_oracle(ws: &WeightSystem, y: f64, points: usize) -> f64 {
        let phi = |x: f64| x * y - ws.eval_r(x).unwrap().finite().unwrap();
        let mut best: f64 = 0.0;
        let mut best_i = 0usize;
        for i in 0..=points {
            let x = ws.r0sq() * i as f64 / points as f64;
            let val = phi(x);
            if val > best {
                best = val;
                best_i = i;
            }
        }
        // The objective is concave, so the true maximizer lies within one
        // cell of the grid winner; ternary search polishes it.
        let step = ws.r0sq() / points as f64;
        let mut lo = (best_i.saturating_sub(1)) as f64 * step;
        let mut hi = ((best_i + 1) as f64 * step).min(ws.r0sq());
        for _ in 0..120 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if phi(m1) < phi(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best.max(phi(0.5 * (lo + hi)))
    }

    #[test]
    fn transform_values_for_cubic_growth() {
        let ws = cubic();
        assert_eq!(ws.eval_r(0.0).unwrap().finite().unwrap(), 0.0);
        // sqrt(0.04) * g(0.2) = 0.2 * 0.008
        assert_relative_eq!(
            ws.eval_r(0.04).unwrap().finite().unwrap(),
            1.6e-3,
            max_relative = 1e-14
        );
        // R(x) = x^2 for g = x^3
        assert_relative_eq!(
            ws.eval_r(0.25).unwrap().finite().unwrap(),
            0.0625,
            max_relative = 1e-14
        );
        assert!(ws.eval_r(1.5).unwrap().is_infinite());
        assert!(ws.eval_r(-0.1).is_err());
    }

    #[test]
    fn conjugate_closed_forms_for_quadratic_transform() {
        let ws = cubic();
        // R(x) = x^2 on [0,1]: R*(y) = y^2/4 inside, y - 1 beyond y = 2.
        assert_eq!(ws.conjugate_r(0.0).unwrap(), 0.0);
        assert_relative_eq!(ws.conjugate_r(1.0).unwrap(), 0.25, max_relative = 1e-12);
        assert_relative_eq!(ws.conjugate_r(0.5).unwrap(), 0.0625, max_relative = 1e-12);
        assert_relative_eq!(ws.conjugate_r(3.0).unwrap(), 2.0, max_relative = 1e-14);
        assert!(ws.conjugate_r(-1.0).is_err());
    }

    #[test]
    fn conjugate_matches_grid_oracle() {
        let ws = WeightSystem::new(DampingLaw::power(2.2, None).unwrap(), 1.0).unwrap();
        for i in 1..=50 {
            let y = 0.08 * i as f64;
            let direct = ws.conjugate_r(y).unwrap();
            let oracle = conjugate_oracle(&ws, y, 20_000);
            assert!(
                (direct - oracle).abs() <= 1e-6 * oracle.max(1e-9),
                "y={y}: direct={direct:e}, oracle={oracle:e}"
            );
        }
    }

    #[test]
    fn normalized_conjugate_values() {
        let ws = cubic();
        assert_eq!(ws.eval_l(0.0).unwrap(), 0.0);
        assert_relative_eq!(ws.eval_l(1.0).unwrap(), 0.25, max_relative = 1e-12);
        assert_relative_eq!(ws.eval_l(0.5).unwrap(), 0.125, max_relative = 1e-12);
    }

    #[test]
    fn weight_closed_form_for_cubic_growth() {
        // g = x^3, beta = 1: f(s) = 4s on the interior regime [0, r0^2/2].
        let ws = cubic();
        for i in 0..=100 {
            let s = 0.5 * i as f64 / 100.0;
            let f = ws.weight_f(s).unwrap();
            assert!(
                (f - 4.0 * s).abs() <= 1e-8 * (4.0 * s).max(1.0),
                "s={s}: f={f}, expected {}",
                4.0 * s
            );
        }
    }

    #[test]
    fn weight_boundary_regime_closed_form() {
        // Past the interior split, f(s) = beta R(r0^2) / (beta r0^2 - s);
        // for g = x^3, beta = 1: f(s) = 1/(1-s).
        let ws = cubic();
        for s in [0.6, 0.75, 0.9, 0.99] {
            assert_relative_eq!(
                ws.weight_f(s).unwrap(),
                1.0 / (1.0 - s),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn weight_power_family_closed_form() {
        // f(s) = (s/(beta c))^{(p-1)/2}, c = (q-1) q^{-q/(q-1)}, q = (p+1)/2,
        // valid in the interior regime.
        for (p, beta) in [(2.0, 1.0), (3.0, 2.0), (5.0, 1.0)] {
            let law = DampingLaw::power(p, None).unwrap();
            let ws = WeightSystem::new(law, beta).unwrap();
            let q = (p + 1.0) / 2.0;
            let c = (q - 1.0) * q.powf(-q / (q - 1.0));
            // interior regime: s/beta <= l(r0^2) = (q-1)/q * r0^2
            let s_max = 0.99 * beta * (q - 1.0) / q;
            for i in 1..=20 {
                let s = s_max * i as f64 / 20.0;
                let expected = (s / (beta * c)).powf((p - 1.0) / 2.0);
                assert_relative_eq!(ws.weight_f(s).unwrap(), expected, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn weight_defining_identity_residual() {
        let systems = [
            WeightSystem::new(DampingLaw::power(2.0, None).unwrap(), 1.0).unwrap(),
            WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 2.0).unwrap(),
            WeightSystem::new(DampingLaw::cubic_exp(None).unwrap(), 1.0).unwrap(),
        ];
        for ws in &systems {
            let sup = ws.f_domain_sup();
            for i in 1..=200 {
                let s = 0.99 * sup * i as f64 / 200.0;
                let res = ws.defining_residual(s).unwrap();
                assert!(res <= 1e-10, "{}: s={s}, residual={res:e}", ws.law().family_name());
            }
        }
    }

    #[test]
    fn weight_is_strictly_increasing_and_domain_checked() {
        let ws = WeightSystem::new(DampingLaw::cubic_exp(None).unwrap(), 1.0).unwrap();
        let mut prev = -1.0;
        for i in 0..=300 {
            let s = 0.999 * ws.f_domain_sup() * i as f64 / 300.0;
            let f = ws.weight_f(s).unwrap();
            assert!(f > prev, "not increasing at s={s}");
            prev = f;
        }
        assert!(ws.weight_f(-0.1).is_err());
        assert!(ws.weight_f(ws.f_domain_sup()).is_err());
    }

    #[test]
    fn fenchel_young_with_equality_at_the_derivative() {
        let ws = WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 1.0).unwrap();
        for i in 0..64 {
            let x = ws.r0sq() * i as f64 / 63.0;
            let r = ws.eval_r(x).unwrap().finite().unwrap();
            for j in 0..64 {
                let y = 2.5 * j as f64 / 63.0;
                let conj = ws.conjugate_r(y).unwrap();
                assert!(
                    x * y <= r + conj + 1e-10 * (x * y).abs().max(1.0),
                    "Fenchel-Young violated at x={x}, y={y}"
                );
            }
            // equality at y = R'(x)
            if x > 0.0 {
                let y = ws.r_prime(x).unwrap();
                let conj = ws.conjugate_r(y).unwrap();
                assert_relative_eq!(x * y, r + conj, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn biconjugation_recovers_the_transform() {
        let ws = WeightSystem::new(DampingLaw::power(3.0, None).unwrap(), 1.0).unwrap();
        // R**(x) = sup_y { x y - R*(y) }: concave in y, so golden-section
        // maximization gives an oracle independent of the equality identity.
        for i in 1..=64 {
            let x = ws.r0sq() * i as f64 / 64.0;
            let r = ws.eval_r(x).unwrap().finite().unwrap();
            let (_, best) = crate::numerics::golden_max(
                |y| x * y - ws.conjugate_r(y).unwrap(),
                0.0,
                3.0,
                1e-11,
            );
            assert!(
                (best - r).abs() <= 1e-6 * r.max(1e-12),
                "x={x}: R**={best:e}, R={r:e}"
            );
        }
    }

    #[test]
    fn rejects_linear_law_and_bad_beta() {
        assert!(WeightSystem::new(DampingLaw::linear(), 1.0).is_err());
        let law = DampingLaw::power(3.0, None).unwrap();
        assert!(WeightSystem::new(law.clone(), 0.0).is_err());
        assert!(WeightSystem::new(law, -1.0).is_err());
    }

    #[test]
    fn beta_scales_the_weight_domain_and_slope() {
        // f_beta(s) = f_1(s/beta): for g = x^3, f(s) = 4s/beta.
        let law = DampingLaw::power(3.0, None).unwrap();
        let ws2 = WeightSystem::new(law, 2.0).unwrap();
        assert_eq!(ws2.f_domain_sup(), 2.0);
        for i in 1..=20 {
            let s = i as f64 / 20.0; // interior: s/2 <= 0.5
            assert_relative_eq!(ws2.weight_f(s).unwrap(), 2.0 * s, max_relative = 1e-9);
        }
    }

    #[test]
    fn flat_law_weight_survives_tiny_arguments() {
        // The flat-at-zero family underflows R and R' near 0; the log-space
        // path must still produce finite logs and a monotone weight.
        let ws = WeightSystem::new(DampingLaw::cubic_exp(None).unwrap(), 1.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=12 {
            let s = 10f64.powi(-k);
            let lf = ws.log_weight_f(s).unwrap();
            assert!(lf.is_finite() || lf == f64::NEG_INFINITY);
            assert!(lf < prev || prev == f64::NEG_INFINITY);
            prev = lf;
        }
        // ln f(1e-6) is near -1/x at x = l^{-1}(1e-6), far below ln(MIN).
        let lf = ws.log_weight_f(1e-6).unwrap();
        assert!(lf < -1e5, "log weight at 1e-6 was {lf}");
    }
}
