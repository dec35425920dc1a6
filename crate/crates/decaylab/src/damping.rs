//! Damping nonlinearities and damping-coefficient fields.
//!
//! A [`DampingLaw`] packages a feedback growth function `g` on `[0, 1]`
//! (extended oddly to `[-1, 1]`), the full damping response `rho(x, v)`
//! obtained by continuing `g` with unit slope beyond `|v| = 1`, the sector
//! constants `c1`, `c2` tying the two together, and the convexity radius
//! `r0` on which `x -> sqrt(x) * g(sqrt(x))` is strictly convex.
//!
//! A [`CoefficientField`] is the nonnegative spatial factor `a(x)` in the
//! damping term `a(x) rho(x, v)`; it carries the subinterval `omega` on
//! which `a` is bounded below by `a0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect_root;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum GKind {
    /// g(x) = x^p with p > 1.
    Power { p: f64 },
    /// g(x) = x^3 exp(-1/x^2), g(0) = 0; flat to all orders at the origin.
    CubicExp,
    /// g(x) = x. Constructible for the linear-response solvers, but the
    /// convex transform built on it is degenerate.
    Linear,
    Custom {
        name: String,
        g: ScalarFn,
        dg: Option<ScalarFn>,
    },
}

/// Monotone damping law with sector constants.
#[derive(Clone)]
pub struct DampingLaw {
    kind: GKind,
    c1: f64,
    c2: f64,
    r0: f64,
}

impl fmt::Debug for DampingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DampingLaw")
            .field("family", &self.family_name())
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("r0", &self.r0)
            .finish()
    }
}

/// Strictly positive second differences of `R(x) = sqrt(x) g(sqrt(x))` on the
/// dyadic grid of `[0, r0^2]` with 1024 steps. This is the certificate the
/// weight construction relies on; it is also used to pick the default `r0`.
pub(crate) fn r_strictly_convex(law: &DampingLaw, r0: f64) -> bool {
    let r0sq = r0 * r0;
    let h = r0sq / 1024.0;
    let r = |x: f64| {
        let u = x.sqrt();
        u * law.g(u)
    };
    let mut prev = r(0.0);
    let mut cur = r(h);
    for i in 1..1024u32 {
        let next = r(h * (i as f64 + 1.0));
        if !(next - 2.0 * cur + prev > 0.0) {
            return false;
        }
        prev = cur;
        cur = next;
    }
    true
}

fn auto_r0(law: &DampingLaw) -> Result<f64> {
    let mut r0 = 1.0;
    for _ in 0..48 {
        if r_strictly_convex(law, r0) {
            return Ok(r0);
        }
        r0 *= 0.5;
    }
    Err(Error::config(
        "no dyadic convexity radius found: sqrt(x) g(sqrt(x)) is not strictly convex near 0",
    ))
}

impl DampingLaw {
    fn with_auto_constants(kind: GKind, r0: Option<f64>) -> Result<Self> {
        let mut law = DampingLaw { kind, c1: 1.0, c2: 1.0, r0: 1.0 };
        let g1 = law.g(1.0);
        if !(g1.is_finite() && g1 > 0.0) {
            return Err(Error::config("g(1) must be finite and positive"));
        }
        law.c1 = g1.min(1.0);
        law.c2 = (1.0 / g1).max(1.0);
        law.r0 = match r0 {
            Some(r) => {
                if !(r > 0.0 && r <= 1.0) {
                    return Err(Error::config(format!("r0 must lie in (0, 1], got {r}")));
                }
                r
            }
            None => auto_r0(&law)?,
        };
        Ok(law)
    }

    /// Power law `g(x) = x^p`, `p > 1`. `r0 = None` picks the largest dyadic
    /// radius whose convexity certificate passes (1 for every `p > 1`).
    pub fn power(p: f64, r0: Option<f64>) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::config(format!("power law needs p > 1, got {p}")));
        }
        Self::with_auto_constants(GKind::Power { p }, r0)
    }

    /// `g(x) = x^3 exp(-1/x^2)`, flat to all orders at 0.
    pub fn cubic_exp(r0: Option<f64>) -> Result<Self> {
        Self::with_auto_constants(GKind::CubicExp, r0)
    }

    /// Linear response `g(x) = x`. The nominal `r0 = 1` is carried for
    /// completeness; weight construction rejects this law because the
    /// associated transform is affine, not strictly convex.
    pub fn linear() -> Self {
        DampingLaw { kind: GKind::Linear, c1: 1.0, c2: 1.0, r0: 1.0 }
    }

    /// Custom growth function with explicit sector constants. Supply the
    /// derivative when it is known; otherwise central differences are used
    /// where a derivative is needed.
    pub fn custom(
        name: impl Into<String>,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: Option<ScalarFn>,
        c1: f64,
        c2: f64,
        r0: Option<f64>,
    ) -> Result<Self> {
        if !(c1 > 0.0 && c2 >= c1) {
            return Err(Error::config("sector constants need 0 < c1 <= c2"));
        }
        let mut law = DampingLaw {
            kind: GKind::Custom { name: name.into(), g: Arc::new(g), dg },
            c1,
            c2,
            r0: 1.0,
        };
        law.r0 = match r0 {
            Some(r) => r,
            None => auto_r0(&law)?,
        };
        Ok(law)
    }

    pub fn family_name(&self) -> String {
        match &self.kind {
            GKind::Power { p } => format!("power({p})"),
            GKind::CubicExp => "cubic_exp".to_string(),
            GKind::Linear => "linear".to_string(),
            GKind::Custom { name, .. } => format!("custom({name})"),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, GKind::Linear)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// Odd extension of the growth function.
    pub fn g(&self, x: f64) -> f64 {
        let s = x.signum();
        let x = x.abs();
        let v = match &self.kind {
            GKind::Power { p } => x.powf(*p),
            GKind::CubicExp => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powi(3) * (-1.0 / (x * x)).exp()
                }
            }
            GKind::Linear => x,
            GKind::Custom { g, .. } => g(x),
        };
        s * v
    }

    /// Derivative of `g` (analytic for the built-in families).
    pub fn g_prime(&self, x: f64) -> f64 {
        let x = x.abs();
        match &self.kind {
            GKind::Power { p } => {
                if x == 0.0 && *p > 1.0 {
                    0.0
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            GKind::CubicExp => {
                if x == 0.0 {
                    0.0
                } else {
                    (3.0 * x * x + 2.0) * (-1.0 / (x * x)).exp()
                }
            }
            GKind::Linear => 1.0,
            GKind::Custom { g, dg, .. } => match dg {
                Some(d) => d(x),
                None => {
                    let h = (x.abs() * 1e-6).max(1e-9);
                    (g(x + h) - g((x - h).max(0.0))) / (h + h.min(x))
                }
            },
        }
    }

    /// Finite-difference slope of `g` at the origin; zero (within roundoff)
    /// for every admissible superlinear law.
    pub fn g_prime_at_zero(&self) -> f64 {
        let h = 1e-7;
        self.g(h) / h
    }

    /// Logarithmic derivative `u g'(u)/g(u)`, analytic for the built-in
    /// families so it stays finite where `g` itself underflows.
    pub(crate) fn sigma(&self, u: f64) -> f64 {
        match &self.kind {
            GKind::Power { p } => *p,
            GKind::CubicExp => 3.0 + 2.0 / (u * u),
            GKind::Linear => 1.0,
            GKind::Custom { g, .. } => u * self.g_prime(u) / g(u),
        }
    }

    /// `ln g(u)` for `u > 0`, computed without forming `g(u)`.
    pub(crate) fn log_g(&self, u: f64) -> f64 {
        match &self.kind {
            GKind::Power { p } => p * u.ln(),
            GKind::CubicExp => 3.0 * u.ln() - 1.0 / (u * u),
            GKind::Linear => u.ln(),
            GKind::Custom { g, .. } => g(u).ln(),
        }
    }

    /// Inverse of `g` on `[0, g(1)]` by bisection to 1e-14 absolute.
    pub fn g_inv(&self, y: f64) -> Result<f64> {
        let g1 = self.g(1.0);
        if !(0.0..=g1).contains(&y) {
            return Err(Error::domain(format!(
                "g_inv argument {y} outside [0, {g1}]"
            )));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        bisect_root(|x| self.g(x) - y, 0.0, 1.0, 1e-14)
    }

    /// Damping response: `g(v)` for `|v| <= 1`, continued with unit slope
    /// beyond. Strictly increasing and odd; the sector bounds hold with the
    /// stored `c1`, `c2`. Position-independent: the spatial factor lives in
    /// [`CoefficientField`].
    pub fn rho(&self, v: f64) -> f64 {
        let s = v.signum();
        let v = v.abs();
        if v <= 1.0 {
            s * self.g(v)
        } else {
            s * (self.g(1.0) + (v - 1.0))
        }
    }

    /// Slope of `rho`, used to accelerate the implicit per-node solves.
    pub fn rho_prime(&self, v: f64) -> f64 {
        let v = v.abs();
        if v < 1.0 {
            self.g_prime(v)
        } else {
            1.0
        }
    }
}

/// Shape of the damping coefficient `a(x)` on `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
enum FieldKind {
    Constant,
    /// `amax` on `[l, u]`, cosine ramps of width `ramp_l`/`ramp_r` outside.
    Bump { ramp_l: f64, ramp_r: f64 },
    /// Sharp indicator of `[l, u]`. Violates the continuity requirement;
    /// kept for experiments, and reported as discontinuous by the validator.
    PiecewiseConstant,
}

/// Nonnegative damping coefficient with a certified floor on a subinterval.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    kind: FieldKind,
    omega: (f64, f64),
    a0: f64,
    amax: f64,
}

impl CoefficientField {
    /// Spatially constant coefficient (`value` may be zero).
    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::config(format!("constant coefficient must be >= 0, got {value}")));
        }
        Ok(CoefficientField {
            kind: FieldKind::Constant,
            omega: (0.0, 1.0),
            a0: value,
            amax: value,
        })
    }

    /// Continuous bump: plateau `amax` on `omega`, cosine ramps to zero
    /// outside (ramp width at most 0.1, clipped at the domain ends).
    pub fn bump(omega: (f64, f64), a0: f64, amax: f64) -> Result<Self> {
        check_field_params(omega, a0, amax)?;
        let ramp_l = omega.0.min(0.1);
        let ramp_r = (1.0 - omega.1).min(0.1);
        Ok(CoefficientField { kind: FieldKind::Bump { ramp_l, ramp_r }, omega, a0, amax })
    }

    /// Indicator of `omega` scaled by `amax`.
    pub fn piecewise_constant(omega: (f64, f64), a0: f64, amax: f64) -> Result<Self> {
        check_field_params(omega, a0, amax)?;
        Ok(CoefficientField { kind: FieldKind::PiecewiseConstant, omega, a0, amax })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (l, u) = self.omega;
        match &self.kind {
            FieldKind::Constant => self.amax,
            FieldKind::PiecewiseConstant => {
                if (l..=u).contains(&x) {
                    self.amax
                } else {
                    0.0
                }
            }
            FieldKind::Bump { ramp_l, ramp_r } => {
                if (l..=u).contains(&x) {
                    self.amax
                } else if x < l && *ramp_l > 0.0 && x > l - ramp_l {
                    let s = (l - x) / ramp_l;
                    self.amax * 0.5 * (1.0 + (std::f64::consts::PI * s).cos())
                } else if x > u && *ramp_r > 0.0 && x < u + ramp_r {
                    let s = (x - u) / ramp_r;
                    self.amax * 0.5 * (1.0 + (std::f64::consts::PI * s).cos())
                } else {
                    0.0
                }
            }
        }
    }

    pub fn omega(&self) -> (f64, f64) {
        self.omega
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn sup_norm(&self) -> f64 {
        self.amax
    }

    pub fn is_identically_zero(&self) -> bool {
        self.amax == 0.0
    }

    /// Exact integral of `a` over `(0, 1)`; the cosine ramps integrate to
    /// half their width times the plateau height.
    pub fn integral(&self) -> f64 {
        let (l, u) = self.omega;
        match &self.kind {
            FieldKind::Constant => self.amax,
            FieldKind::PiecewiseConstant => self.amax * (u - l),
            FieldKind::Bump { ramp_l, ramp_r } => {
                self.amax * ((u - l) + 0.5 * (ramp_l + ramp_r))
            }
        }
    }
}

fn check_field_params(omega: (f64, f64), a0: f64, amax: f64) -> Result<()> {
    let (l, u) = omega;
    if !(0.0 <= l && l < u && u <= 1.0) {
        return Err(Error::config(format!("omega must satisfy 0 <= l < u <= 1, got ({l}, {u})")));
    }
    if !(a0 >= 0.0 && amax >= a0 && amax.is_finite()) {
        return Err(Error::config(format!(
            "field levels must satisfy 0 <= a0 <= amax < inf, got a0={a0}, amax={amax}"
        )));
    }
    Ok(())
}

/// One sampled violation found by [`validate_admissibility`].
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: String,
    pub location: f64,
    pub detail: String,
}

/// Outcome of the admissibility check for a law/field pair.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sampled admissibility check: `g` odd, vanishing with vanishing slope at 0,
/// strictly increasing; `rho` monotone with the two-sided sector bounds; `a`
/// nonnegative, continuous, and at least `a0` on `omega`.
///
/// Every violated inequality is reported with its sample location; the report
/// passes iff no violation was found. Non-finite evaluations are reported as
/// violations rather than propagated.
pub fn validate_admissibility(
    law: &DampingLaw,
    field: &CoefficientField,
    samples: usize,
) -> Result<ValidationReport> {
    if samples < 100 {
        return Err(Error::config(format!("validation needs >= 100 samples, got {samples}")));
    }
    let mut violations = Vec::new();
    let mut flag = |check: &str, location: f64, detail: String| {
        violations.push(Violation { check: check.to_string(), location, detail });
    };

    if law.g(0.0) != 0.0 {
        flag("g(0)=0", 0.0, format!("g(0) = {:e}", law.g(0.0)));
    }
    let slope0 = law.g_prime_at_zero();
    if !slope0.is_finite() || slope0.abs() > 1e-5 {
        flag("g'(0)=0", 0.0, format!("finite-difference slope at 0 is {slope0:e}"));
    }

    let g1 = law.g(1.0);
    // Increasing extension of g^{-1} past g(1), so the upper sector bound is
    // testable on all of [0, 1] even when g(1) < 1.
    let g_inv_ext = |y: f64| -> Result<f64> {
        if y <= g1 {
            law.g_inv(y)
        } else {
            Ok(1.0 + (y - g1))
        }
    };

    let mut prev_g = 0.0;
    let mut prev_rho = 0.0;
    for i in 1..=samples {
        let v = i as f64 / samples as f64; // (0, 1]
        let gv = law.g(v);
        let rv = law.rho(v);
        if !gv.is_finite() || !rv.is_finite() {
            flag("finite", v, format!("g(v)={gv:e}, rho(v)={rv:e}"));
            continue;
        }
        if law.g(-v) != -gv {
            flag("g odd", -v, format!("g(-v)={:e} vs -g(v)={:e}", law.g(-v), -gv));
        }
        if law.rho(-v) != -rv {
            flag("rho odd", -v, format!("rho(-v)={:e} vs -rho(v)={:e}", law.rho(-v), -rv));
        }
        // A tie below the underflow floor is indistinguishable from strict
        // increase at f64 resolution (steep laws flush to zero near 0).
        let underflow_tie = |cur: f64, prev: f64| cur == prev && cur.abs() < f64::MIN_POSITIVE;
        if !(gv > prev_g) && !underflow_tie(gv, prev_g) {
            flag("g strictly increasing", v, format!("g({v}) = {gv:e} did not increase"));
        }
        if !(rv > prev_rho) && !underflow_tie(rv, prev_rho) {
            flag("rho strictly increasing", v, format!("rho({v}) = {rv:e} did not increase"));
        }
        prev_g = gv;
        prev_rho = rv;

        // Sector bounds on |v| <= 1.
        if law.c1 * gv > rv * (1.0 + 1e-12) {
            flag("sector lower (|v|<=1)", v, format!("c1 g = {:e} > rho = {:e}", law.c1 * gv, rv));
        }
        let upper = law.c2 * g_inv_ext(v)?;
        if rv > upper * (1.0 + 1e-12) {
            flag("sector upper (|v|<=1)", v, format!("rho = {rv:e} > c2 g_inv = {upper:e}"));
        }
    }
    if law.rho(0.0) != 0.0 {
        flag("rho(0)=0", 0.0, format!("rho(0) = {:e}", law.rho(0.0)));
    }
    // Linear sector bounds on |v| >= 1, sampled out to v = 4.
    for i in 0..=samples {
        let v = 1.0 + 3.0 * i as f64 / samples as f64;
        let rv = law.rho(v);
        if law.c1 * v > rv * (1.0 + 1e-12) {
            flag("sector lower (|v|>=1)", v, format!("c1 v = {:e} > rho = {:e}", law.c1 * v, rv));
        }
        if rv > law.c2 * v * (1.0 + 1e-12) {
            flag("sector upper (|v|>=1)", v, format!("rho = {:e} > c2 v = {:e}", rv, law.c2 * v));
        }
    }

    // Coefficient field: nonnegative everywhere, floor a0 on omega,
    // continuity probed by shrinking the sampling step at each jump.
    let h = 1.0 / samples as f64;
    let mut prev_a = field.eval(0.0);
    if !prev_a.is_finite() {
        flag("a finite", 0.0, format!("a(0) = {prev_a:e}"));
    }
    for i in 1..=samples {
        let x = i as f64 * h;
        let ax = field.eval(x);
        if !ax.is_finite() {
            flag("a finite", x, format!("a({x}) = {ax:e}"));
            continue;
        }
        if ax < 0.0 {
            flag("a >= 0", x, format!("a({x}) = {ax:e}"));
        }
        let jump = (ax - prev_a).abs();
        if jump > 1e-9 * field.sup_norm().max(1.0) {
            // Refine: a genuine discontinuity keeps most of the jump at 1/16
            // of the spacing; a continuous ramp loses it.
            let m = x - 0.5 * h;
            let d = h / 16.0;
            let refined = (field.eval(m + d) - field.eval(m - d)).abs();
            let refined = refined.max((field.eval(x) - field.eval(x - d)).abs());
            let refined = refined.max((field.eval(x - h + d) - field.eval(x - h)).abs());
            if refined > 0.5 * jump {
                flag("a continuous", x, format!("jump of {refined:e} persists under refinement near {x}"));
            }
        }
        prev_a = ax;
    }
    let (l, u) = field.omega();
    for i in 0..=samples {
        let x = l + (u - l) * i as f64 / samples as f64;
        let ax = field.eval(x);
        if ax < field.a0() * (1.0 - 1e-12) {
            flag("a >= a0 on omega", x, format!("a({x}) = {ax:e} < a0 = {:e}", field.a0()));
        }
    }

    Ok(ValidationReport { samples, violations })
}

// ---------------------------------------------------------------------------
// JSON description

/// Named growth-function families for serialization.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Power { p: f64 },
    CubicExp,
    Linear,
}

/// Serializable shape of a coefficient field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Constant { value: f64 },
    Bump { omega: [f64; 2], a0: f64, amax: f64 },
    PiecewiseConstant { omega: [f64; 2], a0: f64, amax: f64 },
}

/// JSON description of a law/field pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LawFieldSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    pub c1: f64,
    pub c2: f64,
    pub r0: f64,
    pub a: FieldSpec,
}

impl LawFieldSpec {
    pub fn describe(law: &DampingLaw, field: &CoefficientField) -> Result<Self> {
        let family = match &law.kind {
            GKind::Power { p } => FamilySpec::Power { p: *p },
            GKind::CubicExp => FamilySpec::CubicExp,
            GKind::Linear => FamilySpec::Linear,
            GKind::Custom { name, .. } => {
                return Err(Error::config(format!(
                    "custom law '{name}' has no serializable description"
                )))
            }
        };
        let a = match &field.kind {
            FieldKind::Constant => FieldSpec::Constant { value: field.amax },
            FieldKind::Bump { .. } => FieldSpec::Bump {
                omega: [field.omega.0, field.omega.1],
                a0: field.a0,
                amax: field.amax,
            },
            FieldKind::PiecewiseConstant => FieldSpec::PiecewiseConstant {
                omega: [field.omega.0, field.omega.1],
                a0: field.a0,
                amax: field.amax,
            },
        };
        Ok(LawFieldSpec { family, c1: law.c1, c2: law.c2, r0: law.r0, a })
    }

    pub fn build(&self) -> Result<(DampingLaw, CoefficientField)> {
        let mut law = match self.family {
            FamilySpec::Power { p } => DampingLaw::power(p, Some(self.r0))?,
            FamilySpec::CubicExp => DampingLaw::cubic_exp(Some(self.r0))?,
            FamilySpec::Linear => DampingLaw::linear(),
        };
        law.c1 = self.c1;
        law.c2 = self.c2;
        let field = match self.a {
            FieldSpec::Constant { value } => CoefficientField::constant(value)?,
            FieldSpec::Bump { omega, a0, amax } => {
                CoefficientField::bump((omega[0], omega[1]), a0, amax)?
            }
            FieldSpec::PiecewiseConstant { omega, a0, amax } => {
                CoefficientField::piecewise_constant((omega[0], omega[1]), a0, amax)?
            }
        };
        Ok((law, field))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_law_rejects_sublinear_exponent() {
        assert!(DampingLaw::power(1.0, None).is_err());
        assert!(DampingLaw::power(0.5, None).is_err());
    }

    #[test]
    fn cubic_power_matches_hand_values() {
        let law = DampingLaw::power(3.0, None).unwrap();
        assert_relative_eq!(law.g(0.2), 0.008, max_relative = 1e-15);
        assert_eq!(law.c1(), 1.0);
        assert_eq!(law.c2(), 1.0);
        assert_eq!(law.r0(), 1.0);
    }

    #[test]
    fn g_inv_round_trips_against_plain_bisection() {
        let law = DampingLaw::power(3.0, None).unwrap();
        let x = law.g_inv(0.008).unwrap();
        assert_relative_eq!(x, 0.2, epsilon = 1e-12);
        // Independent inversion oracle.
        let oracle = bisect_root(|t| t * t * t - 0.008, 0.0, 1.0, 1e-15).unwrap();
        assert_relative_eq!(x, oracle, epsilon = 1e-12);
    }

    #[test]
    fn g_inv_consistency_on_grid() {
        for law in [
            DampingLaw::power(2.5, None).unwrap(),
            DampingLaw::cubic_exp(None).unwrap(),
        ] {
            for i in 1..=1000 {
                let x = i as f64 / 1000.0;
                let y = law.g(x);
                if !y.is_normal() {
                    // The steep branch underflows for tiny x; no float can
                    // represent g there, so the round trip is untestable.
                    continue;
                }
                let back = law.g_inv(y).unwrap();
                assert!(
                    (back - x).abs() <= 1e-10 * x.max(1e-3),
                    "{}: g_inv(g({x})) = {back}",
                    law.family_name()
                );
            }
        }
    }

    #[test]
    fn cubic_exp_frozen_values() {
        let law = DampingLaw::cubic_exp(None).unwrap();
        assert_relative_eq!(law.g(1.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(law.g(0.5), 0.125 * (-4.0f64).exp(), max_relative = 1e-15);
        assert_eq!(law.g(0.0), 0.0);
        // Sector constants follow g(1) = 1/e.
        assert_relative_eq!(law.c1(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(law.c2(), 1.0f64.exp(), max_relative = 1e-15);
    }

    #[test]
    fn oddness_and_monotonicity_on_grid() {
        let law = DampingLaw::power(2.0, None).unwrap();
        let mut prev = -law.g(1.0) - 1e-15;
        for i in 0..=1000 {
            let x = -1.0 + 2.0 * i as f64 / 1000.0;
            assert_eq!(law.g(-x), -law.g(x));
            let gx = law.g(x);
            assert!(gx > prev, "not strictly increasing at {x}");
            prev = gx;
        }
    }

    #[test]
    fn rho_continues_with_unit_slope() {
        let law = DampingLaw::cubic_exp(None).unwrap();
        let g1 = law.g(1.0);
        assert_relative_eq!(law.rho(1.0), g1, max_relative = 1e-15);
        assert_relative_eq!(law.rho(2.5), g1 + 1.5, max_relative = 1e-15);
        assert_relative_eq!(law.rho(-2.5), -(g1 + 1.5), max_relative = 1e-15);
        // Odd on the interior branch as well.
        assert_eq!(law.rho(-0.25), -law.rho(0.25));
        assert!(law.rho(-0.25) < 0.0);
    }

    #[test]
    fn validate_passes_power_law_with_constant_field() {
        let law = DampingLaw::power(3.0, None).unwrap();
        let field = CoefficientField::constant(1.0).unwrap();
        let report = validate_admissibility(&law, &field, 500).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn validate_passes_cubic_exp_with_bump_field() {
        let law = DampingLaw::cubic_exp(None).unwrap();
        let field = CoefficientField::bump((0.4, 0.6), 0.5, 1.0).unwrap();
        let report = validate_admissibility(&law, &field, 500).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
    }

    #[test]
    fn validate_flags_linear_slope_at_origin() {
        let law = DampingLaw::linear();
        let field = CoefficientField::constant(1.0).unwrap();
        let report = validate_admissibility(&law, &field, 200).unwrap();
        assert!(report.violations.iter().any(|v| v.check == "g'(0)=0"));
    }

    #[test]
    fn validate_flags_zero_field_with_positive_floor() {
        let law = DampingLaw::power(3.0, None).unwrap();
        // a == 0 with a claimed floor of 0.1 on omega: must fail the floor.
        let field = CoefficientField {
            kind: FieldKind::Constant,
            omega: (0.25, 0.75),
            a0: 0.1,
            amax: 0.0,
        };
        let report = validate_admissibility(&law, &field, 200).unwrap();
        assert!(report.violations.iter().any(|v| v.check == "a >= a0 on omega"));
    }

    #[test]
    fn validate_flags_indicator_discontinuity() {
        let law = DampingLaw::power(3.0, None).unwrap();
        let field = CoefficientField::piecewise_constant((0.4, 0.6), 1.0, 1.0).unwrap();
        let report = validate_admissibility(&law, &field, 300).unwrap();
        assert!(report.violations.iter().any(|v| v.check == "a continuous"));
    }

    #[test]
    fn validate_requires_enough_samples() {
        let law = DampingLaw::power(3.0, None).unwrap();
        let field = CoefficientField::constant(1.0).unwrap();
        assert!(validate_admissibility(&law, &field, 99).is_err());
    }

    #[test]
    fn bump_field_respects_floor_and_integral() {
        let field = CoefficientField::bump((0.4, 0.6), 1.0, 1.0).unwrap();
        assert_eq!(field.eval(0.5), 1.0);
        assert_eq!(field.eval(0.05), 0.0);
        assert!(field.eval(0.35) > 0.0 && field.eval(0.35) < 1.0);
        // plateau 0.2 plus two cosine ramps of width 0.1 at half weight
        assert_relative_eq!(field.integral(), 0.2 + 0.1, max_relative = 1e-15);
    }

    #[test]
    fn json_description_round_trips() {
        let law = DampingLaw::power(3.0, None).unwrap();
        let field = CoefficientField::bump((0.4, 0.6), 0.5, 2.0).unwrap();
        let spec = LawFieldSpec::describe(&law, &field).unwrap();
        let text = spec.to_json().unwrap();
        let parsed = LawFieldSpec::from_json(&text).unwrap();
        assert_eq!(spec, parsed);
        let (law2, field2) = parsed.build().unwrap();
        assert_eq!(law2.family_name(), law.family_name());
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert_eq!(field.eval(x), field2.eval(x));
            assert_eq!(law.g(x), law2.g(x));
        }
    }

    #[test]
    fn auto_r0_fails_for_linear_growth() {
        // Exercised through the custom constructor: affine g has no strictly
        // convex transform radius.
        let res = DampingLaw::custom("affine", |x| x, None, 1.0, 1.0, None);
        assert!(res.is_err());
    }
}
