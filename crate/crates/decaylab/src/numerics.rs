//! Shared numerical kernels: safeguarded root finding, concave maximization,
//! adaptive Gauss–Kronrod quadrature, and an embedded Dormand–Prince 5(4)
//! stepper for scalar initial value problems.
//!
//! Every inverse in this crate goes through the bisection routines here; they
//! only assume a sign change on the bracket, never smoothness, so monotone
//! piecewise-defined maps are inverted safely.

use crate::error::{Error, Result};

/// Value of a map extended by +infinity outside its finite domain.
///
/// Used instead of `f64::INFINITY` so that overflow is an explicit, typed
/// state rather than a floating-point accident.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

/// Find the root of `f` on `[lo, hi]` given `f(lo) <= 0 <= f(hi)` up to sign
/// slack, assuming a single sign change. Pure bisection; terminates when the
/// bracket width falls below `xtol` plus a relative floor of a few ulps.
pub fn bisect_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if !(lo <= hi) {
        return Err(Error::numerical(format!("bisection bracket [{lo}, {hi}] is empty")));
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::numerical("bisection endpoint evaluated to NaN".to_string()));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::numerical(format!(
            "no sign change on bracket [{lo}, {hi}]: f(lo)={flo:e}, f(hi)={fhi:e}"
        )));
    }
    let rising = flo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket collapsed to adjacent floats
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.is_nan() {
            return Err(Error::numerical("bisection midpoint evaluated to NaN".to_string()));
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= xtol + 4.0 * f64::EPSILON * mid.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solve `f(x) = target` for strictly increasing `f` on `[lo, hi]`.
pub fn bisect_increasing(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    xtol: f64,
) -> Result<f64> {
    bisect_root(|x| f(x) - target, lo, hi, xtol)
}

/// Newton iteration safeguarded by a shrinking bisection bracket.
///
/// `f` must have a single sign change on `[lo, hi]`. Newton steps that leave
/// the current bracket, or progress slower than halving, fall back to
/// bisection, so convergence is guaranteed; Newton only accelerates the tail.
pub fn newton_bisect(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::numerical(format!(
            "no sign change on bracket [{lo}, {hi}] for hybrid solve"
        )));
    }
    let rising = flo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..120 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == rising {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= xtol + 4.0 * f64::EPSILON * x.abs() {
            return Ok(0.5 * (lo + hi));
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(0.5 * (lo + hi))
}

/// Maximize a strictly concave `f` on `[lo, hi]` by golden-section search.
/// Returns `(argmax, max)`. The value converges quadratically faster than the
/// abscissa near a smooth interior maximum, so `xtol ~ 1e-8` already yields
/// near machine-precision values.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // Endpoints can carry the maximum when it sits on the boundary.
    let mut best = (x, fx);
    for (xx, ff) in [(lo, f(lo)), (hi, f(hi))] {
        if ff > best.1 {
            best = (xx, ff);
        }
    }
    best
}

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel on `[a, b]`: returns the K15 value and an
/// error estimate from the Gauss/Kronrod discrepancy.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = (kronrod - gauss).abs();
    // QUADPACK-style sharpening of the raw discrepancy.
    let err = if err != 0.0 {
        (200.0 * err).powf(1.5).min(err.max(f64::EPSILON * kronrod.abs()))
    } else {
        err
    };
    (kronrod, err)
}

/// Adaptive quadrature of `f` over `[a, b]` with interval halving until the
/// summed panel error estimate satisfies `abs_tol + rel_tol * |value|`.
///
/// Returns `(value, error_estimate)`. Fails if the tolerance cannot be met
/// within the subdivision budget.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    if !(a < b) {
        return Err(Error::domain(format!("integration bounds out of order: [{a}, {b}]")));
    }
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut panels = vec![Panel { a, b, value: v0, err: e0 }];
    for _ in 0..10_000 {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= abs_tol + rel_tol * total.abs() {
            return Ok((total, err));
        }
        // Split the worst panel.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.err.partial_cmp(&q.err).unwrap())
            .expect("panel list is nonempty");
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Interval exhausted at float resolution; accept its estimate.
            panels.push(Panel { err: 0.0, ..p });
            continue;
        }
        let (vl, el) = gk15(&f, p.a, m);
        let (vr, er) = gk15(&f, m, p.b);
        panels.push(Panel { a: p.a, b: m, value: vl, err: el });
        panels.push(Panel { a: m, b: p.b, value: vr, err: er });
    }
    Err(Error::numerical(format!(
        "adaptive quadrature on [{a}, {b}] did not reach tolerance {abs_tol:e}/{rel_tol:e}"
    )))
}

/// Dormand–Prince 5(4) adaptive step for `y' = f(t, y)`, reporting `y` at each
/// requested time. `times` must be nondecreasing and start at or after `t0`.
///
/// The proportional step controller targets `abs_tol + rel_tol * |y|` per
/// step; requested times are hit exactly by clipping the step.
pub fn ode_solve(
    f: impl Fn(f64, f64) -> f64,
    t0: f64,
    y0: f64,
    times: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // 4th-order embedded weights.
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y);
    let t_end = times.last().copied().unwrap_or(t0);
    let mut h = ((t_end - t0) / 100.0).max(1e-10);
    let mut idx = 0;

    while idx < times.len() && times[idx] <= t0 {
        out.push(y0);
        idx += 1;
    }

    let mut steps = 0usize;
    while idx < times.len() {
        steps += 1;
        if steps > 50_000_000 {
            return Err(Error::numerical("ODE stepper exceeded step budget".to_string()));
        }
        let target = times[idx];
        let mut clipped = false;
        if t + h >= target {
            h = target - t;
            clipped = true;
        }
        let k2 = f(t + A21 * h, y + h * (A21 * k1));
        let k3 = f(t + 0.3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(t + 0.8 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(t + 8.0 / 9.0 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let y6 = y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
        let k6 = f(t + h, y6);
        let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(t + h, y5);
        let err_est =
            (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let scale = abs_tol + rel_tol * y.abs().max(y5.abs());
        if err_est <= scale || h.abs() < 1e-14 * t.abs().max(1.0) {
            t += h;
            y = y5;
            k1 = k7; // FSAL
            while idx < times.len() && times[idx] <= t + 1e-14 * t.abs().max(1.0) {
                out.push(y);
                idx += 1;
            }
        }
        let ratio = if err_est > 0.0 { (scale / err_est).powf(0.2) } else { 5.0 };
        h *= (0.9 * ratio).clamp(0.2, 5.0);
        if !clipped {
            h = h.min(t_end - t + 1e-12);
        }
        if h <= 0.0 {
            h = 1e-12;
        }
    }
    Ok(out)
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}
