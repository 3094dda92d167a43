//! Adaptive Gauss–Kronrod quadrature.
//!
//! Two entry points cover everything the models need:
//!
//! * [`integrate`]: globally adaptive 21-point Gauss–Kronrod on a finite
//!   interval (the QUADPACK `QAG` scheme).
//! * [`integrate_positive`]: integrals over sub-ranges of `(0, ∞]` whose
//!   integrands span many decades. The range is mapped to `y = ln x` and
//!   swept outward from an anchor scale in chunks of width `CHUNK`. Open ends are
//!   closed with an analytic power-law tail once the local decay exponent
//!   has settled, so algebraically decaying interference integrands
//!   (`x^{1-α}`) converge without a long sweep.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerances and limits for a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections per adaptive call.
    pub max_subdivisions: usize,
    /// Maximum number of log-chunks swept toward an open end.
    pub max_chunks: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-10,
            max_subdivisions: 200,
            max_chunks: 400,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self, QuadError> {
        let spec = Self { rel_tol, abs_tol, ..Self::default() };
        spec.validate()?;
        Ok(spec)
    }

    /// Tight tolerances for reference computations.
    pub fn precise() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_subdivisions: 400,
            max_chunks: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.rel_tol.is_finite()
            && self.abs_tol.is_finite()
            && self.max_subdivisions > 0
            && self.max_chunks > 0;
        if ok {
            Ok(())
        } else {
            Err(QuadError::InvalidSpec)
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// A converged integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature tolerances must be positive and finite")]
    InvalidSpec,
    #[error("invalid integration range [{lower}, {upper}]")]
    InvalidRange { lower: f64, upper: f64 },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("quadrature did not converge: value {value:e}, achieved error {achieved:e}, requested {requested:e}")]
    NoConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_608_187_328_911,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One 21-point Kronrod panel with the QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64, f64), QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite { at: center });
    }
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite { at: x1 });
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite { at: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let round_off = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round_off);
    }
    Ok((result, err, res_abs))
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive quadrature of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadError> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadError::InvalidRange { lower: a, upper: b });
    }
    if a == b {
        return Ok(Estimate { value: 0.0, abs_err: 0.0 });
    }
    let (value, err, mass) = gk21(&f, a, b)?;
    let mut total = value;
    let mut total_err = err;
    let mut total_mass = mass;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, err, mass });
    let mut splits = 0;
    // Errors below the rounding floor of ∫|f| cannot be reduced further.
    while total_err > spec.target(total).max(1e3 * f64::EPSILON * total_mass) {
        if splits >= spec.max_subdivisions {
            return Err(QuadError::NoConvergence {
                value: total,
                achieved: total_err,
                requested: spec.target(total),
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine precision; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1, m1) = gk21(&f, worst.a, mid)?;
        let (v2, e2, m2) = gk21(&f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_mass += m1 + m2 - worst.mass;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, mass: m1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, mass: m2 });
        splits += 1;
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_err: f64 = heap.iter().map(|p| p.err).sum();
    Ok(Estimate { value, abs_err })
}

/// Integrates `f` over `[lower, upper]` with `0 <= lower < upper <= ∞`.
///
/// `anchor` is a characteristic scale of the integrand; the sweep in
/// `ln x` starts there and proceeds outward in both directions.
pub fn integrate_positive<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    anchor: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadError> {
    spec.validate()?;
    if !(lower >= 0.0) || !(upper > lower) || lower.is_infinite() {
        if upper == lower && lower.is_finite() {
            return Ok(Estimate { value: 0.0, abs_err: 0.0 });
        }
        return Err(QuadError::InvalidRange { lower, upper });
    }
    if !(anchor > 0.0 && anchor.is_finite()) {
        return Err(QuadError::InvalidRange { lower: anchor, upper: anchor });
    }
    let g = |y: f64| {
        let x = y.exp();
        let v = f(x) * x;
        // f(x)·x underflows to NaN only when f is infinite at the far ends.
        if v.is_nan() && (x == 0.0 || x.is_infinite()) {
            0.0
        } else {
            v
        }
    };
    let y_lo = if lower == 0.0 { f64::NEG_INFINITY } else { lower.ln() };
    let y_hi = if upper.is_infinite() { f64::INFINITY } else { upper.ln() };
    let y_anchor = anchor.ln().clamp(y_lo, y_hi);

    let up = sweep(&g, y_anchor, y_hi, 1.0, spec)?;
    let down = sweep(&g, y_anchor, y_lo, -1.0, spec)?;
    let value = up.value + down.value;
    let abs_err = up.abs_err + down.abs_err;
    Ok(Estimate { value, abs_err })
}

/// Width of one sweep chunk in `y = ln x`.
const CHUNK: f64 = 2.0;

/// Sweeps from `start` toward `end` (direction `dir`) in chunks of `y`.
fn sweep<G: Fn(f64) -> f64>(
    g: &G,
    start: f64,
    end: f64,
    dir: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadError> {
    if start == end {
        return Ok(Estimate { value: 0.0, abs_err: 0.0 });
    }
    let chunk_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.01,
        ..*spec
    };
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut y = start;
    let mut prev_rate: Option<f64> = None;
    let mut quiet_chunks = 0;
    for _ in 0..spec.max_chunks {
        let next = if end.is_finite() && (end - y) * dir <= CHUNK { end } else { y + CHUNK * dir };
        let (a, b) = if dir > 0.0 { (y, next) } else { (next, y) };
        let chunk = integrate(g, a, b, &chunk_spec)?;
        total += chunk.value;
        total_err += chunk.abs_err;
        y = next;
        if y == end {
            return Ok(Estimate { value: total, abs_err: total_err });
        }
        let target = spec.target(total);

        // Local exponential rate of g in y (a power law in x).
        let g_end = g(y);
        let g_back = g(y - 0.5 * dir);
        if g_end == 0.0 && chunk.value == 0.0 {
            quiet_chunks += 1;
            if quiet_chunks >= 2 && total != 0.0 {
                return Ok(Estimate { value: total, abs_err: total_err });
            }
            // Integrand identically zero so far; keep sweeping a while.
            if quiet_chunks >= 60 {
                return Ok(Estimate { value: total, abs_err: total_err });
            }
            continue;
        }
        quiet_chunks = 0;
        if g_end == 0.0 || g_back == 0.0 || g_end.signum() != g_back.signum() {
            prev_rate = None;
            continue;
        }
        let rate = 2.0 * (g_end / g_back).ln();
        if rate < -0.05 {
            let tail = g_end / -rate;
            let settled = prev_rate
                .map(|p| (p - rate).abs() * tail.abs() / -rate <= 0.1 * target)
                .unwrap_or(false);
            if tail.abs() <= 1e-3 * target || settled {
                total += tail;
                total_err += prev_rate.map(|p| (p - rate).abs() * tail.abs() / -rate).unwrap_or(0.0);
                return Ok(Estimate { value: total, abs_err: total_err });
            }
        }
        prev_rate = Some(rate);
    }
    Err(QuadError::NoConvergence {
        value: total,
        achieved: total_err.max(g(y).abs()),
        requested: spec.target(total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::precise()
    }

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| 3.0 * x * x, 0.0, 2.0, &tight()).unwrap();
        assert!((est.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_finite() {
        let est = integrate(|x| (10.0 * x).sin(), 0.0, 1.0, &tight()).unwrap();
        let exact = (1.0 - 10f64.cos()) / 10.0;
        assert!((est.value - exact).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn exponential_tail() {
        let est = integrate_positive(|x| (-x).exp(), 0.0, f64::INFINITY, 1.0, &tight()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn slow_algebraic_tail() {
        // ∫_1^∞ x^{-1.5} dx = 2
        let est = integrate_positive(|x| x.powf(-1.5), 1.0, f64::INFINITY, 1.0, &tight()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn interference_kernel_shape() {
        // ∫_0^∞ 2v/(1+v^4) dv = π/2
        let est = integrate_positive(
            |v| 2.0 * v / (1.0 + v.powi(4)),
            0.0,
            f64::INFINITY,
            1.0,
            &tight(),
        )
        .unwrap();
        assert!((est.value - PI / 2.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn integrable_singularity_at_zero() {
        // ∫_0^1 x^{-1/2} dx = 2
        let est = integrate_positive(|x| x.powf(-0.5), 0.0, 1.0, 0.5, &tight()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn gaussian_far_from_anchor() {
        // anchor six decades off the bulk of the mass
        let est = integrate_positive(
            |r| 2.0 * r * (-r * r).exp(),
            0.0,
            f64::INFINITY,
            1e-6,
            &tight(),
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(integrate(|x| x, 1.0, 0.0, &tight()).is_err());
        assert!(integrate_positive(|x| x, -1.0, 1.0, 1.0, &tight()).is_err());
        assert!(QuadratureSpec::new(0.0, 1e-9).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let spec = QuadratureSpec { max_subdivisions: 2, ..tight() };
        let err = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, &spec).unwrap_err();
        assert!(matches!(err, QuadError::NoConvergence { .. }));
    }
}
