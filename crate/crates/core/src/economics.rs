//! Rates, licensing utilities and interference-threshold sweeps.
//!
//! Rates are per unit area: `R = W λ^R / n · log(1 + τ*)` with `τ*` the
//! median SINR and `n = 1 + 1.28 λ^R/λ^T` the mean load of a BS.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, AnalyticModel};
use crate::geometry::{HomeLinkDistribution, OperatorConfig, PowerRule};
use crate::montecarlo::{CoverageCurve, Operator};
use crate::quadrature::QuadratureSpec;
use crate::units::db_to_linear;

pub const LOAD_CONSTANT: f64 = 1.28;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EconomicsError {
    #[error("{0}")]
    Invalid(String),
    #[error("threshold {tau:e} lies outside the tabulated range [{lo:e}, {hi:e}]")]
    Extrapolation { tau: f64, lo: f64, hi: f64 },
    #[error("coverage does not cross {target} between SINR {lo:e} and {hi:e}")]
    NoCrossing { target: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

fn invalid(msg: impl Into<String>) -> EconomicsError {
    EconomicsError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    /// Bits.
    #[default]
    Two,
    /// Nats.
    Natural,
}

impl LogBase {
    pub fn log1p(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.ln_1p() / std::f64::consts::LN_2,
            LogBase::Natural => x.ln_1p(),
        }
    }

    /// Inverse of `log1p`: `base^y − 1`.
    pub fn exp_m1(self, y: f64) -> f64 {
        match self {
            LogBase::Two => (y * std::f64::consts::LN_2).exp_m1(),
            LogBase::Natural => y.exp_m1(),
        }
    }
}

/// `n = 1 + 1.28 λ^R/λ^T`.
pub fn mean_load(user_density: f64, bs_density: f64) -> f64 {
    1.0 + LOAD_CONSTANT * user_density / bs_density
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadModel {
    pub mean_load_primary: f64,
    pub mean_load_secondary: f64,
    /// Hz.
    pub bandwidth: f64,
    pub log_base: LogBase,
}

impl LoadModel {
    pub fn new(mean_load_primary: f64, mean_load_secondary: f64, bandwidth: f64, log_base: LogBase) -> Result<Self, EconomicsError> {
        let m = Self { mean_load_primary, mean_load_secondary, bandwidth, log_base };
        m.validate()?;
        Ok(m)
    }

    pub fn from_operators(primary: &OperatorConfig, secondary: &OperatorConfig, bandwidth: f64, log_base: LogBase) -> Result<Self, EconomicsError> {
        Self::new(
            mean_load(primary.user_density, primary.bs_density),
            mean_load(secondary.user_density, secondary.bs_density),
            bandwidth,
            log_base,
        )
    }

    pub fn validate(&self) -> Result<(), EconomicsError> {
        if !(self.mean_load_primary >= 1.0 && self.mean_load_secondary >= 1.0) {
            return Err(invalid("mean loads must be at least 1"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(invalid(format!("bandwidth must be positive, got {}", self.bandwidth)));
        }
        Ok(())
    }

    pub fn load(&self, operator: Operator) -> f64 {
        match operator {
            Operator::Primary => self.mean_load_primary,
            Operator::Secondary => self.mean_load_secondary,
        }
    }

    /// SINR a user must exceed to get `rho` bits/s: `2^{ρn/W} − 1`.
    pub fn rate_threshold(&self, operator: Operator, rho: f64) -> f64 {
        self.log_base.exp_m1(rho * self.load(operator) / self.bandwidth)
    }
}

/// Where coverage values come from.
#[derive(Debug, Clone, Copy)]
pub enum CoverageSource<'a> {
    Curve(&'a CoverageCurve),
    Analytic { model: &'a AnalyticModel, operator: Operator },
}

impl CoverageSource<'_> {
    pub fn operator(&self) -> Operator {
        match self {
            CoverageSource::Curve(c) => c.operator,
            CoverageSource::Analytic { operator, .. } => *operator,
        }
    }

    pub fn coverage(&self, tau: f64) -> Result<f64, EconomicsError> {
        if tau == 0.0 {
            return Ok(1.0);
        }
        match self {
            CoverageSource::Curve(c) => c.interpolate(tau).ok_or_else(|| EconomicsError::Extrapolation {
                tau,
                lo: c.thresholds.first().copied().unwrap_or(f64::NAN),
                hi: c.thresholds.last().copied().unwrap_or(f64::NAN),
            }),
            CoverageSource::Analytic { model, operator } => Ok(model.coverage_of(*operator, tau)?),
        }
    }

    fn bracket_limits(&self) -> (f64, f64) {
        match self {
            CoverageSource::Curve(c) => (c.thresholds[0], c.thresholds[c.thresholds.len() - 1]),
            CoverageSource::Analytic { .. } => (1e-15, 1e15),
        }
    }
}

/// `R^c(ρ) = P^c(2^{ρn/W} − 1)`.
pub fn rate_coverage(source: CoverageSource, load: &LoadModel, rho: f64) -> Result<f64, EconomicsError> {
    if !(rho >= 0.0) {
        return Err(invalid(format!("rate threshold must be non-negative, got {rho}")));
    }
    source.coverage(load.rate_threshold(source.operator(), rho))
}

/// SINR tolerance of inverse coverage.
pub const INVERSE_TOL: f64 = 1e-4;

/// The SINR `τ` with `P^c(τ) = target`, bracketed in `ln τ`.
///
/// Regula falsi with the Illinois modification; the bracket shrinks until
/// its width is below `1e-4` both absolutely and relative to `τ`.
pub fn inverse_coverage(source: CoverageSource, target: f64) -> Result<f64, EconomicsError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!("coverage level must lie in (0, 1), got {target}")));
    }
    let (min_tau, max_tau) = source.bracket_limits();
    let f = |y: f64| -> Result<f64, EconomicsError> { Ok(source.coverage(y.exp())? - target) };

    // Start at [-20, 20] dB and widen by 10 dB per side until the sign changes.
    let step = 10f64.ln();
    let (y_min, y_max) = (min_tau.ln(), max_tau.ln());
    let mut lo = (0.01f64).ln().max(y_min);
    let mut hi = (100f64).ln().min(y_max);
    let mut f_lo = f(lo)?;
    while f_lo < 0.0 {
        if lo <= y_min {
            return Err(EconomicsError::NoCrossing { target, lo: min_tau, hi: max_tau });
        }
        hi = lo;
        lo = (lo - step).max(y_min);
        f_lo = f(lo)?;
    }
    let mut f_hi = f(hi)?;
    while f_hi > 0.0 {
        if hi >= y_max {
            return Err(EconomicsError::NoCrossing { target, lo: min_tau, hi: max_tau });
        }
        lo = hi;
        f_lo = f_hi;
        hi = (hi + step).min(y_max);
        f_hi = f(hi)?;
    }
    if f_lo == 0.0 {
        return Ok(lo.exp());
    }
    if f_hi == 0.0 {
        return Ok(hi.exp());
    }

    let mut side = 0i8;
    for _ in 0..200 {
        let (t_lo, t_hi) = (lo.exp(), hi.exp());
        if t_hi - t_lo <= INVERSE_TOL * t_lo.min(1.0) {
            break;
        }
        let mut y = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(y > lo && y < hi) {
            y = 0.5 * (lo + hi);
        }
        let fy = f(y)?;
        if fy == 0.0 {
            return Ok(y.exp());
        }
        if fy > 0.0 {
            lo = y;
            f_lo = fy;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = y;
            f_hi = fy;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Median area rate `W λ^R / n · log(1 + τ*)` in bits/s per m².
pub fn median_rate(source: CoverageSource, user_density: f64, load: &LoadModel) -> Result<f64, EconomicsError> {
    let tau = inverse_coverage(source, 0.5)?;
    Ok(rate_from_median_sinr(tau, user_density, load.load(source.operator()), load))
}

pub fn rate_from_median_sinr(tau: f64, user_density: f64, n: f64, load: &LoadModel) -> f64 {
    load.bandwidth * user_density / n * load.log_base.log1p(tau)
}

/// Revenue and licensing functions; all map a median area rate to
/// currency per unit area.
pub trait Pricing: Sync {
    fn revenue_primary(&self, rate: f64) -> f64;
    fn revenue_secondary(&self, rate: f64) -> f64;
    /// Primary operator to the central entity.
    fn license_primary(&self, rate_primary: f64) -> f64;
    /// Secondary operator to the central entity.
    fn license_secondary_central(&self, rate_secondary: f64) -> f64;
    /// Secondary operator to the primary operator.
    fn license_secondary_primary(&self, rate_secondary: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearPricing {
    pub m_p: f64,
    pub m_s: f64,
    pub pi_p: f64,
    pub pi_sc: f64,
    pub pi_sp: f64,
}

impl Default for LinearPricing {
    fn default() -> Self {
        Self { m_p: 1.0, m_s: 1.0, pi_p: 0.25, pi_sc: 0.125, pi_sp: 0.25 }
    }
}

impl LinearPricing {
    pub fn validate(&self) -> Result<(), EconomicsError> {
        let all = [self.m_p, self.m_s, self.pi_p, self.pi_sc, self.pi_sp];
        if all.iter().all(|c| *c >= 0.0 && c.is_finite()) {
            Ok(())
        } else {
            Err(invalid("linear pricing constants must be non-negative"))
        }
    }
}

impl Pricing for LinearPricing {
    fn revenue_primary(&self, rate: f64) -> f64 {
        self.m_p * rate
    }
    fn revenue_secondary(&self, rate: f64) -> f64 {
        self.m_s * rate
    }
    fn license_primary(&self, rate_primary: f64) -> f64 {
        self.pi_p * rate_primary
    }
    fn license_secondary_central(&self, rate_secondary: f64) -> f64 {
        self.pi_sc * rate_secondary
    }
    fn license_secondary_primary(&self, rate_secondary: f64) -> f64 {
        self.pi_sp * rate_secondary
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityReport {
    pub xi: f64,
    pub rate_primary: f64,
    pub rate_secondary: f64,
    pub utility_primary: f64,
    pub utility_secondary: f64,
    pub utility_central: f64,
    pub revenue_primary: f64,
    pub revenue_secondary: f64,
    pub payment_primary_central: f64,
    pub payment_secondary_central: f64,
    pub payment_secondary_primary: f64,
}

impl UtilityReport {
    /// `U_P + U_C`.
    pub fn utility_total(&self) -> f64 {
        self.utility_primary + self.utility_central
    }
}

pub fn utilities(xi: f64, rate_primary: f64, rate_secondary: f64, pricing: &dyn Pricing) -> Result<UtilityReport, EconomicsError> {
    if !(rate_primary >= 0.0 && rate_secondary >= 0.0) {
        return Err(invalid("median rates must be non-negative"));
    }
    let revenue_primary = pricing.revenue_primary(rate_primary);
    let revenue_secondary = pricing.revenue_secondary(rate_secondary);
    let pp = pricing.license_primary(rate_primary);
    let psc = pricing.license_secondary_central(rate_secondary);
    let psp = pricing.license_secondary_primary(rate_secondary);
    Ok(UtilityReport {
        xi,
        rate_primary,
        rate_secondary,
        utility_primary: revenue_primary - pp + psp,
        utility_secondary: revenue_secondary - psc - psp,
        utility_central: pp + psc,
        revenue_primary,
        revenue_secondary,
        payment_primary_central: pp,
        payment_secondary_central: psc,
        payment_secondary_primary: psp,
    })
}

/// `n` points from `lo_db` to `hi_db` evenly spaced in dB, as watts.
pub fn xi_grid_db(lo_db: f64, hi_db: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![db_to_linear(lo_db)];
    }
    (0..n).map(|i| db_to_linear(lo_db + (hi_db - lo_db) * i as f64 / (n - 1) as f64)).collect()
}

/// −130 dB to −90 dB in 2 dB steps.
pub fn default_xi_grid() -> Vec<f64> {
    xi_grid_db(-130.0, -90.0, 21)
}

fn check_grid(grid: &[f64]) -> Result<(), EconomicsError> {
    if grid.is_empty() {
        return Err(invalid("ξ grid is empty"));
    }
    if grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("ξ grid must be positive and strictly ascending"));
    }
    Ok(())
}

fn with_xi(secondary: &OperatorConfig, xi: f64) -> OperatorConfig {
    OperatorConfig { power_rule: PowerRule::InterferenceCap { xi }, ..*secondary }
}

/// Median area rates `(R_P, R_S)` of a two-operator band.
pub fn median_rates(model: &AnalyticModel, bandwidth: f64, log_base: LogBase) -> Result<(f64, f64), EconomicsError> {
    let load = LoadModel::from_operators(&model.primary, &model.secondary, bandwidth, log_base)?;
    let rp = median_rate(CoverageSource::Analytic { model, operator: Operator::Primary }, model.primary.user_density, &load)?;
    let rs = median_rate(CoverageSource::Analytic { model, operator: Operator::Secondary }, model.secondary.user_density, &load)?;
    Ok((rp, rs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub xi: f64,
    pub report: Option<UtilityReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiSweep {
    pub points: Vec<SweepPoint>,
    pub argmax_primary: Option<f64>,
    pub argmax_secondary: Option<f64>,
    pub argmax_central: Option<f64>,
    /// Maximizer of `U_P + U_C`.
    pub argmax_total: Option<f64>,
}

impl XiSweep {
    pub fn reports(&self) -> impl Iterator<Item = &UtilityReport> {
        self.points.iter().filter_map(|p| p.report.as_ref())
    }

    /// Grid index of the maximizer of `key`; the first one on ties.
    pub fn argmax_index<F: Fn(&UtilityReport) -> f64>(&self, key: F) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.points.iter().enumerate() {
            if let Some(r) = &p.report {
                let v = key(r);
                if best.map_or(true, |(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Median rates and utilities at each `ξ` of the grid. Failures at single
/// points are recorded and the sweep continues.
pub fn sweep_xi(
    model: &AnalyticModel,
    xi_grid: &[f64],
    bandwidth: f64,
    log_base: LogBase,
    pricing: &dyn Pricing,
) -> Result<XiSweep, EconomicsError> {
    check_grid(xi_grid)?;
    if !model.secondary.power_rule.is_restricted() {
        return Err(invalid("ξ sweeps need an interference-capped secondary operator"));
    }
    let points: Vec<SweepPoint> = xi_grid
        .par_iter()
        .map(|&xi| {
            let outcome = model
                .with_operators(model.primary, with_xi(&model.secondary, xi))
                .map_err(EconomicsError::from)
                .and_then(|m| median_rates(&m, bandwidth, log_base))
                .and_then(|(rp, rs)| utilities(xi, rp, rs, pricing));
            match outcome {
                Ok(r) => SweepPoint { xi, report: Some(r), error: None },
                Err(e) => SweepPoint { xi, report: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let mut sweep = XiSweep { points, argmax_primary: None, argmax_secondary: None, argmax_central: None, argmax_total: None };
    let at = |i: Option<usize>| i.map(|i| xi_grid[i]);
    sweep.argmax_primary = at(sweep.argmax_index(|r| r.utility_primary));
    sweep.argmax_secondary = at(sweep.argmax_index(|r| r.utility_secondary));
    sweep.argmax_central = at(sweep.argmax_index(|r| r.utility_central));
    sweep.argmax_total = at(sweep.argmax_index(|r| r.utility_total()));
    Ok(sweep)
}

/// `E[X̄]` for home users of the given density.
pub fn mean_normalized_power(model: &AnalyticModel, user_density: f64) -> Result<f64, EconomicsError> {
    let home = HomeLinkDistribution::new(model.channel, user_density).map_err(AnalyticError::from)?;
    let spec = QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-300, ..QuadratureSpec::default() };
    Ok(home.normalized_power_moments(|x| x, &spec).map_err(AnalyticError::from)?.value)
}

/// Common power of every BS under uncoordinated sharing that matches the
/// total transmit power of restricted sharing over both bands.
///
/// Band 1 has A at `P_A` and B capped at `ξ` toward A's users; band 2 is
/// the mirror image.
pub fn matched_uncoordinated_power(
    density_a: f64,
    power_a: f64,
    mean_x_a: f64,
    density_b: f64,
    power_b: f64,
    mean_x_b: f64,
    xi: f64,
) -> f64 {
    let total = density_a * power_a + density_b * xi * mean_x_a + density_b * power_b + density_a * xi * mean_x_b;
    total / (2.0 * (density_a + density_b))
}

/// Median rates of operator A in the two mirrored bands at one `(λ_B, ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub secondary_density: f64,
    pub xi: f64,
    pub restricted_primary_band: f64,
    pub restricted_secondary_band: f64,
    pub restricted_sum: f64,
    pub uncoordinated_power: f64,
    pub uncoordinated_primary_band: f64,
    pub uncoordinated_secondary_band: f64,
    pub uncoordinated_sum: f64,
}

impl ModeRow {
    pub fn gain(&self) -> f64 {
        self.restricted_sum - self.uncoordinated_sum
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub rows: Vec<ModeRow>,
    /// Per secondary density: `max_ξ (restricted sum − uncoordinated sum)`.
    pub best_gain: Vec<(f64, f64)>,
    pub failures: Vec<(f64, f64, String)>,
}

/// Restricted licensing against uncoordinated sharing for two operators
/// that are each primary in one band and secondary in the other.
///
/// Operator A is `model.primary`; operator B is `model.secondary` with its
/// BS density replaced by each entry of `secondary_densities`. In its own
/// band B transmits at A's fixed power.
pub fn compare_sharing_modes(
    model: &AnalyticModel,
    secondary_densities: &[f64],
    xi_grid: &[f64],
    bandwidth: f64,
    log_base: LogBase,
) -> Result<ModeComparison, EconomicsError> {
    check_grid(xi_grid)?;
    if secondary_densities.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(invalid("secondary densities must be positive"));
    }
    let a = model.primary;
    let p_fixed = match a.power_rule {
        PowerRule::Fixed { watts } => watts,
        PowerRule::InterferenceCap { .. } => return Err(invalid("operator A must have a fixed power")),
    };
    let mean_x_a = mean_normalized_power(model, a.user_density)?;
    let mean_x_b = mean_normalized_power(model, model.secondary.user_density)?;

    let jobs: Vec<(f64, f64)> = secondary_densities.iter().flat_map(|&d| xi_grid.iter().map(move |&x| (d, x))).collect();
    let results: Vec<Result<ModeRow, EconomicsError>> = jobs
        .par_iter()
        .map(|&(density_b, xi)| {
            let b = OperatorConfig { bs_density: density_b, ..model.secondary };
            let a_fixed = OperatorConfig { power_rule: PowerRule::Fixed { watts: p_fixed }, ..a };
            let b_fixed = OperatorConfig { power_rule: PowerRule::Fixed { watts: p_fixed }, ..b };
            let load_a = mean_load(a.user_density, a.bs_density);
            let load = |n: f64| LoadModel::new(n, n, bandwidth, log_base);

            // Band 1: A primary, B capped at ξ.
            let band1 = model.with_operators(a_fixed, with_xi(&b, xi))?;
            let r1 = median_rate(CoverageSource::Analytic { model: &band1, operator: Operator::Primary }, a.user_density, &load(load_a)?)?;
            // Band 2: B primary, A capped at ξ toward B's users.
            let band2 = model.with_operators(b_fixed, with_xi(&a, xi))?;
            let r2 = median_rate(CoverageSource::Analytic { model: &band2, operator: Operator::Secondary }, a.user_density, &load(load_a)?)?;

            let pu = matched_uncoordinated_power(a.bs_density, p_fixed, mean_x_a, density_b, p_fixed, mean_x_b, xi);
            let a_u = OperatorConfig { power_rule: PowerRule::Fixed { watts: pu }, ..a };
            let b_u = OperatorConfig { power_rule: PowerRule::Fixed { watts: pu }, ..b };
            let u1 = model.with_operators(a_u, b_u)?;
            let q1 = median_rate(CoverageSource::Analytic { model: &u1, operator: Operator::Primary }, a.user_density, &load(load_a)?)?;
            let u2 = model.with_operators(b_u, a_u)?;
            let q2 = median_rate(CoverageSource::Analytic { model: &u2, operator: Operator::Secondary }, a.user_density, &load(load_a)?)?;

            Ok(ModeRow {
                secondary_density: density_b,
                xi,
                restricted_primary_band: r1,
                restricted_secondary_band: r2,
                restricted_sum: r1 + r2,
                uncoordinated_power: pu,
                uncoordinated_primary_band: q1,
                uncoordinated_secondary_band: q2,
                uncoordinated_sum: q1 + q2,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (job, r) in jobs.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((job.0, job.1, e.to_string())),
        }
    }
    let best_gain = secondary_densities
        .iter()
        .filter_map(|&d| {
            rows.iter()
                .filter(|r| r.secondary_density == d)
                .map(ModeRow::gain)
                .fold(None, |m: Option<f64>, g| Some(m.map_or(g, |m| m.max(g))))
                .map(|g| (d, g))
        })
        .collect();
    Ok(ModeComparison { rows, best_gain, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::Provenance;

    fn curve(values: Vec<f64>, thresholds: Vec<f64>) -> CoverageCurve {
        CoverageCurve {
            operator: Operator::Secondary,
            ci_halfwidth: vec![0.0; values.len()],
            thresholds,
            values,
            provenance: Provenance::Analytic { rel_tol: 0.0 },
        }
    }

    #[test]
    fn load_examples() {
        assert!((mean_load(1.0, 1.0) - 2.28).abs() < 1e-15);
        let load = LoadModel::new(1.0, 1.0, 500e6, LogBase::Two).unwrap();
        assert!((load.rate_threshold(Operator::Primary, 500e6) - 1.0).abs() < 1e-15);
        assert_eq!(load.rate_threshold(Operator::Primary, 0.0), 0.0);
        assert!(LoadModel::new(0.5, 1.0, 1.0, LogBase::Two).is_err());
    }

    #[test]
    fn rate_coverage_from_curve() {
        let th: Vec<f64> = (0..=40).map(|i| 10f64.powf(-2.0 + 0.1 * i as f64)).collect();
        let vals: Vec<f64> = th.iter().map(|t| 1.0 / (1.0 + t)).collect();
        let c = curve(vals, th);
        let load = LoadModel::new(1.0, 1.0, 500e6, LogBase::Two).unwrap();
        assert_eq!(rate_coverage(CoverageSource::Curve(&c), &load, 0.0).unwrap(), 1.0);
        assert!((rate_coverage(CoverageSource::Curve(&c), &load, 500e6).unwrap() - 0.5).abs() < 1e-12);
        let scaled = LoadModel { bandwidth: 1e9, ..load };
        let a = rate_coverage(CoverageSource::Curve(&c), &load, 2e8).unwrap();
        let b = rate_coverage(CoverageSource::Curve(&c), &scaled, 4e8).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(matches!(
            rate_coverage(CoverageSource::Curve(&c), &load, 1e10),
            Err(EconomicsError::Extrapolation { .. })
        ));
    }

    #[test]
    fn inverse_and_median() {
        let th: Vec<f64> = (0..=80).map(|i| 10f64.powf(-4.0 + 0.1 * i as f64)).collect();
        let vals: Vec<f64> = th.iter().map(|t| 1.0 / (1.0 + t / 3.0)).collect();
        let c = curve(vals, th);
        let tau = inverse_coverage(CoverageSource::Curve(&c), 0.5).unwrap();
        assert!((CoverageSource::Curve(&c).coverage(tau).unwrap() - 0.5).abs() < 1e-4);
        let load = LoadModel::new(2.0, 2.0, 500e6, LogBase::Two).unwrap();
        let r = median_rate(CoverageSource::Curve(&c), 1e-4, &load).unwrap();
        let wide = LoadModel { bandwidth: 1e9, ..load };
        let r2 = median_rate(CoverageSource::Curve(&c), 1e-4, &wide).unwrap();
        assert!((r2 / r - 2.0).abs() < 1e-12);
        assert!((r - 500e6 * 1e-4 / 2.0 * (1.0 + tau).log2()).abs() < 1e-9 * r);
        let flat = curve(vec![0.3, 0.2], vec![0.1, 10.0]);
        assert!(matches!(inverse_coverage(CoverageSource::Curve(&flat), 0.5), Err(EconomicsError::NoCrossing { .. })));
    }

    #[test]
    fn linear_pricing_examples() {
        let p = LinearPricing::default();
        let r = utilities(1e-12, 3.0, 0.0, &p).unwrap();
        assert_eq!(r.utility_secondary, 0.0);
        assert!((r.utility_primary - 0.75 * 3.0).abs() < 1e-15);
        let r = utilities(1e-12, 4.0, 8.0, &p).unwrap();
        assert!((r.utility_central - (0.25 * 4.0 + 0.125 * 8.0)).abs() < 1e-15);
        let sum = r.utility_primary + r.utility_secondary + r.utility_central;
        assert!((sum - (4.0 + 8.0)).abs() < 1e-12);
    }

    #[test]
    fn xi_grid_default() {
        let g = default_xi_grid();
        assert_eq!(g.len(), 21);
        assert!((g[0] - 1e-13).abs() < 1e-25);
        assert!((g[20] - 1e-9).abs() < 1e-21);
        assert!(check_grid(&[1.0, 0.5]).is_err());
    }

    #[test]
    fn matched_power_for_equal_users() {
        let p = matched_uncoordinated_power(30e-6, 10.0, 2e10, 60e-6, 10.0, 2e10, 1e-12);
        assert!((p - (10.0 + 1e-12 * 2e10) / 2.0).abs() < 1e-12);
    }
}
