//! SINR coverage of the typical user of either network.
//!
//! The serving BS is the strongest one of the user's own network. In scaled
//! distance `u` its link type `t0` has density `2πλ κ_t0(u) u` and the void
//! probability of stronger BSs is `exp(-2πλ Σ_t Q_t(u^{α_t0/α_t}))`.

use std::cell::RefCell;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::geometry::LinkType;
use crate::montecarlo::{CoverageCurve, Operator, Provenance};
use crate::quadrature::{integrate_positive, QuadratureSpec};

use super::laplace::{functional, native_term};
use super::{AnalyticError, AnalyticModel, Tier};

// exp() of anything below this is zero in double precision.
const LOG_FLOOR: f64 = -745.0;

struct Setup<'a> {
    own: &'a Tier,
    other: &'a Tier,
    // Secondary BSs homed at the probed primary user are handled natively.
    native: bool,
    noise: f64,
}

impl AnalyticModel {
    /// Probability that a typical secondary user's SINR exceeds `tau`.
    pub fn coverage_secondary(&self, tau: f64) -> Result<f64, AnalyticError> {
        let setup = Setup {
            own: self.secondary_tier(),
            other: self.primary_tier(),
            native: false,
            noise: self.secondary.noise_power,
        };
        self.coverage(&setup, tau)
    }

    /// Probability that a typical primary user's SINR exceeds `tau`.
    pub fn coverage_primary(&self, tau: f64) -> Result<f64, AnalyticError> {
        let setup = Setup {
            own: self.primary_tier(),
            other: self.secondary_tier(),
            native: self.xi().is_some(),
            noise: self.primary.noise_power,
        };
        self.coverage(&setup, tau)
    }

    pub fn coverage_of(&self, operator: Operator, tau: f64) -> Result<f64, AnalyticError> {
        match operator {
            Operator::Primary => self.coverage_primary(tau),
            Operator::Secondary => self.coverage_secondary(tau),
        }
    }

    /// Coverage at each threshold, evaluated in parallel.
    pub fn coverage_curve(&self, operator: Operator, thresholds: &[f64]) -> Result<CoverageCurve, AnalyticError> {
        let values = thresholds
            .par_iter()
            .map(|&tau| self.coverage_of(operator, tau))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CoverageCurve {
            operator,
            thresholds: thresholds.to_vec(),
            ci_halfwidth: vec![0.0; values.len()],
            values,
            provenance: Provenance::Analytic { rel_tol: self.options.spec.rel_tol },
        })
    }

    fn coverage(&self, setup: &Setup, tau: f64) -> Result<f64, AnalyticError> {
        if !(tau > 0.0) || tau.is_nan() {
            return Err(AnalyticError::Invalid(format!("SINR threshold must be positive, got {tau}")));
        }
        if tau.is_infinite() {
            return Ok(0.0);
        }
        let own = setup.own;
        let g1 = own.antenna.main_gain;
        let ch = self.channel;
        let inner = self.inner_spec();
        let mut total = 0.0;
        for t0 in LinkType::ALL {
            let a0 = ch.alpha(t0);
            let failure: RefCell<Option<AnalyticError>> = RefCell::new(None);
            let integrand = |u: f64| -> f64 {
                if u == 0.0 || failure.borrow().is_some() {
                    return 0.0;
                }
                match self.integrand(setup, t0, a0, g1, tau, u, &inner) {
                    Ok(v) => v,
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        0.0
                    }
                }
            };
            let anchor = (1.0 / (PI * own.density).sqrt() / own.kernel.typical_reach(t0)).max(1e-12);
            let est = integrate_positive(integrand, 0.0, f64::INFINITY, anchor, &self.options.spec);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            total += est?.value;
        }
        Ok(total.clamp(0.0, 1.0))
    }

    #[allow(clippy::too_many_arguments)]
    fn integrand(
        &self,
        setup: &Setup,
        t0: LinkType,
        a0: f64,
        g1: f64,
        tau: f64,
        u: f64,
        inner: &QuadratureSpec,
    ) -> Result<f64, AnalyticError> {
        let own = setup.own;
        let other = setup.other;
        let k0 = own.kernel.value(t0, u);
        if k0 == 0.0 {
            return Ok(0.0);
        }
        let ch = self.channel;
        let e = u.powf(a0);
        let void: f64 = LinkType::ALL.iter().map(|&t| own.kernel.cumulative(t, e.powf(1.0 / ch.alpha(t)))).sum();
        let s = tau * e / (own.q * g1);
        let mut log = -2.0 * PI * own.density * void - s * setup.noise;
        if log < LOG_FLOOR {
            return Ok(0.0);
        }
        for (w, g) in own.antenna.lobes() {
            if w == 0.0 || g == 0.0 {
                continue;
            }
            log -= own.density * w * functional(&own.kernel, s * own.q * g, e, inner)?;
            if log < LOG_FLOOR {
                return Ok(0.0);
            }
        }
        for (w, g) in other.antenna.lobes() {
            if w == 0.0 || g == 0.0 {
                continue;
            }
            let b = s * other.q * g;
            let f = if setup.native {
                functional(&other.kernel, b, 1.0, inner)? + native_term(&other.kernel, b)
            } else {
                functional(&other.kernel, b, 0.0, inner)?
            };
            log -= other.density * w * f;
            if log < LOG_FLOOR {
                return Ok(0.0);
            }
        }
        Ok(2.0 * PI * own.density * k0 * u * log.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::special::ClosedForm;
    use crate::analytic::EngineOptions;
    use crate::geometry::{AntennaPattern, Blockage, ChannelModel, OperatorConfig, PowerRule};

    fn operators(noise: f64, antenna: AntennaPattern, xi: f64) -> (OperatorConfig, OperatorConfig) {
        let primary = OperatorConfig {
            bs_density: 30e-6,
            user_density: 200e-6,
            antenna,
            power_rule: PowerRule::Fixed { watts: 10.0 },
            noise_power: noise,
        };
        let secondary = OperatorConfig { power_rule: PowerRule::InterferenceCap { xi }, ..primary };
        (primary, secondary)
    }

    #[test]
    fn equal_parameters_match_closed_forms() {
        let ch = ChannelModel::equal_parameters(Blockage::Exponential { beta: 150.0 }, 4.0, 1e-6).unwrap();
        let ant = AntennaPattern::sectored(10.0, PI / 6.0).unwrap();
        for noise in [0.0, 1e-11] {
            let (p, s) = operators(noise, ant, 1e-11);
            let model = AnalyticModel::new(ch, p, s, EngineOptions::default()).unwrap();
            let form = ClosedForm::from_channel(&ch, p, s).unwrap();
            for tau in [0.1, 1.0, 10.0] {
                let a = model.coverage_secondary(tau).unwrap();
                let b = form.coverage_secondary(tau).unwrap();
                assert!((a - b).abs() < 1e-5, "secondary noise={noise} τ={tau}: {a} vs {b}");
                let a = model.coverage_primary(tau).unwrap();
                let b = form.coverage_primary(tau).unwrap();
                assert!((a - b).abs() < 1e-5, "primary noise={noise} τ={tau}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn baseline_coverage_is_monotone() {
        let ch = ChannelModel::baseline();
        let ant = AntennaPattern::sectored(10.0, PI / 6.0).unwrap();
        let (p, s) = operators(1e-11, ant, 1e-12);
        let model = AnalyticModel::new(ch, p, s, EngineOptions::default()).unwrap();
        for op in [Operator::Primary, Operator::Secondary] {
            let mut prev = 1.0;
            for i in 0..12 {
                let tau = 10f64.powf(-1.5 + 0.3 * i as f64);
                let c = model.coverage_of(op, tau).unwrap();
                assert!((0.0..=1.0).contains(&c));
                assert!(c <= prev + 1e-6, "{op:?} τ={tau}: {c} > {prev}");
                prev = c;
            }
        }
    }
}
