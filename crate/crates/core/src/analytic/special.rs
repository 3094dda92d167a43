//! Equal-parameter closed forms.
//!
//! With identical LOS and NLOS parameters the kernels are constants,
//! `K = 1/(πλ_P^R)` and `M = (P_P C)^{2/α}`, and every functional reduces to
//! `ρ(α, τ) = ∫_{τ^{-1/α}}^∞ 2v/(1 + v^α) dv`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{ChannelModel, LinkType, OperatorConfig, PowerRule};
use crate::quadrature::{integrate, integrate_positive, QuadratureSpec};

use super::AnalyticError;

/// `ρ(α, τ)`; `τ = ∞` gives `ρ(α)`.
pub fn rho(alpha: f64, tau: f64) -> Result<f64, AnalyticError> {
    check_alpha(alpha)?;
    if !(tau >= 0.0) {
        return Err(AnalyticError::Invalid(format!("ρ needs a non-negative limit, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    if alpha == 4.0 {
        return Ok(tau.sqrt().atan());
    }
    let full = rho_full(alpha);
    if tau.is_infinite() {
        return Ok(full);
    }
    let lower = tau.powf(-1.0 / alpha);
    // Whichever side of the split is shorter is integrated directly.
    if lower <= 1.0 {
        let head = integrate(|v| 2.0 * v / (1.0 + v.powf(alpha)), 0.0, lower, &QuadratureSpec::precise())?;
        Ok(full - head.value)
    } else {
        // v = 1/w maps [lower, ∞) onto (0, 1/lower].
        let tail = integrate(
            |w: f64| 2.0 * w.powf(alpha - 3.0) / (w.powf(alpha) + 1.0),
            0.0,
            1.0 / lower,
            &QuadratureSpec::precise(),
        )?;
        Ok(tail.value)
    }
}

/// `ρ(α, ∞) = (2π/α) / sin(2π/α)`.
fn rho_full(alpha: f64) -> f64 {
    let x = 2.0 * PI / alpha;
    x / x.sin()
}

/// `ρ(α, τ)` by direct quadrature of its definition.
pub fn rho_quadrature(alpha: f64, tau: f64, spec: &QuadratureSpec) -> Result<f64, AnalyticError> {
    check_alpha(alpha)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let lower = if tau.is_infinite() { 0.0 } else { tau.powf(-1.0 / alpha) };
    let est = integrate_positive(|v| 2.0 * v / (1.0 + v.powf(alpha)), lower, f64::INFINITY, lower.max(1.0), spec)?;
    Ok(est.value)
}

fn check_alpha(alpha: f64) -> Result<(), AnalyticError> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::Invalid(format!("ρ diverges for path-loss exponent {alpha} <= 2")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialCaseParams {
    pub alpha: f64,
    pub c: f64,
    pub interference_limited: bool,
    pub zero_side_lobe: bool,
}

impl SpecialCaseParams {
    /// Reads the flags off a configuration; fails unless LOS and NLOS share
    /// their parameters.
    pub fn derive(channel: &ChannelModel, primary: &OperatorConfig, secondary: &OperatorConfig) -> Result<Self, AnalyticError> {
        if !channel.has_equal_parameters() {
            return Err(AnalyticError::Invalid("closed forms need identical LOS and NLOS parameters".into()));
        }
        Ok(Self {
            alpha: channel.alpha(LinkType::Los),
            c: channel.c(LinkType::Los),
            interference_limited: primary.noise_power == 0.0 && secondary.noise_power == 0.0,
            zero_side_lobe: primary.antenna.side_gain == 0.0 && secondary.antenna.side_gain == 0.0,
        })
    }
}

/// Closed-form evaluator for one equal-parameter configuration with a
/// restricted secondary network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub params: SpecialCaseParams,
    pub primary: OperatorConfig,
    pub secondary: OperatorConfig,
    p_power: f64,
    xi: f64,
}

impl ClosedForm {
    pub fn new(params: SpecialCaseParams, primary: OperatorConfig, secondary: OperatorConfig) -> Result<Self, AnalyticError> {
        primary.validate()?;
        secondary.validate()?;
        check_alpha(params.alpha)?;
        if !(params.c > 0.0) {
            return Err(AnalyticError::Invalid("path-loss constant must be positive".into()));
        }
        let p_power = match primary.power_rule {
            PowerRule::Fixed { watts } => watts,
            _ => return Err(AnalyticError::Invalid("the primary operator must transmit at fixed power".into())),
        };
        let xi = match secondary.power_rule {
            PowerRule::InterferenceCap { xi } => xi,
            _ => return Err(AnalyticError::Invalid("closed forms need an interference-capped secondary".into())),
        };
        let silent = primary.noise_power == 0.0 && secondary.noise_power == 0.0;
        if params.interference_limited != silent {
            return Err(AnalyticError::Invalid("interference-limited flag disagrees with the noise powers".into()));
        }
        let no_side = primary.antenna.side_gain == 0.0 && secondary.antenna.side_gain == 0.0;
        if params.zero_side_lobe != no_side {
            return Err(AnalyticError::Invalid("zero-side-lobe flag disagrees with the antenna patterns".into()));
        }
        Ok(Self { params, primary, secondary, p_power, xi })
    }

    pub fn from_channel(channel: &ChannelModel, primary: OperatorConfig, secondary: OperatorConfig) -> Result<Self, AnalyticError> {
        Self::new(SpecialCaseParams::derive(channel, &primary, &secondary)?, primary, secondary)
    }

    /// `K = 1/(πλ_P^R)`.
    pub fn k(&self) -> f64 {
        1.0 / (PI * self.primary.user_density)
    }

    /// `M = (P_P C)^{2/α}`.
    pub fn m(&self) -> f64 {
        (self.p_power * self.params.c).powf(2.0 / self.params.alpha)
    }

    /// Coefficient of `u²` in the secondary exponent, divided by `π`.
    fn secondary_quadratic(&self, tau: f64) -> Result<f64, AnalyticError> {
        let alpha = self.params.alpha;
        let d = 2.0 / alpha;
        let gs1 = self.secondary.antenna.main_gain;
        let mut fp = 0.0;
        for (b, g) in self.primary.antenna.lobes() {
            if b > 0.0 && g > 0.0 {
                fp += b * (g / gs1).powf(d);
            }
        }
        fp *= rho(alpha, f64::INFINITY)?;
        let mut fs = 0.0;
        for (a, g) in self.secondary.antenna.lobes() {
            if a > 0.0 && g > 0.0 {
                fs += a * (g / gs1).powf(d) * rho(alpha, tau * g / gs1)?;
            }
        }
        let k = self.k();
        let lp = self.primary.bs_density;
        let ls = self.secondary.bs_density;
        Ok(lp * self.xi.powf(-d) * tau.powf(d) * self.m() * fp + ls * k * tau.powf(d) * fs + ls * k)
    }

    /// Secondary coverage; a single quadrature with noise, closed otherwise.
    pub fn coverage_secondary(&self, tau: f64) -> Result<f64, AnalyticError> {
        check_tau(tau)?;
        let ls = self.secondary.bs_density;
        let k = self.k();
        let q = self.secondary_quadratic(tau)?;
        let noise = tau * self.secondary.noise_power / (self.xi * self.secondary.antenna.main_gain);
        if noise == 0.0 {
            return Ok(ls * k / q);
        }
        // x = u²: πλK ∫ exp(-noise x^{α/2} - πq x) dx.
        let half = self.params.alpha / 2.0;
        let f = |x: f64| (-noise * x.powf(half) - PI * q * x).exp();
        let est = integrate_positive(f, 0.0, f64::INFINITY, 1.0 / (PI * q), &QuadratureSpec::precise())?;
        Ok((PI * ls * k * est.value).min(1.0))
    }

    /// The `α = 4`, zero-side-lobe, shared-beam closed form.
    pub fn coverage_secondary_arctan(&self, tau: f64) -> Result<f64, AnalyticError> {
        check_tau(tau)?;
        let pa = self.primary.antenna;
        let sa = self.secondary.antenna;
        if self.params.alpha != 4.0 || !self.params.zero_side_lobe || !self.params.interference_limited {
            return Err(AnalyticError::Invalid("the arctan form needs α = 4, zero side lobes and no noise".into()));
        }
        if pa.main_gain != sa.main_gain || pa.beamwidth != sa.beamwidth {
            return Err(AnalyticError::Invalid("the arctan form needs identical beam patterns".into()));
        }
        let theta = sa.beamwidth;
        let ratio = self.primary.bs_density / self.secondary.bs_density;
        let primary = ratio / self.xi.sqrt() * (self.params.c * self.p_power).sqrt() * self.primary.user_density * PI * PI / 2.0;
        let inner = primary + tau.sqrt().atan();
        Ok(1.0 / (1.0 + theta * tau.sqrt() / (2.0 * PI) * inner))
    }

    /// Primary coverage; retains one quadrature over the serving distance.
    pub fn coverage_primary(&self, tau: f64) -> Result<f64, AnalyticError> {
        check_tau(tau)?;
        let alpha = self.params.alpha;
        let d = 2.0 / alpha;
        let gp1 = self.primary.antenna.main_gain;
        let lp = self.primary.bs_density;
        let ls = self.secondary.bs_density;
        let k = self.k();
        let m = self.m();
        let xi = self.xi;

        let mut own = 0.0;
        for (b, g) in self.primary.antenna.lobes() {
            if b > 0.0 && g > 0.0 {
                own += b * m * (g / gp1).powf(d) * rho(alpha, tau * g / gp1)?;
            }
        }
        let secondary: Vec<(f64, f64)> = self
            .secondary
            .antenna
            .lobes()
            .into_iter()
            .filter(|&(a, g)| a > 0.0 && g > 0.0)
            .map(|(a, g)| (a, g / gp1))
            .collect();
        let quad = PI * (tau.powf(d) * lp * own + lp * m);
        let noise = tau * self.primary.noise_power / gp1;

        let failure = std::cell::RefCell::new(None);
        let f = |u: f64| -> f64 {
            let ua = u.powf(alpha);
            let mut log = -noise * ua - quad * u * u;
            for &(a, h) in &secondary {
                let r = match rho(alpha, xi * tau * ua * h) {
                    Ok(r) => r,
                    Err(e) => {
                        *failure.borrow_mut() = Some(e);
                        return 0.0;
                    }
                };
                log -= PI * ls * a * k * (tau * xi * h).powf(d) * u * u * r;
                log -= PI * ls * a * k / (1.0 + 1.0 / (tau * h * xi * ua));
            }
            2.0 * PI * lp * m * u * log.exp()
        };
        let anchor = 1.0 / quad.sqrt();
        let est = integrate_positive(f, 0.0, f64::INFINITY, anchor, &QuadratureSpec::precise());
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(est?.value.min(1.0))
    }
}

fn check_tau(tau: f64) -> Result<(), AnalyticError> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::Invalid(format!("SINR threshold must be positive and finite, got {tau}")))
    }
}

pub fn coverage_secondary_closed(tau: f64, form: &ClosedForm) -> Result<f64, AnalyticError> {
    form.coverage_secondary(tau)
}

pub fn coverage_primary_closed(tau: f64, form: &ClosedForm) -> Result<f64, AnalyticError> {
    form.coverage_primary(tau)
}
