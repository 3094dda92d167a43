//! Coverage of the typical primary and secondary users by numerical
//! evaluation of the interference Laplace functionals.
//!
//! The Laplace variable `s` is applied to physical interference power, so
//! a restricted interferer with received power `ξ v^{-α}` enters the generic
//! functional with `B = s ξ G` and a fixed-power one with `B = s G`.

pub mod kernel;
pub mod laplace;
pub mod special;

mod coverage;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    AntennaPattern, ChannelModel, GeometryError, HomeLinkDistribution, OperatorConfig, PowerRule,
};
use crate::quadrature::{QuadError, QuadratureSpec};

pub use kernel::{FixedKernel, Kernel, KernelMode, RestrictedKernel};
pub use laplace::functional;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    pub spec: QuadratureSpec,
    pub kernel_mode: KernelMode,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { spec: QuadratureSpec::default(), kernel_mode: KernelMode::Tabulated }
    }
}

/// One network as an interferer or serving field.
#[derive(Debug, Clone)]
pub struct Tier {
    pub density: f64,
    pub antenna: AntennaPattern,
    pub kernel: Kernel,
    /// Received-power scale: `ξ` for a restricted network, 1 otherwise.
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct AnalyticModel {
    pub channel: ChannelModel,
    pub primary: OperatorConfig,
    pub secondary: OperatorConfig,
    pub options: EngineOptions,
    primary_tier: Tier,
    secondary_tier: Tier,
}

impl AnalyticModel {
    pub fn new(
        channel: ChannelModel,
        primary: OperatorConfig,
        secondary: OperatorConfig,
        options: EngineOptions,
    ) -> Result<Self, AnalyticError> {
        Self::build(channel, primary, secondary, options, None)
    }

    fn build(
        channel: ChannelModel,
        primary: OperatorConfig,
        secondary: OperatorConfig,
        options: EngineOptions,
        cached: Option<Arc<RestrictedKernel>>,
    ) -> Result<Self, AnalyticError> {
        channel.validate()?;
        primary.validate()?;
        secondary.validate()?;
        options.spec.validate()?;
        let p_power = match primary.power_rule {
            PowerRule::Fixed { watts } => watts,
            PowerRule::InterferenceCap { .. } => {
                return Err(AnalyticError::Invalid("the primary operator must transmit at fixed power".into()))
            }
        };
        let primary_tier = Tier {
            density: primary.bs_density,
            antenna: primary.antenna,
            kernel: Kernel::Fixed(FixedKernel::new(channel, p_power)),
            q: 1.0,
        };
        let secondary_tier = match secondary.power_rule {
            PowerRule::Fixed { watts } => Tier {
                density: secondary.bs_density,
                antenna: secondary.antenna,
                kernel: Kernel::Fixed(FixedKernel::new(channel, watts)),
                q: 1.0,
            },
            PowerRule::InterferenceCap { xi } => {
                let home = HomeLinkDistribution::new(channel, primary.user_density)?;
                let k = match cached {
                    Some(k) if k.home == home && k.mode() == options.kernel_mode => k,
                    _ => Arc::new(RestrictedKernel::new(home, options.kernel_mode, options.spec)?),
                };
                Tier { density: secondary.bs_density, antenna: secondary.antenna, kernel: Kernel::Restricted(k), q: xi }
            }
        };
        Ok(Self { channel, primary, secondary, options, primary_tier, secondary_tier })
    }

    /// Same channel with new operators, reusing the restricted kernel when
    /// the home-link law is unchanged.
    pub fn with_operators(&self, primary: OperatorConfig, secondary: OperatorConfig) -> Result<Self, AnalyticError> {
        let cached = self.restricted_kernel().cloned();
        Self::build(self.channel, primary, secondary, self.options, cached)
    }

    pub fn with_options(&self, options: EngineOptions) -> Result<Self, AnalyticError> {
        let cached = self.restricted_kernel().cloned();
        Self::build(self.channel, self.primary, self.secondary, options, cached)
    }

    pub fn restricted_kernel(&self) -> Option<&Arc<RestrictedKernel>> {
        match &self.secondary_tier.kernel {
            Kernel::Restricted(k) => Some(k),
            Kernel::Fixed(_) => None,
        }
    }

    pub fn primary_tier(&self) -> &Tier {
        &self.primary_tier
    }

    pub fn secondary_tier(&self) -> &Tier {
        &self.secondary_tier
    }

    pub fn xi(&self) -> Option<f64> {
        match self.secondary.power_rule {
            PowerRule::InterferenceCap { xi } => Some(xi),
            PowerRule::Fixed { .. } => None,
        }
    }

    fn require_restricted(&self) -> Result<(&Kernel, f64), AnalyticError> {
        match (self.xi(), &self.secondary_tier.kernel) {
            (Some(xi), k @ Kernel::Restricted(_)) => Ok((k, xi)),
            _ => Err(AnalyticError::Invalid("the secondary operator is not interference-capped".into())),
        }
    }

    fn inner_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.options.spec.rel_tol * 0.1,
            abs_tol: self.options.spec.abs_tol * 1e-3,
            ..self.options.spec
        }
    }

    /// `F_S(B, e)` over the secondary kernel.
    pub fn f_s(&self, b: f64, e: f64) -> Result<f64, AnalyticError> {
        let (k, _) = self.require_restricted()?;
        Ok(laplace::functional(k, b, e, &self.inner_spec())?)
    }

    /// `F_P(B)` over the primary kernel.
    pub fn f_p(&self, b: f64) -> Result<f64, AnalyticError> {
        Ok(laplace::functional(&self.primary_tier.kernel, b, 0.0, &self.inner_spec())?)
    }

    /// `E_P(B, e)` over the primary kernel.
    pub fn e_p(&self, b: f64, e: f64) -> Result<f64, AnalyticError> {
        Ok(laplace::functional(&self.primary_tier.kernel, b, e, &self.inner_spec())?)
    }

    /// `E_FS(B, ξ) = F_S(Bξ, 1)`: secondary BSs homed elsewhere.
    pub fn e_fs(&self, b: f64, xi: f64) -> Result<f64, AnalyticError> {
        let (k, _) = self.require_restricted()?;
        Ok(laplace::functional(k, b * xi, 1.0, &self.inner_spec())?)
    }

    /// `E_NS(B)`: secondary BSs homed at the probed primary user.
    pub fn e_ns(&self, b: f64) -> Result<f64, AnalyticError> {
        let (k, xi) = self.require_restricted()?;
        Ok(laplace::native_term(k, b * xi))
    }

    /// Mean number of secondary BSs homed at one primary user.
    pub fn native_count(&self) -> Result<f64, AnalyticError> {
        let (k, _) = self.require_restricted()?;
        Ok(self.secondary.bs_density * laplace::native_count(k))
    }

    fn check_s(s: f64) -> Result<(), AnalyticError> {
        if s >= 0.0 && s.is_finite() {
            Ok(())
        } else {
            Err(AnalyticError::Invalid(format!("Laplace variable must be non-negative, got {s}")))
        }
    }

    /// Laplace transform of the secondary interference at a secondary user,
    /// from BSs with scaled distance `v^{α_t} > e`.
    pub fn laplace_secondary_at_secondary(&self, s: f64, e: f64) -> Result<f64, AnalyticError> {
        Self::check_s(s)?;
        let (_, xi) = self.require_restricted()?;
        let mut sum = 0.0;
        for (a, g) in self.secondary.antenna.lobes() {
            sum += a * self.f_s(s * xi * g, e)?;
        }
        Ok((-self.secondary.bs_density * sum).exp())
    }

    /// Laplace transform of the primary interference at a secondary user.
    pub fn laplace_primary_at_secondary(&self, s: f64) -> Result<f64, AnalyticError> {
        Self::check_s(s)?;
        let mut sum = 0.0;
        for (b, g) in self.primary.antenna.lobes() {
            sum += b * self.f_p(s * g)?;
        }
        Ok((-self.primary.bs_density * sum).exp())
    }

    /// Laplace transform of the primary interference at a primary user,
    /// from BSs with scaled distance `v^{α_t} > e`.
    pub fn laplace_primary_at_primary(&self, s: f64, e: f64) -> Result<f64, AnalyticError> {
        Self::check_s(s)?;
        let mut sum = 0.0;
        for (b, g) in self.primary.antenna.lobes() {
            sum += b * self.e_p(s * g, e)?;
        }
        Ok((-self.primary.bs_density * sum).exp())
    }

    /// Laplace transform of the secondary interference at a primary user.
    pub fn laplace_secondary_at_primary(&self, s: f64) -> Result<f64, AnalyticError> {
        Self::check_s(s)?;
        let (_, xi) = self.require_restricted()?;
        let mut sum = 0.0;
        for (a, g) in self.secondary.antenna.lobes() {
            sum += a * (self.e_fs(s * g, xi)? + self.e_ns(s * g)?);
        }
        Ok((-self.secondary.bs_density * sum).exp())
    }

    /// `E[X̄]`: mean secondary transmit power per unit interference cap.
    pub fn mean_normalized_power(&self) -> Result<f64, AnalyticError> {
        let home = HomeLinkDistribution::new(self.channel, self.primary.user_density)?;
        let spec = QuadratureSpec { rel_tol: self.options.spec.rel_tol * 0.1, abs_tol: 1e-300, ..self.options.spec };
        Ok(home.normalized_power_moments(|x| x, &spec)?.value)
    }
}
