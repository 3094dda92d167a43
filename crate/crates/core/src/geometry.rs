//! Channel, antenna and home-link primitives.
//!
//! Distances are meters, powers watts, densities per m². A link of type
//! `t` at distance `r` has average gain `C_t r^{-α_t}`; whether a link is
//! LOS is a Bernoulli draw with probability given by the [`Blockage`] model.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_positive, Estimate, QuadError, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkType {
    Los,
    Nlos,
}

impl LinkType {
    pub const ALL: [LinkType; 2] = [LinkType::Los, LinkType::Nlos];

    pub fn complement(self) -> Self {
        match self {
            LinkType::Los => LinkType::Nlos,
            LinkType::Nlos => LinkType::Los,
        }
    }

    pub fn index(self) -> usize {
        match self {
            LinkType::Los => 0,
            LinkType::Nlos => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LinkType::Los => "los",
            LinkType::Nlos => "nlos",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("zero-distance link has unbounded gain")]
    ZeroDistance,
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

fn invalid(what: &'static str, reason: impl Into<String>) -> GeometryError {
    GeometryError::Invalid { what, reason: reason.into() }
}

fn check_distance(r: f64) -> Result<(), GeometryError> {
    if r >= 0.0 {
        Ok(())
    } else {
        Err(GeometryError::NegativeDistance(r))
    }
}

/// LOS probability as a function of link length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Blockage {
    /// `p_L(r) = exp(-r/β)` with decay length `beta` in meters.
    Exponential { beta: f64 },
    /// Distance-independent LOS probability.
    Constant { los: f64 },
}

impl Blockage {
    pub fn validate(&self) -> Result<(), GeometryError> {
        match *self {
            Blockage::Exponential { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(invalid("blockage", format!("beta must be positive, got {beta}")))
            }
            Blockage::Constant { los } if !(0.0..=1.0).contains(&los) => {
                Err(invalid("blockage", format!("LOS probability must lie in [0, 1], got {los}")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn los(&self, r: f64) -> f64 {
        match *self {
            Blockage::Exponential { beta } => (-r / beta).exp(),
            Blockage::Constant { los } => los,
        }
    }

    #[inline]
    pub fn nlos(&self, r: f64) -> f64 {
        match *self {
            Blockage::Exponential { beta } => -(-r / beta).exp_m1(),
            Blockage::Constant { los } => 1.0 - los,
        }
    }

    #[inline]
    pub fn probability(&self, t: LinkType, r: f64) -> f64 {
        match t {
            LinkType::Los => self.los(r),
            LinkType::Nlos => self.nlos(r),
        }
    }

    /// `V_L(r) = 2π ∫_0^r p_L(u) u du`, the mean number of LOS points of a
    /// unit-density PPP within distance `r`.
    pub fn los_volume(&self, r: f64) -> f64 {
        match *self {
            Blockage::Exponential { beta } => {
                let x = r / beta;
                2.0 * PI * beta * beta * los_series(x)
            }
            Blockage::Constant { los } => los * PI * r * r,
        }
    }

    /// `V_N(r) = π r² − V_L(r)`.
    pub fn nlos_volume(&self, r: f64) -> f64 {
        match *self {
            Blockage::Exponential { beta } => {
                let x = r / beta;
                if x < 0.1 {
                    2.0 * PI * beta * beta * nlos_series(x)
                } else {
                    PI * r * r - self.los_volume(r)
                }
            }
            Blockage::Constant { los } => (1.0 - los) * PI * r * r,
        }
    }

    pub fn volume(&self, t: LinkType, r: f64) -> f64 {
        match t {
            LinkType::Los => self.los_volume(r),
            LinkType::Nlos => self.nlos_volume(r),
        }
    }
}

// 1 − e^{−x}(1 + x), with a series near zero where the direct form cancels.
fn los_series(x: f64) -> f64 {
    if x >= 0.1 {
        return 1.0 - (-x).exp() * (1.0 + x);
    }
    // Σ_{n≥2} (−1)^n (n−1) x^n / n!
    let mut term = x * x / 2.0;
    let mut sum: f64 = 0.0;
    let mut n = 2.0;
    while term.abs() > 1e-18 * sum.abs() || n < 4.0 {
        sum += (n - 1.0) * term;
        n += 1.0;
        term *= -x / n;
        if n > 40.0 {
            break;
        }
    }
    sum
}

// x²/2 − (1 − e^{−x}(1 + x)) for small x.
fn nlos_series(x: f64) -> f64 {
    // Σ_{n≥3} (−1)^{n+1} (n−1) x^n / n!
    let mut term = x * x * x / 6.0;
    let mut sum: f64 = 0.0;
    let mut n = 3.0;
    while term.abs() > 1e-18 * sum.abs() || n < 5.0 {
        sum += (n - 1.0) * term;
        n += 1.0;
        term *= -x / n;
        if n > 40.0 {
            break;
        }
    }
    sum
}

/// Blockage, pathloss exponents and near-field gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub blockage: Blockage,
    /// Pathloss exponents indexed by [`LinkType::index`].
    pub alpha: [f64; 2],
    /// Near-field gains indexed by [`LinkType::index`].
    pub c_gain: [f64; 2],
}

impl ChannelModel {
    pub fn new(
        blockage: Blockage,
        alpha: [f64; 2],
        c_gain: [f64; 2],
    ) -> Result<Self, GeometryError> {
        let model = Self { blockage, alpha, c_gain };
        model.validate()?;
        Ok(model)
    }

    /// β = 150 m, α = 2.5 / 3.5, C = −60 dB for both link types.
    pub fn baseline() -> Self {
        Self {
            blockage: Blockage::Exponential { beta: 150.0 },
            alpha: [2.5, 3.5],
            c_gain: [1e-6, 1e-6],
        }
    }

    /// Same exponent and gain for LOS and NLOS links.
    pub fn equal_parameters(blockage: Blockage, alpha: f64, c: f64) -> Result<Self, GeometryError> {
        Self::new(blockage, [alpha; 2], [c; 2])
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.blockage.validate()?;
        for t in LinkType::ALL {
            let a = self.alpha[t.index()];
            if !(a > 2.0 && a.is_finite()) {
                return Err(invalid("channel", format!("{} pathloss exponent must exceed 2, got {a}", t.label())));
            }
            let c = self.c_gain[t.index()];
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid("channel", format!("{} gain must be positive, got {c}", t.label())));
            }
        }
        Ok(())
    }

    pub fn has_equal_parameters(&self) -> bool {
        self.alpha[0] == self.alpha[1] && self.c_gain[0] == self.c_gain[1]
    }

    #[inline]
    pub fn alpha(&self, t: LinkType) -> f64 {
        self.alpha[t.index()]
    }

    #[inline]
    pub fn c(&self, t: LinkType) -> f64 {
        self.c_gain[t.index()]
    }

    pub fn beta(&self) -> Option<f64> {
        match self.blockage {
            Blockage::Exponential { beta } => Some(beta),
            Blockage::Constant { .. } => None,
        }
    }

    pub fn los_probability(&self, r: f64) -> Result<f64, GeometryError> {
        check_distance(r)?;
        Ok(self.blockage.los(r))
    }

    #[inline]
    pub fn link_probability(&self, t: LinkType, r: f64) -> f64 {
        self.blockage.probability(t, r)
    }

    pub fn pathloss(&self, t: LinkType, r: f64) -> Result<f64, GeometryError> {
        check_distance(r)?;
        if r == 0.0 {
            return Err(GeometryError::ZeroDistance);
        }
        Ok(self.gain(t, r))
    }

    /// `C_t r^{-α_t}` without domain checks.
    #[inline]
    pub fn gain(&self, t: LinkType, r: f64) -> f64 {
        self.c(t) * r.powf(-self.alpha(t))
    }

    /// Largest average gain any link type can have at distance `r`.
    #[inline]
    pub fn max_gain(&self, r: f64) -> f64 {
        self.gain(LinkType::Los, r).max(self.gain(LinkType::Nlos, r))
    }

    /// Distance at which a type-`t` link has the same gain as a type-`home`
    /// link of length `r`.
    pub fn exclusion_radius(&self, home: LinkType, t: LinkType, r: f64) -> Result<f64, GeometryError> {
        check_distance(r)?;
        Ok(self.exclusion_unchecked(home, t, r))
    }

    #[inline]
    pub fn exclusion_unchecked(&self, home: LinkType, t: LinkType, r: f64) -> f64 {
        if home == t {
            return r;
        }
        (self.c(t) / self.c(home)).powf(1.0 / self.alpha(t)) * r.powf(self.alpha(home) / self.alpha(t))
    }

    /// `V_t(r)`: mean number of type-`t` points of a unit-density PPP within `r`.
    #[inline]
    pub fn volume(&self, t: LinkType, r: f64) -> f64 {
        self.blockage.volume(t, r)
    }

    /// `V_t(r)` by direct quadrature of `2π p_t(u) u`.
    pub fn volume_by_quadrature(&self, t: LinkType, r: f64, spec: &QuadratureSpec) -> Result<Estimate, GeometryError> {
        check_distance(r)?;
        if r == 0.0 {
            return Ok(Estimate { value: 0.0, abs_err: 0.0 });
        }
        let est = integrate_positive(|u| 2.0 * PI * self.link_probability(t, u) * u, 0.0, r, r, spec)?;
        Ok(est)
    }
}

/// Secondary transmit power that pins the average interference at the home
/// primary user (distance `r`, link type `home`) to `xi`.
pub fn secondary_tx_power(channel: &ChannelModel, xi: f64, r: f64, home: LinkType) -> Result<f64, GeometryError> {
    if !(xi > 0.0) {
        return Err(invalid("interference cap", format!("must be positive, got {xi}")));
    }
    check_distance(r)?;
    if r == 0.0 {
        return Err(GeometryError::ZeroDistance);
    }
    Ok(xi * normalized_power(channel, r, home))
}

/// `X̄ = r^{α_T}/C_T`, the transmit power per unit of interference cap.
#[inline]
pub fn normalized_power(channel: &ChannelModel, r: f64, home: LinkType) -> f64 {
    r.powf(channel.alpha(home)) / channel.c(home)
}

/// Two-level sectored antenna pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub main_gain: f64,
    pub side_gain: f64,
    /// Main-lobe width in radians.
    pub beamwidth: f64,
}

impl AntennaPattern {
    pub fn new(main_gain: f64, side_gain: f64, beamwidth: f64) -> Result<Self, GeometryError> {
        let p = Self { main_gain, side_gain, beamwidth };
        p.validate()?;
        Ok(p)
    }

    pub fn omni() -> Self {
        Self { main_gain: 1.0, side_gain: 1.0, beamwidth: 2.0 * PI }
    }

    /// Pattern with the given main gain and beamwidth; the side gain follows
    /// from power conservation.
    pub fn sectored(main_gain: f64, beamwidth: f64) -> Result<Self, GeometryError> {
        if !(beamwidth > 0.0 && beamwidth <= 2.0 * PI) {
            return Err(invalid("antenna", format!("beamwidth must lie in (0, 2π], got {beamwidth}")));
        }
        let frac = beamwidth / (2.0 * PI);
        let side_gain = if frac == 1.0 { main_gain } else { ((1.0 - main_gain * frac) / (1.0 - frac)).max(0.0) };
        // Snap to exact conservation when the requested main gain is at its cap.
        let side_gain = if side_gain.abs() < 1e-15 { 0.0 } else { side_gain };
        Self::new(main_gain, side_gain, beamwidth)
    }

    /// Main lobe only: `G₁ = 2π/θ_b`, `G₂ = 0`.
    pub fn zero_side_lobe(beamwidth: f64) -> Result<Self, GeometryError> {
        Self::new(2.0 * PI / beamwidth, 0.0, beamwidth)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let Self { main_gain, side_gain, beamwidth } = *self;
        if !(beamwidth > 0.0 && beamwidth <= 2.0 * PI) {
            return Err(invalid("antenna", format!("beamwidth must lie in (0, 2π], got {beamwidth}")));
        }
        if !(main_gain >= side_gain && side_gain >= 0.0 && main_gain.is_finite()) {
            return Err(invalid("antenna", format!("gains must satisfy G1 >= G2 >= 0, got {main_gain}, {side_gain}")));
        }
        let total = main_gain * beamwidth + side_gain * (2.0 * PI - beamwidth);
        if (total - 2.0 * PI).abs() > 1e-12 * 2.0 * PI {
            return Err(invalid("antenna", format!("power conservation violated: G1·θ + G2·(2π−θ) = {total}")));
        }
        Ok(())
    }

    /// Gain toward angle `theta` off boresight; angles are wrapped into [−π, π].
    pub fn gain(&self, theta: f64) -> f64 {
        let wrapped = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
        if wrapped.abs() <= 0.5 * self.beamwidth {
            self.main_gain
        } else {
            self.side_gain
        }
    }

    /// Probability that a uniformly oriented beam points its main lobe at a
    /// given user.
    pub fn main_lobe_probability(&self) -> f64 {
        self.beamwidth / (2.0 * PI)
    }

    /// `(weight, gain)` pairs of the random gain seen by an arbitrary user.
    pub fn lobes(&self) -> [(f64, f64); 2] {
        let p = self.main_lobe_probability();
        [(p, self.main_gain), (1.0 - p, self.side_gain)]
    }
}

/// Uniform-linear-array approximation: `θ_b = 2πκ/n`, `G₁ = n`,
/// `G₂ = (1 − κ) n / (n − κ)`.
pub fn ula_pattern(n_antennas: usize, kappa: f64) -> Result<AntennaPattern, GeometryError> {
    let n = n_antennas as f64;
    if n_antennas == 0 || !(kappa > 0.0 && kappa <= 1.0) {
        return Err(invalid("array", format!("need n >= 1 and 0 < kappa <= 1, got n = {n_antennas}, kappa = {kappa}")));
    }
    if n_antennas == 1 {
        if kappa == 1.0 {
            return Ok(AntennaPattern::omni());
        }
        return Err(invalid("array", "a single element needs kappa = 1"));
    }
    let beamwidth = 2.0 * PI * kappa / n;
    let side_gain = (1.0 - kappa) * n / (n - kappa);
    AntennaPattern::new(n, side_gain, beamwidth)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PowerRule {
    /// Every BS transmits `watts`.
    Fixed { watts: f64 },
    /// Each BS scales its power so that the average interference at its
    /// home primary user equals `xi` watts.
    InterferenceCap { xi: f64 },
}

impl PowerRule {
    pub fn is_restricted(&self) -> bool {
        matches!(self, PowerRule::InterferenceCap { .. })
    }
}

/// One operator's deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    /// BSs per m².
    pub bs_density: f64,
    /// Users per m².
    pub user_density: f64,
    pub antenna: AntennaPattern,
    pub power_rule: PowerRule,
    /// Receiver noise in watts.
    pub noise_power: f64,
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.bs_density > 0.0 && self.bs_density.is_finite()) {
            return Err(invalid("operator", format!("BS density must be positive, got {}", self.bs_density)));
        }
        if !(self.user_density > 0.0 && self.user_density.is_finite()) {
            return Err(invalid("operator", format!("user density must be positive, got {}", self.user_density)));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(invalid("operator", format!("noise power must be non-negative, got {}", self.noise_power)));
        }
        match self.power_rule {
            PowerRule::Fixed { watts } if !(watts > 0.0 && watts.is_finite()) => {
                return Err(invalid("operator", format!("transmit power must be positive, got {watts}")));
            }
            PowerRule::InterferenceCap { xi } if !(xi > 0.0 && xi.is_finite()) => {
                return Err(invalid("operator", format!("interference cap must be positive, got {xi}")));
            }
            _ => {}
        }
        self.antenna.validate()
    }
}

/// Joint law of the distance `R` and link type `T` from a secondary BS to
/// its home primary user, the primary user with the strongest average
/// received power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomeLinkDistribution {
    pub channel: ChannelModel,
    pub primary_user_density: f64,
}

impl HomeLinkDistribution {
    pub fn new(channel: ChannelModel, primary_user_density: f64) -> Result<Self, GeometryError> {
        channel.validate()?;
        if !(primary_user_density > 0.0 && primary_user_density.is_finite()) {
            return Err(invalid("user density", format!("must be positive, got {primary_user_density}")));
        }
        Ok(Self { channel, primary_user_density })
    }

    /// Typical nearest-user distance, used as the quadrature anchor.
    pub fn scale(&self) -> f64 {
        1.0 / (PI * self.primary_user_density).sqrt()
    }

    /// Mean number of users stronger than a type-`home` user at `r`,
    /// per unit density.
    #[inline]
    pub fn void_volume(&self, r: f64, home: LinkType) -> f64 {
        LinkType::ALL
            .iter()
            .map(|&t| self.channel.volume(t, self.channel.exclusion_unchecked(home, t, r)))
            .sum()
    }

    pub fn pdf(&self, r: f64, home: LinkType) -> Result<f64, GeometryError> {
        check_distance(r)?;
        Ok(self.pdf_unchecked(r, home))
    }

    #[inline]
    pub fn pdf_unchecked(&self, r: f64, home: LinkType) -> f64 {
        let lambda = self.primary_user_density;
        2.0 * PI * lambda * self.channel.link_probability(home, r) * r * (-lambda * self.void_volume(r, home)).exp()
    }

    /// `E[f(R, T)]`.
    pub fn expectation<F: Fn(f64, LinkType) -> f64>(&self, f: F, spec: &QuadratureSpec) -> Result<Estimate, GeometryError> {
        let mut value = 0.0;
        let mut abs_err = 0.0;
        for home in LinkType::ALL {
            let est = integrate_positive(
                |r| {
                    let p = self.pdf_unchecked(r, home);
                    if p == 0.0 {
                        0.0
                    } else {
                        f(r, home) * p
                    }
                },
                0.0,
                f64::INFINITY,
                self.scale(),
                spec,
            )?;
            value += est.value;
            abs_err += est.abs_err;
        }
        Ok(Estimate { value, abs_err })
    }

    /// `E[f(X̄)]` with `X̄ = R^{α_T}/C_T`.
    pub fn normalized_power_moments<F: Fn(f64) -> f64>(&self, f: F, spec: &QuadratureSpec) -> Result<Estimate, GeometryError> {
        self.expectation(|r, home| f(normalized_power(&self.channel, r, home)), spec)
    }

    /// `P(R ≤ r, T = home)`.
    pub fn cdf(&self, r: f64, home: LinkType, spec: &QuadratureSpec) -> Result<f64, GeometryError> {
        check_distance(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        let est = integrate_positive(|x| self.pdf_unchecked(x, home), 0.0, r, r.min(self.scale()), spec)?;
        Ok(est.value)
    }

    /// `P(T = home)`.
    pub fn type_probability(&self, home: LinkType, spec: &QuadratureSpec) -> Result<f64, GeometryError> {
        let est = integrate_positive(|x| self.pdf_unchecked(x, home), 0.0, f64::INFINITY, self.scale(), spec)?;
        Ok(est.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::precise()
    }

    #[test]
    fn complement_is_involution() {
        for t in LinkType::ALL {
            assert_ne!(t.complement(), t);
            assert_eq!(t.complement().complement(), t);
        }
    }

    #[test]
    fn los_probability_examples() {
        let ch = ChannelModel::baseline();
        assert_eq!(ch.los_probability(0.0).unwrap(), 1.0);
        assert!((ch.los_probability(150.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(ch.los_probability(f64::INFINITY).unwrap(), 0.0);
        assert!(ch.los_probability(-1.0).is_err());
    }

    #[test]
    fn pathloss_examples() {
        let ch = ChannelModel::baseline();
        assert!((ch.pathloss(LinkType::Los, 1.0).unwrap() - 1e-6).abs() < 1e-20);
        assert!((ch.pathloss(LinkType::Nlos, 100.0).unwrap() - 1e-13).abs() < 1e-26);
        let unit = ChannelModel::equal_parameters(Blockage::Constant { los: 1.0 }, 2.0 + 1e-12, 1.0).unwrap();
        assert!((unit.pathloss(LinkType::Los, 10.0).unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(ch.pathloss(LinkType::Los, 0.0), Err(GeometryError::ZeroDistance));
    }

    #[test]
    fn channel_rejects_bad_exponent() {
        assert!(ChannelModel::new(Blockage::Exponential { beta: 150.0 }, [2.0, 3.5], [1e-6; 2]).is_err());
        assert!(ChannelModel::new(Blockage::Exponential { beta: -1.0 }, [2.5, 3.5], [1e-6; 2]).is_err());
    }

    #[test]
    fn exclusion_radius_examples() {
        let ch = ChannelModel::baseline();
        assert_eq!(ch.exclusion_radius(LinkType::Los, LinkType::Los, 42.0).unwrap(), 42.0);
        let e = ch.exclusion_radius(LinkType::Los, LinkType::Nlos, 10.0).unwrap();
        assert!((e - 10f64.powf(2.5 / 3.5)).abs() < 1e-12);
        assert!((e - 5.1795).abs() < 1e-4);
        assert_eq!(ch.exclusion_radius(LinkType::Nlos, LinkType::Los, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn exclusion_radius_matches_pathloss() {
        let ch = ChannelModel::new(Blockage::Exponential { beta: 80.0 }, [2.1, 4.0], [3e-6, 2e-7]).unwrap();
        for &r in &[0.3, 1.0, 17.0, 250.0] {
            for home in LinkType::ALL {
                for t in LinkType::ALL {
                    let e = ch.exclusion_radius(home, t, r).unwrap();
                    let lhs = ch.gain(t, e);
                    let rhs = ch.gain(home, r);
                    assert!((lhs / rhs - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_volumes_match_quadrature() {
        let ch = ChannelModel::baseline();
        for &r in &[1e-3, 0.5, 14.9, 15.1, 150.0, 2000.0] {
            for t in LinkType::ALL {
                let q = ch.volume_by_quadrature(t, r, &tight()).unwrap().value;
                let c = ch.volume(t, r);
                assert!((q - c).abs() <= 1e-10 + 1e-9 * c.abs(), "{t:?} r={r}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn volume_series_is_continuous() {
        let b = Blockage::Exponential { beta: 1.0 };
        for t in LinkType::ALL {
            let lo = b.volume(t, 0.1 - 1e-12);
            let hi = b.volume(t, 0.1 + 1e-12);
            assert!((lo - hi).abs() < 1e-9 * hi.abs());
        }
        let r = 1e-4;
        assert!(b.nlos_volume(r) > 0.0);
        assert!((b.los_volume(r) + b.nlos_volume(r) - PI * r * r).abs() < 1e-22);
    }

    #[test]
    fn antenna_examples() {
        let omni = AntennaPattern::omni();
        assert_eq!(omni.gain(1.3), 1.0);
        let s = AntennaPattern::sectored(10.0, PI / 5.0).unwrap();
        assert_eq!(s.side_gain, 0.0);
        assert_eq!(s.gain(PI / 2.0), 0.0);
        assert_eq!(s.gain(PI / 11.0), 10.0);
        // wrapped: 2π + small angle is inside the main lobe
        assert_eq!(s.gain(2.0 * PI + 0.01), 10.0);
        assert!(AntennaPattern::new(1.0, 1.0, 7.0).is_err());
        assert!(AntennaPattern::new(2.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn ula_examples() {
        assert_eq!(ula_pattern(1, 1.0).unwrap(), AntennaPattern::omni());
        let p = ula_pattern(10, 0.5).unwrap();
        assert_eq!(p.main_gain, 10.0);
        assert!((p.main_lobe_probability() - 0.05).abs() < 1e-15);
        assert!((p.side_gain - 5.0 / 9.5).abs() < 1e-12);
        let p = ula_pattern(64, 1.0).unwrap();
        assert_eq!(p.main_gain, 64.0);
        assert_eq!(p.side_gain, 0.0);
        assert!((p.main_lobe_probability() - 1.0 / 64.0).abs() < 1e-15);
        assert!(ula_pattern(4, 1.5).is_err());
        assert!(ula_pattern(0, 0.5).is_err());
    }

    #[test]
    fn tx_power_example() {
        let ch = ChannelModel::baseline();
        let p = secondary_tx_power(&ch, 1e-12, 100.0, LinkType::Los).unwrap();
        assert!((p - 0.1).abs() < 1e-14);
        assert!((ch.gain(LinkType::Los, 100.0) * p / 1e-12 - 1.0).abs() < 1e-15);
        assert!(secondary_tx_power(&ch, 1e-12, 0.0, LinkType::Los).is_err());
    }

    #[test]
    fn home_pdf_normalizes() {
        for density in [1e-5, 3e-4, 1e-2] {
            let d = HomeLinkDistribution::new(ChannelModel::baseline(), density).unwrap();
            let mass = d.expectation(|_, _| 1.0, &tight()).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-6, "density {density}: {mass}");
        }
    }

    #[test]
    fn dense_users_home_on_short_los_links() {
        let d = HomeLinkDistribution::new(ChannelModel::baseline(), 1.0).unwrap();
        let p_los = d.type_probability(LinkType::Los, &tight()).unwrap();
        assert!(p_los > 0.99, "{p_los}");
        assert!(d.cdf(3.0, LinkType::Los, &tight()).unwrap() > 0.99);
    }

    #[test]
    fn equal_parameter_moment_is_mean_square_distance() {
        let density = 2e-4;
        let alpha = 3.0;
        let c = 1e-6;
        let ch = ChannelModel::equal_parameters(Blockage::Exponential { beta: 150.0 }, alpha, c).unwrap();
        let d = HomeLinkDistribution::new(ch, density).unwrap();
        let m = d.normalized_power_moments(|x| (x * c).powf(2.0 / alpha), &tight()).unwrap().value;
        assert!((m * PI * density - 1.0).abs() < 1e-7, "{m}");
    }
}
