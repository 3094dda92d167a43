//! Run configuration: a TOML file with optional unit suffixes, resolved
//! once into linear SI values.
//!
//! Bare numbers are SI and linear (W, Hz, m, rad, per m²). Strings carry a
//! unit: `"40 dBm"`, `"-120 dB"`, `"500 MHz"`, `"30 /km2"`, `"30 deg"`.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use mmshare_core::analytic::KernelMode;
use mmshare_core::economics::{LinearPricing, LogBase};
use mmshare_core::geometry::{ula_pattern, AntennaPattern, Blockage, ChannelModel, OperatorConfig, PowerRule};
use mmshare_core::units::{db_to_linear, dbm_to_watts, per_km2};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), message: message.to_string() }
}

/// A number, or a string with a unit suffix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Linear(f64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Linear(x)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Quantity::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Power,
    Ratio,
    Frequency,
    Density,
    Length,
    Angle,
}

impl Quantity {
    pub fn resolve(&self, field: &str, kind: Kind) -> Result<f64, ConfigError> {
        let value = match self {
            Quantity::Linear(x) => *x,
            Quantity::Text(s) => parse_with_unit(s, kind).map_err(|m| invalid(field, m))?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(invalid(field, format!("must be finite, got {value}")))
        }
    }
}

fn parse_with_unit(s: &str, kind: Kind) -> Result<f64, String> {
    let s = s.trim();
    let split = s.find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c))).unwrap_or(s.len());
    // Exponents like "1e-3" stay in the number; a bare 'e' would not parse anyway.
    let (num, unit) = s.split_at(split);
    let x: f64 = num.trim().parse().map_err(|_| format!("cannot parse a number from {s:?}"))?;
    let unit = unit.trim();
    let v = match (kind, unit) {
        (_, "") => x,
        (Kind::Power, "W") => x,
        (Kind::Power, "mW") => x * 1e-3,
        (Kind::Power, "dBm") => dbm_to_watts(x),
        (Kind::Power, "dBW") => db_to_linear(x),
        // Noise and interference levels are quoted in dB relative to 1 W.
        (Kind::Power | Kind::Ratio, "dB") => db_to_linear(x),
        (Kind::Frequency, "Hz") => x,
        (Kind::Frequency, "kHz") => x * 1e3,
        (Kind::Frequency, "MHz") => x * 1e6,
        (Kind::Frequency, "GHz") => x * 1e9,
        (Kind::Density, "/m2" | "/m²") => x,
        (Kind::Density, "/km2" | "/km²") => per_km2(x),
        (Kind::Length, "m") => x,
        (Kind::Length, "km") => x * 1e3,
        (Kind::Angle, "rad") => x,
        (Kind::Angle, "deg" | "°") => x.to_radians(),
        _ => return Err(format!("unit {unit:?} does not fit a {kind:?} value")),
    };
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawAntenna {
    Omni,
    /// Uniform linear array with `elements` antennas and beamwidth factor `kappa`.
    Ula { elements: usize, kappa: f64 },
    /// Main gain and beamwidth; the side gain conserves power.
    Sectored { main_gain: f64, beamwidth: Quantity },
    ZeroSideLobe { beamwidth: Quantity },
    Pattern { main_gain: f64, side_gain: f64, beamwidth: Quantity },
}

impl RawAntenna {
    fn resolve(&self, field: &str) -> Result<AntennaPattern, ConfigError> {
        let angle = |q: &Quantity| q.resolve(&format!("{field}.beamwidth"), Kind::Angle);
        let r = match self {
            RawAntenna::Omni => Ok(AntennaPattern::omni()),
            RawAntenna::Ula { elements, kappa } => ula_pattern(*elements, *kappa),
            RawAntenna::Sectored { main_gain, beamwidth } => AntennaPattern::sectored(*main_gain, angle(beamwidth)?),
            RawAntenna::ZeroSideLobe { beamwidth } => AntennaPattern::zero_side_lobe(angle(beamwidth)?),
            RawAntenna::Pattern { main_gain, side_gain, beamwidth } => {
                AntennaPattern::new(*main_gain, *side_gain, angle(beamwidth)?)
            }
        };
        r.map_err(|e| invalid(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawChannel {
    /// LOS decay length.
    pub beta: Option<Quantity>,
    /// Distance-independent LOS probability, instead of `beta`.
    pub los_probability: Option<f64>,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub c_los: Quantity,
    pub c_nlos: Quantity,
    /// Informational; the model does not depend on it.
    pub carrier: Option<Quantity>,
}

impl Default for RawChannel {
    fn default() -> Self {
        Self {
            beta: Some("150 m".into()),
            los_probability: None,
            alpha_los: 2.5,
            alpha_nlos: 3.5,
            c_los: "-60 dB".into(),
            c_nlos: "-60 dB".into(),
            carrier: Some("28 GHz".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOperator {
    pub bs_density: Quantity,
    pub user_density: Quantity,
    /// Fixed transmit power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<Quantity>,
    /// Average interference cap at the home primary user.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Quantity>,
    pub noise: Quantity,
    pub antenna: RawAntenna,
}

impl RawOperator {
    fn baseline(restricted: bool) -> Self {
        Self {
            bs_density: "30 /km2".into(),
            user_density: "100 /km2".into(),
            power: (!restricted).then(|| "40 dBm".into()),
            xi: restricted.then(|| "-120 dB".into()),
            noise: "-110 dB".into(),
            antenna: RawAntenna::Ula { elements: 128, kappa: 0.8 },
        }
    }

    fn resolve(&self, field: &str) -> Result<OperatorConfig, ConfigError> {
        let f = |name: &str| format!("{field}.{name}");
        let power_rule = match (&self.power, &self.xi) {
            (Some(p), None) => PowerRule::Fixed { watts: p.resolve(&f("power"), Kind::Power)? },
            (None, Some(x)) => PowerRule::InterferenceCap { xi: x.resolve(&f("xi"), Kind::Power)? },
            _ => return Err(invalid(field, "give exactly one of `power` and `xi`")),
        };
        let op = OperatorConfig {
            bs_density: self.bs_density.resolve(&f("bs_density"), Kind::Density)?,
            user_density: self.user_density.resolve(&f("user_density"), Kind::Density)?,
            antenna: self.antenna.resolve(&f("antenna"))?,
            power_rule,
            noise_power: self.noise.resolve(&f("noise"), Kind::Power)?,
        };
        op.validate().map_err(|e| invalid(field, e))?;
        Ok(op)
    }
}

/// `points` values evenly spaced from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        (0..self.points).map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64).collect()
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        if self.points == 0 || !(self.from.is_finite() && self.to.is_finite()) {
            return Err(invalid(field, "need at least one point and finite ends"));
        }
        if self.points > 1 && self.from >= self.to {
            return Err(invalid(field, format!("need from < to, got {} and {}", self.from, self.to)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSimulation {
    pub realizations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard_radius: Option<Quantity>,
    /// SINR thresholds in dB for coverage curves.
    pub thresholds_db: Grid,
}

impl Default for RawSimulation {
    fn default() -> Self {
        Self {
            realizations: 20_000,
            window_radius: None,
            guard_radius: None,
            thresholds_db: Grid { from: -20.0, to: 40.0, points: 61 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawAnalytic {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub kernel: KernelMode,
}

impl Default for RawAnalytic {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 1e-10, kernel: KernelMode::Tabulated }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawEconomics {
    pub bandwidth: Quantity,
    pub log_base: LogBase,
    pub pricing: LinearPricing,
    pub xi_grid_db: Grid,
}

impl Default for RawEconomics {
    fn default() -> Self {
        Self {
            bandwidth: "500 MHz".into(),
            log_base: LogBase::Two,
            pricing: LinearPricing::default(),
            xi_grid_db: Grid { from: -130.0, to: -90.0, points: 21 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Analytic,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawSweeps {
    /// Secondary BS densities for `validate`.
    pub validate_densities: Vec<Quantity>,
    /// Largest coverage gap `validate` accepts.
    pub validate_tolerance: f64,
    /// Secondary BS densities for `compare-modes` and `sweep-density`.
    pub secondary_densities: Vec<Quantity>,
    pub density_engine: Engine,
    /// Secondary array sizes for `sweep-beamwidth`.
    pub secondary_elements: Vec<usize>,
    pub secondary_kappa: f64,
}

impl Default for RawSweeps {
    fn default() -> Self {
        Self {
            validate_densities: vec!["30 /km2".into(), "60 /km2".into()],
            validate_tolerance: 0.02,
            secondary_densities: vec!["30 /km2".into(), "60 /km2".into(), "90 /km2".into()],
            density_engine: Engine::Analytic,
            secondary_elements: vec![16, 32, 64, 128, 256],
            secondary_kappa: 0.8,
        }
    }
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RawConfig {
    pub seed: u64,
    pub channel: RawChannel,
    pub primary: RawOperator,
    pub secondary: RawOperator,
    pub simulation: RawSimulation,
    pub analytic: RawAnalytic,
    pub economics: RawEconomics,
    pub sweeps: RawSweeps,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            channel: RawChannel::default(),
            primary: RawOperator::baseline(false),
            secondary: RawOperator::baseline(true),
            simulation: RawSimulation::default(),
            analytic: RawAnalytic::default(),
            economics: RawEconomics::default(),
            sweeps: RawSweeps::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub realizations: usize,
    pub window_radius: Option<f64>,
    pub guard_radius: Option<f64>,
    pub thresholds_db: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub kernel: KernelMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Economics {
    /// Hz.
    pub bandwidth: f64,
    pub log_base: LogBase,
    pub pricing: LinearPricing,
    pub xi_grid_db: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweeps {
    /// Per m².
    pub validate_densities: Vec<f64>,
    pub validate_tolerance: f64,
    /// Per m².
    pub secondary_densities: Vec<f64>,
    pub density_engine: Engine,
    pub secondary_elements: Vec<usize>,
    pub secondary_kappa: f64,
}

/// Fully resolved scenario, in linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    pub channel: ChannelModel,
    pub carrier: Option<f64>,
    pub primary: OperatorConfig,
    pub secondary: OperatorConfig,
    pub simulation: Simulation,
    pub analytic: Analytic,
    pub economics: Economics,
    pub sweeps: Sweeps,
}

impl RawConfig {
    pub fn resolve(&self) -> Result<Settings, ConfigError> {
        let ch = &self.channel;
        let blockage = match (&ch.beta, ch.los_probability) {
            (Some(b), None) => Blockage::Exponential { beta: b.resolve("channel.beta", Kind::Length)? },
            (None, Some(los)) => Blockage::Constant { los },
            _ => return Err(invalid("channel", "give exactly one of `beta` and `los_probability`")),
        };
        let channel = ChannelModel::new(
            blockage,
            [ch.alpha_los, ch.alpha_nlos],
            [ch.c_los.resolve("channel.c_los", Kind::Ratio)?, ch.c_nlos.resolve("channel.c_nlos", Kind::Ratio)?],
        )
        .map_err(|e| invalid("channel", e))?;
        let carrier = ch.carrier.as_ref().map(|c| c.resolve("channel.carrier", Kind::Frequency)).transpose()?;

        let primary = self.primary.resolve("primary")?;
        if primary.power_rule.is_restricted() {
            return Err(invalid("primary", "the primary operator must transmit at a fixed `power`"));
        }
        let secondary = self.secondary.resolve("secondary")?;

        let sim = &self.simulation;
        if sim.realizations == 0 {
            return Err(invalid("simulation.realizations", "must be positive"));
        }
        sim.thresholds_db.validate("simulation.thresholds_db")?;
        let simulation = Simulation {
            realizations: sim.realizations,
            window_radius: sim.window_radius.as_ref().map(|q| q.resolve("simulation.window_radius", Kind::Length)).transpose()?,
            guard_radius: sim.guard_radius.as_ref().map(|q| q.resolve("simulation.guard_radius", Kind::Length)).transpose()?,
            thresholds_db: sim.thresholds_db,
        };
        match (simulation.window_radius, simulation.guard_radius) {
            (None, None) => {}
            (Some(w), Some(g)) if g > 0.0 && w > g => {}
            (Some(_), Some(_)) => return Err(invalid("simulation", "need window_radius > guard_radius > 0")),
            _ => return Err(invalid("simulation", "give both `window_radius` and `guard_radius` or neither")),
        }

        let an = &self.analytic;
        if !(an.rel_tol > 0.0 && an.rel_tol < 1.0 && an.abs_tol > 0.0) {
            return Err(invalid("analytic", "tolerances must be positive and rel_tol below 1"));
        }
        let analytic = Analytic { rel_tol: an.rel_tol, abs_tol: an.abs_tol, kernel: an.kernel };

        let ec = &self.economics;
        let bandwidth = ec.bandwidth.resolve("economics.bandwidth", Kind::Frequency)?;
        if !(bandwidth > 0.0) {
            return Err(invalid("economics.bandwidth", "must be positive"));
        }
        ec.pricing.validate().map_err(|e| invalid("economics.pricing", e))?;
        ec.xi_grid_db.validate("economics.xi_grid_db")?;
        let economics = Economics { bandwidth, log_base: ec.log_base, pricing: ec.pricing, xi_grid_db: ec.xi_grid_db };

        let sw = &self.sweeps;
        let densities = |qs: &[Quantity], field: &str| -> Result<Vec<f64>, ConfigError> {
            qs.iter()
                .map(|q| {
                    let d = q.resolve(field, Kind::Density)?;
                    if d > 0.0 {
                        Ok(d)
                    } else {
                        Err(invalid(field, "densities must be positive"))
                    }
                })
                .collect()
        };
        if !(sw.validate_tolerance > 0.0) {
            return Err(invalid("sweeps.validate_tolerance", "must be positive"));
        }
        if sw.secondary_elements.contains(&0) {
            return Err(invalid("sweeps.secondary_elements", "array sizes must be positive"));
        }
        let sweeps = Sweeps {
            validate_densities: densities(&sw.validate_densities, "sweeps.validate_densities")?,
            validate_tolerance: sw.validate_tolerance,
            secondary_densities: densities(&sw.secondary_densities, "sweeps.secondary_densities")?,
            density_engine: sw.density_engine,
            secondary_elements: sw.secondary_elements.clone(),
            secondary_kappa: sw.secondary_kappa,
        };
        for &n in &sweeps.secondary_elements {
            ula_pattern(n, sweeps.secondary_kappa).map_err(|e| invalid("sweeps.secondary_kappa", e))?;
        }

        Ok(Settings { seed: self.seed, channel, carrier, primary, secondary, simulation, analytic, economics, sweeps })
    }
}

fn raw_operator(op: &OperatorConfig) -> RawOperator {
    let (power, xi) = match op.power_rule {
        PowerRule::Fixed { watts } => (Some(watts.into()), None),
        PowerRule::InterferenceCap { xi } => (None, Some(xi.into())),
    };
    RawOperator {
        bs_density: op.bs_density.into(),
        user_density: op.user_density.into(),
        power,
        xi,
        noise: op.noise_power.into(),
        antenna: RawAntenna::Pattern {
            main_gain: op.antenna.main_gain,
            side_gain: op.antenna.side_gain,
            beamwidth: op.antenna.beamwidth.into(),
        },
    }
}

impl Settings {
    /// The same settings as a file with bare SI numbers only.
    pub fn to_raw(&self) -> RawConfig {
        let (beta, los_probability) = match self.channel.blockage {
            Blockage::Exponential { beta } => (Some(beta.into()), None),
            Blockage::Constant { los } => (None, Some(los)),
        };
        let sim = &self.simulation;
        RawConfig {
            seed: self.seed,
            channel: RawChannel {
                beta,
                los_probability,
                alpha_los: self.channel.alpha[0],
                alpha_nlos: self.channel.alpha[1],
                c_los: self.channel.c_gain[0].into(),
                c_nlos: self.channel.c_gain[1].into(),
                carrier: self.carrier.map(Quantity::from),
            },
            primary: raw_operator(&self.primary),
            secondary: raw_operator(&self.secondary),
            simulation: RawSimulation {
                realizations: sim.realizations,
                window_radius: sim.window_radius.map(Quantity::from),
                guard_radius: sim.guard_radius.map(Quantity::from),
                thresholds_db: sim.thresholds_db,
            },
            analytic: RawAnalytic { rel_tol: self.analytic.rel_tol, abs_tol: self.analytic.abs_tol, kernel: self.analytic.kernel },
            economics: RawEconomics {
                bandwidth: self.economics.bandwidth.into(),
                log_base: self.economics.log_base,
                pricing: self.economics.pricing,
                xi_grid_db: self.economics.xi_grid_db,
            },
            sweeps: RawSweeps {
                validate_densities: self.sweeps.validate_densities.iter().map(|&d| d.into()).collect(),
                validate_tolerance: self.sweeps.validate_tolerance,
                secondary_densities: self.sweeps.secondary_densities.iter().map(|&d| d.into()).collect(),
                density_engine: self.sweeps.density_engine,
                secondary_elements: self.sweeps.secondary_elements.clone(),
                secondary_kappa: self.sweeps.secondary_kappa,
            },
        }
    }

    /// Canonical TOML text; loading it gives back identical settings.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("settings always serialize")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("settings always serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

pub fn parse_config(text: &str) -> Result<Settings, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    raw.resolve()
}

pub fn load_config(path: &Path) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}
