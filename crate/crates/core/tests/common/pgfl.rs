//! Randomized draws comparing the engine's Laplace functionals with the
//! reference PGFL exponents.

use mmshare_core::analytic::{AnalyticModel, EngineOptions};
use mmshare_core::geometry::{AntennaPattern, Blockage, ChannelModel, OperatorConfig, PowerRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Channel;

pub const ORACLE_REL: f64 = 1e-9;

pub struct Draw {
    pub model: AnalyticModel,
    pub oracle: Channel,
    pub lambda_r: f64,
    pub power: f64,
    pub xi: f64,
}

pub fn draw(rng: &mut ChaCha8Rng) -> Draw {
    let beta = rng.gen_range(80.0..250.0);
    let alpha = [rng.gen_range(2.1..2.9), rng.gen_range(3.0..4.2)];
    let c = [10f64.powf(rng.gen_range(-6.5..-5.5)), 10f64.powf(rng.gen_range(-7.0..-6.0))];
    let lambda_r = rng.gen_range(30e-6..300e-6);
    let power = 10f64.powf(rng.gen_range(0.0..1.5));
    let xi = 10f64.powf(rng.gen_range(-13.0..-10.0));
    let channel = ChannelModel::new(Blockage::Exponential { beta }, alpha, c).unwrap();
    let primary = OperatorConfig {
        bs_density: 30e-6,
        user_density: lambda_r,
        antenna: AntennaPattern::omni(),
        power_rule: PowerRule::Fixed { watts: power },
        noise_power: 1e-11,
    };
    let secondary = OperatorConfig { power_rule: PowerRule::InterferenceCap { xi }, ..primary };
    let model = AnalyticModel::new(channel, primary, secondary, EngineOptions::default()).unwrap();
    Draw { model, oracle: Channel { beta, alpha, c }, lambda_r, power, xi }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

#[derive(Debug, Clone, Copy)]
pub struct Comparison {
    pub name: &'static str,
    pub engine: f64,
    pub oracle: f64,
}

impl Comparison {
    pub fn rel(&self) -> f64 {
        (self.engine - self.oracle).abs() / self.oracle.abs()
    }
}

/// `F_S`, `E_FS` and `E_NS` at `draws` random parameter sets.
pub fn restricted(seed: u64, draws: usize) -> Vec<Comparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..draws {
        let d = draw(&mut rng);
        let b = log_uniform(&mut rng, 1e-2, 1e3);
        let e = log_uniform(&mut rng, 1e-2, 1e2);
        out.push(Comparison {
            name: "F_S",
            engine: d.model.f_s(b, e).unwrap(),
            oracle: super::restricted_exponent(&d.oracle, d.lambda_r, b, e, ORACLE_REL),
        });

        let bp = log_uniform(&mut rng, 1e-2, 1e3) / d.xi;
        out.push(Comparison {
            name: "E_FS",
            engine: d.model.e_fs(bp, d.xi).unwrap(),
            oracle: super::restricted_exponent(&d.oracle, d.lambda_r, bp * d.xi, 1.0, ORACLE_REL),
        });

        // Native BSs see the probe as their home: received mean power is ξ exactly.
        let bn = log_uniform(&mut rng, 1e-2, 1e2) / d.xi;
        let area = super::native_area(&d.oracle, d.lambda_r, ORACLE_REL);
        out.push(Comparison { name: "E_NS", engine: d.model.e_ns(bn).unwrap(), oracle: area / (1.0 + 1.0 / (bn * d.xi)) });
    }
    out
}

/// `F_P` and `E_P` at `draws` random parameter sets.
pub fn fixed(seed: u64, draws: usize) -> Vec<Comparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..draws {
        let d = draw(&mut rng);
        let b = log_uniform(&mut rng, 1e6, 1e13);
        out.push(Comparison {
            name: "F_P",
            engine: d.model.f_p(b).unwrap(),
            oracle: super::fixed_exponent(&d.oracle, d.power, b, 0.0, ORACLE_REL),
        });

        let b = log_uniform(&mut rng, 1e6, 1e13);
        let e = b * log_uniform(&mut rng, 1e-2, 1e2);
        out.push(Comparison {
            name: "E_P",
            engine: d.model.e_p(b, e).unwrap(),
            oracle: super::fixed_exponent(&d.oracle, d.power, b, e, ORACLE_REL),
        });
    }
    out
}
