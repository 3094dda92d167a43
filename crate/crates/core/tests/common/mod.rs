//! Reference computations for the integration tests, written directly from
//! the physical-distance model and sharing no numerics with the library.
#![allow(dead_code)]

pub mod pgfl;

use std::f64::consts::{FRAC_PI_2, PI};

/// Double-exponential quadrature of `f` over `[a, b]`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    let d = 0.5 * (b - a);
    let g = |t: f64| {
        let s = FRAC_PI_2 * t.sinh();
        let x = s.tanh();
        let w = FRAC_PI_2 * t.cosh() / (s.cosh() * s.cosh());
        // Distance to the nearer endpoint, computed without cancellation.
        let gap = d / (s.abs().exp() * s.abs().cosh());
        let pt = if x >= 0.0 { b - gap } else { a + gap };
        if w == 0.0 || !(pt > a && pt < b) {
            0.0
        } else {
            f(pt) * w * d
        }
    };
    de_sum(g, -4.0, 4.0, rel)
}

/// Double-exponential quadrature of `f` over `[a, ∞)`; `scale` is the
/// length over which `f` varies near `a`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, rel: f64) -> f64 {
    let g = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let x = a + scale * e;
        let w = scale * FRAC_PI_2 * t.cosh() * e;
        if !x.is_finite() || w == 0.0 || x == a {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    de_sum(g, -5.0, 5.0, rel)
}

fn de_sum<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, rel: f64) -> f64 {
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut t = lo;
    while t <= hi + 1e-12 {
        sum += g(t);
        t += h;
    }
    let mut prev = sum * h;
    for _ in 0..12 {
        h *= 0.5;
        let mut t = lo + h;
        while t < hi {
            sum += g(t);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if (cur - prev).abs() <= rel * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// Two-state blockage channel: index 0 is LOS, 1 is NLOS.
#[derive(Debug, Clone, Copy)]
pub struct Channel {
    pub beta: f64,
    pub alpha: [f64; 2],
    pub c: [f64; 2],
}

impl Channel {
    pub fn baseline() -> Self {
        Self { beta: 150.0, alpha: [2.5, 3.5], c: [1e-6, 1e-6] }
    }

    pub fn p(&self, t: usize, r: f64) -> f64 {
        let los = (-r / self.beta).exp();
        if t == 0 {
            los
        } else {
            1.0 - los
        }
    }

    /// Mean number of type-`t` points per unit density within `r`.
    pub fn volume(&self, t: usize, r: f64) -> f64 {
        let x = r / self.beta;
        // 2πβ²(1 − e^{−x}(1 + x)), with the small-x series to avoid cancellation.
        let los = if x < 1e-3 {
            2.0 * PI * self.beta * self.beta * (x * x / 2.0 - x * x * x / 3.0 + x.powi(4) / 8.0)
        } else {
            2.0 * PI * self.beta * self.beta * (1.0 - (-x).exp() * (1.0 + x))
        };
        if t == 0 {
            los
        } else {
            PI * r * r - los
        }
    }

    /// Distance at which a type-`t` link has the mean gain of a type-`home`
    /// link of length `r`.
    pub fn equal_gain_distance(&self, home: usize, t: usize, r: f64) -> f64 {
        let gain = self.c[home] * r.powf(-self.alpha[home]);
        (self.c[t] / gain).powf(1.0 / self.alpha[t])
    }

    /// Density of the home link of a BS: distance `r`, type `home`.
    pub fn home_pdf(&self, lambda_r: f64, r: f64, home: usize) -> f64 {
        let void: f64 = (0..2).map(|t| self.volume(t, self.equal_gain_distance(home, t, r))).sum();
        2.0 * PI * lambda_r * self.p(home, r) * r * (-lambda_r * void).exp()
    }

    /// Integrates `g(r, home)` against the home-link law.
    pub fn home_expectation<G: Fn(f64, usize) -> f64>(&self, lambda_r: f64, g: G, rel: f64) -> f64 {
        let scale = 1.0 / (PI * lambda_r).sqrt();
        (0..2)
            .map(|home| exp_sinh(|r| self.home_pdf(lambda_r, r, home) * g(r, home), 0.0, scale, rel))
            .sum()
    }

    /// `X̄ = r^{α_T}/C_T`.
    pub fn normalized_power(&self, r: f64, home: usize) -> f64 {
        r.powf(self.alpha[home]) / self.c[home]
    }
}

/// `∫_{lower}^∞ p_t(y) 2πy / (1 + y^{α_t}/g) dy`: the PGFL exponent of one
/// link type for interferers of mean received power `g y^{−α_t}` relative
/// to the Laplace variable, beyond physical distance `lower`.
pub fn shot_noise_exponent(ch: &Channel, t: usize, g: f64, lower: f64, rel: f64) -> f64 {
    let a = ch.alpha[t];
    let knee = g.powf(1.0 / a);
    let f = |y: f64| ch.p(t, y) * 2.0 * PI * y / (1.0 + y.powf(a) / g);
    exp_sinh(f, lower, knee.max(lower).max(1e-3 * ch.beta), rel)
}

/// `F(K; B, e)` for interferers of power `ξ X̄`, with `B = sξG`: the
/// exponent per unit BS density, counting only BSs whose mean received
/// power at the probe, `ξ X̄ C_t y^{−α_t}`, is below `ξ/e`.
pub fn restricted_exponent(ch: &Channel, lambda_r: f64, b: f64, e: f64, rel: f64) -> f64 {
    ch.home_expectation(
        lambda_r,
        |r, home| {
            let x = ch.normalized_power(r, home);
            (0..2)
                .map(|t| {
                    let g = b * x * ch.c[t];
                    // X̄ C_t y^{−α} < 1/e  ⇔  y > (e X̄ C_t)^{1/α}.
                    let lower = if e > 0.0 { (e * x * ch.c[t]).powf(1.0 / ch.alpha[t]) } else { 0.0 };
                    shot_noise_exponent(ch, t, g, lower, rel)
                })
                .sum()
        },
        rel,
    )
}

/// Fixed-power interferers of power `power`; `b` multiplies `power·C_t`,
/// and only BSs with `power C_t y^{−α_t} < power / e` are counted.
pub fn fixed_exponent(ch: &Channel, power: f64, b: f64, e: f64, rel: f64) -> f64 {
    (0..2)
        .map(|t| {
            let g = b * power * ch.c[t];
            let lower = if e > 0.0 { (e * power * ch.c[t]).powf(1.0 / ch.alpha[t]) } else { 0.0 };
            shot_noise_exponent(ch, t, g, lower, rel)
        })
        .sum()
}

/// Mean number of BSs per unit density whose home user is a given primary
/// user: `∫ Σ_T p_T(r) exp(−λ V(r, T)) 2πr dr`.
pub fn native_area(ch: &Channel, lambda_r: f64, rel: f64) -> f64 {
    let scale = 1.0 / (PI * lambda_r).sqrt();
    (0..2)
        .map(|home| exp_sinh(|r| ch.home_pdf(lambda_r, r, home) / lambda_r, 0.0, scale, rel))
        .sum()
}

/// Kernel `K_t(v) = E[p_t(v E_t) E_t²]`, `E_t = (X̄ C_t)^{1/α_t}`, by
/// Monte Carlo over sampled home links.
pub fn kernel_sample(ch: &Channel, t: usize, v: f64, x: f64) -> f64 {
    let e = (x * ch.c[t]).powf(1.0 / ch.alpha[t]);
    ch.p(t, v * e) * e * e
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(mut sample: Vec<f64>, cdf: F) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sample.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// KS distance of `(distance, type)` home-link pairs against the joint
/// law, ordering LOS before NLOS and by distance within a type.
pub fn joint_home_ks(ch: &Channel, lambda_r: f64, sample: &[(f64, usize)]) -> f64 {
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    let mut offset_count = 0usize;
    let mut offset_mass = 0.0;
    for t in 0..2 {
        let mut r: Vec<f64> = sample.iter().filter(|h| h.1 == t).map(|h| h.0).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pdf = |x: f64| ch.home_pdf(lambda_r, x, t);
        let mut cdf = 0.0;
        let mut prev = 0.0;
        for (k, &x) in r.iter().enumerate() {
            cdf += tanh_sinh(pdf, prev, x, 1e-10);
            prev = x;
            let f = offset_mass + cdf;
            let lo = (offset_count + k) as f64 / n;
            let hi = (offset_count + k + 1) as f64 / n;
            d = d.max((f - lo).abs()).max((hi - f).abs());
        }
        offset_count += r.len();
        offset_mass += exp_sinh(pdf, 0.0, 1.0 / (PI * lambda_r).sqrt(), 1e-12);
    }
    d
}

#[cfg(test)]
mod tests {
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn quadrature_rules() {
        let v = tanh_sinh(|x| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
        let v = exp_sinh(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12);
        assert!((v - FRAC_PI_2).abs() < 1e-12);
        let v = exp_sinh(|x| (-x).exp(), 2.0, 1.0, 1e-12);
        assert!((v - (-2.0f64).exp()).abs() < 1e-13);
    }
}
