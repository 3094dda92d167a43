use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;

use mmshare_core::analytic::special::ClosedForm;
use mmshare_core::analytic::{AnalyticModel, EngineOptions};
use mmshare_core::economics::{
    inverse_coverage, median_rate, rate_coverage, utilities, CoverageSource, LoadModel, LogBase, Pricing,
};
use mmshare_core::geometry::{
    secondary_tx_power, ula_pattern, AntennaPattern, Blockage, ChannelModel, HomeLinkDistribution, LinkType,
    OperatorConfig, PowerRule,
};
use mmshare_core::montecarlo::{CoverageCurve, Operator, Provenance};
use mmshare_core::quadrature::QuadratureSpec;

fn operators(antenna: AntennaPattern, xi: f64, noise: f64) -> (OperatorConfig, OperatorConfig) {
    let primary = OperatorConfig {
        bs_density: 30e-6,
        user_density: 100e-6,
        antenna,
        power_rule: PowerRule::Fixed { watts: 10.0 },
        noise_power: noise,
    };
    let secondary = OperatorConfig { power_rule: PowerRule::InterferenceCap { xi }, ..primary };
    (primary, secondary)
}

fn baseline() -> &'static AnalyticModel {
    static MODEL: OnceLock<AnalyticModel> = OnceLock::new();
    MODEL.get_or_init(|| {
        let (p, s) = operators(ula_pattern(128, 0.8).unwrap(), 1e-12, 1e-11);
        AnalyticModel::new(ChannelModel::baseline(), p, s, EngineOptions::default()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antenna_conserves_power(g in 1.0f64..500.0, theta in 1e-3f64..(2.0 * PI)) {
        if let Ok(a) = AntennaPattern::sectored(g, theta) {
            let total = a.main_gain * a.beamwidth + a.side_gain * (2.0 * PI - a.beamwidth);
            prop_assert!((total - 2.0 * PI).abs() <= 1e-12 * 2.0 * PI);
        }
    }

    #[test]
    fn ula_conserves_power(n in 2usize..1024, kappa in 0.05f64..1.0) {
        let a = ula_pattern(n, kappa).unwrap();
        let total = a.main_gain * a.beamwidth + a.side_gain * (2.0 * PI - a.beamwidth);
        prop_assert!((total - 2.0 * PI).abs() <= 1e-12 * 2.0 * PI);
    }

    #[test]
    fn exclusion_radius_inverts_pathloss(r in 0.1f64..2000.0) {
        let ch = ChannelModel::baseline();
        for home in LinkType::ALL {
            for t in LinkType::ALL {
                let e = ch.exclusion_radius(home, t, r).unwrap();
                let a = ch.gain(t, e);
                let b = ch.gain(home, r);
                prop_assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }

    #[test]
    fn restricted_power_meets_the_cap(r in 0.1f64..2000.0, xi_db in -150.0f64..-80.0) {
        let ch = ChannelModel::baseline();
        let xi = 10f64.powf(xi_db / 10.0);
        for home in LinkType::ALL {
            let p = secondary_tx_power(&ch, xi, r, home).unwrap();
            prop_assert!((ch.gain(home, r) * p - xi).abs() <= 4.0 * f64::EPSILON * xi);
        }
    }

    #[test]
    fn blockage_and_pathloss_decrease(r in 0.1f64..2000.0, dr in 1e-3f64..100.0) {
        let ch = ChannelModel::baseline();
        prop_assert!(ch.los_probability(r + dr).unwrap() <= ch.los_probability(r).unwrap());
        for t in LinkType::ALL {
            prop_assert!(ch.pathloss(t, r + dr).unwrap() < ch.pathloss(t, r).unwrap());
        }
    }

    #[test]
    fn moments_do_not_depend_on_xi(xi_db in -150.0f64..-80.0) {
        // The secondary cap only scales powers; the home-link law is fixed.
        let (p, s) = operators(ula_pattern(128, 0.8).unwrap(), 10f64.powf(xi_db / 10.0), 1e-11);
        let m = baseline().with_operators(p, s).unwrap();
        prop_assert_eq!(m.mean_normalized_power().unwrap(), baseline().mean_normalized_power().unwrap());
    }
}

#[test]
fn unit_moment_is_one() {
    let home = HomeLinkDistribution::new(ChannelModel::baseline(), 100e-6).unwrap();
    let m = home.normalized_power_moments(|_| 1.0, &QuadratureSpec::precise()).unwrap();
    assert!((m.value - 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn laplace_transforms_are_bounded_and_decreasing(
        s1 in 0.0f64..1e12,
        ratio in 1.0f64..100.0,
        e in 0.0f64..1e8,
    ) {
        let m = baseline();
        let s2 = s1 * ratio;
        let pairs = [
            (m.laplace_secondary_at_secondary(s1, e).unwrap(), m.laplace_secondary_at_secondary(s2, e).unwrap()),
            (m.laplace_primary_at_secondary(s1).unwrap(), m.laplace_primary_at_secondary(s2).unwrap()),
            (m.laplace_primary_at_primary(s1, e).unwrap(), m.laplace_primary_at_primary(s2, e).unwrap()),
            (m.laplace_secondary_at_primary(s1).unwrap(), m.laplace_secondary_at_primary(s2).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(a > 0.0 && a <= 1.0, "{a}");
            prop_assert!(b > 0.0 && b <= 1.0, "{b}");
            prop_assert!(b <= a * (1.0 + 1e-9), "{a} -> {b}");
        }
    }
}

#[test]
fn laplace_transforms_are_one_at_zero() {
    let m = baseline();
    assert_eq!(m.laplace_secondary_at_secondary(0.0, 1.0).unwrap(), 1.0);
    assert_eq!(m.laplace_primary_at_secondary(0.0).unwrap(), 1.0);
    assert_eq!(m.laplace_primary_at_primary(0.0, 1.0).unwrap(), 1.0);
    assert_eq!(m.laplace_secondary_at_primary(0.0).unwrap(), 1.0);
}

#[test]
fn coverage_is_monotone_on_fifty_points() {
    let m = baseline();
    let grid: Vec<f64> = (0..50).map(|i| 10f64.powf((-20.0 + 60.0 * i as f64 / 49.0) / 10.0)).collect();
    for op in [Operator::Primary, Operator::Secondary] {
        let curve = m.coverage_curve(op, &grid).unwrap();
        assert!(curve.is_valid(), "{op:?}: {:?}", curve.values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // SINR is homogeneous of degree zero in (P_P, ξ, σ²).
    #[test]
    fn common_power_scaling_leaves_coverage_unchanged(k_db in -20.0f64..20.0, tau_db in -10.0f64..20.0) {
        let k = 10f64.powf(k_db / 10.0);
        let tau = 10f64.powf(tau_db / 10.0);
        let m = baseline();
        let mut p = m.primary;
        let mut s = m.secondary;
        p.power_rule = PowerRule::Fixed { watts: 10.0 * k };
        s.power_rule = PowerRule::InterferenceCap { xi: 1e-12 * k };
        p.noise_power *= k;
        s.noise_power *= k;
        let scaled = m.with_operators(p, s).unwrap();
        for op in [Operator::Primary, Operator::Secondary] {
            let a = m.coverage_of(op, tau).unwrap();
            let b = scaled.coverage_of(op, tau).unwrap();
            prop_assert!((a - b).abs() < 1e-5, "{op:?}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_xi_density_invariance(
        a in 0.1f64..10.0,
        alpha in 2.2f64..5.0,
        tau_db in -10.0f64..30.0,
        theta in 0.05f64..3.0,
    ) {
        let ch = ChannelModel::equal_parameters(Blockage::Exponential { beta: 150.0 }, alpha, 1e-6).unwrap();
        let ant = AntennaPattern::sectored(1.5, theta).unwrap();
        let (p, s) = operators(ant, 1e-12, 0.0);
        let form = ClosedForm::from_channel(&ch, p, s).unwrap();
        let mut s2 = s;
        s2.bs_density *= a;
        s2.power_rule = PowerRule::InterferenceCap { xi: 1e-12 * a.powf(-alpha / 2.0) };
        let moved = ClosedForm::from_channel(&ch, p, s2).unwrap();
        let tau = 10f64.powf(tau_db / 10.0);
        let x = form.coverage_secondary(tau).unwrap();
        let y = moved.coverage_secondary(tau).unwrap();
        prop_assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
    }
}

#[test]
fn narrower_secondary_beams_help_only_the_secondary() {
    let m = baseline();
    let taus = [0.1, 1.0, 10.0];
    let mut prev_s = [0.0; 3];
    let mut primary: Vec<[f64; 3]> = Vec::new();
    for n in [16, 32, 64, 128, 256] {
        let mut s = m.secondary;
        s.antenna = ula_pattern(n, 0.8).unwrap();
        let model = m.with_operators(m.primary, s).unwrap();
        let mut row = [0.0; 3];
        for (i, &tau) in taus.iter().enumerate() {
            let c = model.coverage_secondary(tau).unwrap();
            assert!(c >= prev_s[i] - 1e-6, "N_S={n} τ={tau}: {c} < {}", prev_s[i]);
            prev_s[i] = c;
            row[i] = model.coverage_primary(tau).unwrap();
        }
        primary.push(row);
    }
    for i in 0..taus.len() {
        let lo = primary.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min);
        let hi = primary.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo < 0.01, "primary coverage at τ={} spans {lo}..{hi}", taus[i]);
    }
}

/// Coverage `1 / (1 + (τ/τ₀)^k)` on a log grid.
fn logistic_curve(op: Operator, tau0: f64, k: f64) -> CoverageCurve {
    let th: Vec<f64> = (0..=600).map(|i| 10f64.powf(-6.0 + 14.0 * i as f64 / 600.0)).collect();
    let values = th.iter().map(|t| 1.0 / (1.0 + (t / tau0).powf(k))).collect();
    CoverageCurve {
        operator: op,
        ci_halfwidth: vec![0.0; th.len()],
        thresholds: th,
        values,
        provenance: Provenance::Analytic { rel_tol: 1e-9 },
    }
}

struct PowerPricing {
    c: [f64; 5],
    e: [f64; 5],
}

impl Pricing for PowerPricing {
    fn revenue_primary(&self, r: f64) -> f64 {
        self.c[0] * r.powf(self.e[0])
    }
    fn revenue_secondary(&self, r: f64) -> f64 {
        self.c[1] * r.powf(self.e[1])
    }
    fn license_primary(&self, r: f64) -> f64 {
        self.c[2] * r.powf(self.e[2])
    }
    fn license_secondary_central(&self, r: f64) -> f64 {
        self.c[3] * r.powf(self.e[3])
    }
    fn license_secondary_primary(&self, r: f64) -> f64 {
        self.c[4] * r.powf(self.e[4])
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn utilities_conserve_revenue(
        rp in 0.0f64..1e3,
        rs in 0.0f64..1e3,
        c in prop::array::uniform5(0.0f64..2.0),
        e in prop::array::uniform5(0.2f64..2.0),
    ) {
        let pricing = PowerPricing { c, e };
        let u = utilities(1e-12, rp, rs, &pricing).unwrap();
        let lhs = u.utility_primary + u.utility_secondary + u.utility_central;
        let rhs = pricing.revenue_primary(rp) + pricing.revenue_secondary(rs);
        // Payments cancel algebraically; rounding scales with their size.
        let scale = rhs.abs() + u.payment_primary_central + u.payment_secondary_central + u.payment_secondary_primary;
        prop_assert!((lhs - rhs).abs() <= 8.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE), "{lhs} vs {rhs}");
    }

    #[test]
    fn rate_coverage_scales_with_bandwidth(
        rho in 0.0f64..3e8,
        c in 0.1f64..10.0,
        tau0 in 0.1f64..10.0,
    ) {
        let curve = logistic_curve(Operator::Secondary, tau0, 1.0);
        let load = LoadModel::new(5.0, 5.0, 5e8, LogBase::Two).unwrap();
        let wide = LoadModel { bandwidth: load.bandwidth * c, ..load };
        let src = CoverageSource::Curve(&curve);
        let tau = load.rate_threshold(Operator::Secondary, rho);
        prop_assume!((1e-6..=1e8).contains(&tau) || rho == 0.0);
        let a = rate_coverage(src, &load, rho).unwrap();
        let b = rate_coverage(src, &wide, rho * c).unwrap();
        prop_assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        let more = rate_coverage(src, &load, rho * 1.1);
        if let Ok(m) = more {
            prop_assert!(m <= a + 1e-12);
        }
    }

    #[test]
    fn median_rate_is_linear_in_bandwidth_and_ordered(
        c in 0.1f64..10.0,
        tau0 in 0.01f64..100.0,
        better in 1.0f64..10.0,
    ) {
        let lo = logistic_curve(Operator::Primary, tau0, 1.5);
        let hi = logistic_curve(Operator::Primary, tau0 * better, 1.5);
        let load = LoadModel::new(5.0, 5.0, 5e8, LogBase::Two).unwrap();
        let wide = LoadModel { bandwidth: load.bandwidth * c, ..load };
        let a = median_rate(CoverageSource::Curve(&lo), 1e-4, &load).unwrap();
        let b = median_rate(CoverageSource::Curve(&lo), 1e-4, &wide).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-12 * b);
        let d = median_rate(CoverageSource::Curve(&hi), 1e-4, &load).unwrap();
        prop_assert!(d >= a * (1.0 - 1e-4));
    }
}

#[test]
fn rate_coverage_at_zero_is_one() {
    let curve = logistic_curve(Operator::Primary, 1.0, 1.0);
    let load = LoadModel::new(5.0, 5.0, 5e8, LogBase::Two).unwrap();
    assert_eq!(rate_coverage(CoverageSource::Curve(&curve), &load, 0.0).unwrap(), 1.0);
}

#[test]
fn inverse_coverage_hits_the_median() {
    let m = baseline();
    for op in [Operator::Primary, Operator::Secondary] {
        let src = CoverageSource::Analytic { model: m, operator: op };
        let tau = inverse_coverage(src, 0.5).unwrap();
        let c = m.coverage_of(op, tau).unwrap();
        assert!((c - 0.5).abs() <= 1e-4, "{op:?}: P({tau}) = {c}");
    }
}
