//! Dispatch of a configured run to the engines.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use mmshare_core::analytic::{AnalyticModel, EngineOptions};
use mmshare_core::economics::{
    compare_sharing_modes, inverse_coverage, median_rates, rate_from_median_sinr, sweep_xi, xi_grid_db, CoverageSource,
    LoadModel,
};
use mmshare_core::geometry::{ula_pattern, OperatorConfig};
use mmshare_core::montecarlo::{self, CoverageCurve, Operator, Scenario};
use mmshare_core::units::{db_to_linear, linear_to_db, to_per_km2, watts_to_dbm};
use mmshare_core::QuadratureSpec;

use crate::config::{Engine, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Mc,
    Analytic,
    Validate,
    SweepXi,
    CompareModes,
    SweepDensity,
    SweepBeamwidth,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Mc => "mc",
            Mode::Analytic => "analytic",
            Mode::Validate => "validate",
            Mode::SweepXi => "sweep-xi",
            Mode::CompareModes => "compare-modes",
            Mode::SweepDensity => "sweep-density",
            Mode::SweepBeamwidth => "sweep-beamwidth",
        }
    }

    /// Stem of the output files.
    pub fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// An engine that produced numbers in a record, with its accuracy setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineInfo {
    pub name: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realizations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub mode: Mode,
    pub config_hash: String,
    pub seed: u64,
    pub engines: Vec<EngineInfo>,
    pub threads: usize,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub metadata: Metadata,
    pub tables: Vec<Table>,
    /// `Some(false)` when a `validate` run exceeded its tolerance.
    pub validation_passed: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub settings: Settings,
    /// Worker threads; 0 picks one per core.
    pub threads: usize,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn mc_engine(s: &Settings) -> EngineInfo {
    EngineInfo {
        name: "montecarlo".into(),
        version: VERSION.into(),
        rel_tol: None,
        realizations: Some(s.simulation.realizations),
    }
}

fn analytic_engine(s: &Settings) -> EngineInfo {
    EngineInfo { name: "analytic".into(), version: VERSION.into(), rel_tol: Some(s.analytic.rel_tol), realizations: None }
}

fn engines_for(mode: Mode, s: &Settings) -> Vec<EngineInfo> {
    match mode {
        Mode::Mc => vec![mc_engine(s)],
        Mode::Validate => vec![mc_engine(s), analytic_engine(s)],
        Mode::SweepDensity if s.sweeps.density_engine == Engine::Mc => vec![mc_engine(s)],
        _ => vec![analytic_engine(s)],
    }
}

pub fn run(config: &RunConfig) -> Result<ResultRecord> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build().context("building the worker pool")?;
    let threads = pool.current_num_threads();
    let start = Instant::now();
    let (tables, validation_passed) = pool.install(|| dispatch(config.mode, &config.settings))?;
    let s = &config.settings;
    Ok(ResultRecord {
        metadata: Metadata {
            mode: config.mode,
            config_hash: s.hash(),
            seed: s.seed,
            engines: engines_for(config.mode, s),
            threads,
            duration_s: start.elapsed().as_secs_f64(),
        },
        tables,
        validation_passed,
    })
}

fn dispatch(mode: Mode, s: &Settings) -> Result<(Vec<Table>, Option<bool>)> {
    match mode {
        Mode::Mc => Ok((vec![mc_curves(s)?], None)),
        Mode::Analytic => Ok((vec![analytic_curves(s)?], None)),
        Mode::Validate => validate(s).map(|(t, ok)| (t, Some(ok))),
        Mode::SweepXi => Ok((xi_sweep(s)?, None)),
        Mode::CompareModes => Ok((modes(s)?, None)),
        Mode::SweepDensity => Ok((vec![density_sweep(s)?], None)),
        Mode::SweepBeamwidth => Ok((vec![beamwidth_sweep(s)?], None)),
    }
}

fn options(s: &Settings) -> EngineOptions {
    EngineOptions {
        spec: QuadratureSpec { rel_tol: s.analytic.rel_tol, abs_tol: s.analytic.abs_tol, ..QuadratureSpec::default() },
        kernel_mode: s.analytic.kernel,
    }
}

fn model(s: &Settings) -> Result<AnalyticModel> {
    AnalyticModel::new(s.channel, s.primary, s.secondary, options(s)).context("setting up the analytic model")
}

fn scenario(s: &Settings, secondary: OperatorConfig) -> Result<Scenario> {
    let mut sc = Scenario::new(s.channel, s.primary, secondary, s.seed, s.simulation.realizations)
        .context("setting up the simulation scenario")?;
    if let (Some(w), Some(g)) = (s.simulation.window_radius, s.simulation.guard_radius) {
        sc.window_radius = w;
        sc.guard_radius = g;
        sc.validate().context("simulation window")?;
    }
    Ok(sc)
}

fn thresholds(s: &Settings) -> Vec<f64> {
    s.simulation.thresholds_db.values().into_iter().map(db_to_linear).collect()
}

const CURVE_COLUMNS: [&str; 6] = ["threshold_db", "value", "ci_halfwidth", "operator", "provenance", "lambda_s_km2"];

fn push_curve(table: &mut Table, curve: &CoverageCurve, density: f64) {
    let label = curve.provenance.label();
    for i in 0..curve.thresholds.len() {
        table.push(vec![
            linear_to_db(curve.thresholds[i]).into(),
            curve.values[i].into(),
            curve.ci_halfwidth[i].into(),
            curve.operator.label().into(),
            label.clone().into(),
            to_per_km2(density).into(),
        ]);
    }
}

fn with_density(op: &OperatorConfig, density: f64) -> OperatorConfig {
    OperatorConfig { bs_density: density, ..*op }
}

fn simulate_curves(s: &Settings, secondary: OperatorConfig, th: &[f64]) -> Result<[CoverageCurve; 2]> {
    let sc = scenario(s, secondary)?;
    Ok(montecarlo::empirical_coverage(&sc, th))
}

fn analytic_pair(m: &AnalyticModel, th: &[f64]) -> Result<[CoverageCurve; 2]> {
    let ctx = || format!("analytic coverage at λ_S = {}/km²", to_per_km2(m.secondary.bs_density));
    Ok([
        m.coverage_curve(Operator::Primary, th).with_context(ctx)?,
        m.coverage_curve(Operator::Secondary, th).with_context(ctx)?,
    ])
}

fn mc_curves(s: &Settings) -> Result<Table> {
    let mut t = Table::new("coverage", &CURVE_COLUMNS);
    for c in simulate_curves(s, s.secondary, &thresholds(s))? {
        push_curve(&mut t, &c, s.secondary.bs_density);
    }
    Ok(t)
}

fn analytic_curves(s: &Settings) -> Result<Table> {
    let mut t = Table::new("coverage", &CURVE_COLUMNS);
    for c in analytic_pair(&model(s)?, &thresholds(s))? {
        push_curve(&mut t, &c, s.secondary.bs_density);
    }
    Ok(t)
}

/// Largest absolute difference between two curves on the same grid.
pub fn max_gap(a: &CoverageCurve, b: &CoverageCurve) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn validate(s: &Settings) -> Result<(Vec<Table>, bool)> {
    let th = thresholds(s);
    let base = model(s)?;
    let mut curves = Table::new("coverage", &CURVE_COLUMNS);
    let mut gaps = Table::new("gaps", &["operator", "lambda_s_km2", "max_gap", "tolerance", "passed"]);
    let mut ok = true;
    for &d in &s.sweeps.validate_densities {
        let secondary = with_density(&s.secondary, d);
        let mc = simulate_curves(s, secondary, &th)?;
        let m = base.with_operators(s.primary, secondary)?;
        let an = analytic_pair(&m, &th)?;
        for (x, y) in mc.iter().zip(&an) {
            push_curve(&mut curves, x, d);
            push_curve(&mut curves, y, d);
            let g = max_gap(x, y);
            let pass = g <= s.sweeps.validate_tolerance;
            ok &= pass;
            gaps.push(vec![
                x.operator.label().into(),
                to_per_km2(d).into(),
                g.into(),
                s.sweeps.validate_tolerance.into(),
                Cell::Int(pass as i64),
            ]);
        }
    }
    Ok((vec![curves, gaps], ok))
}

fn opt(x: Option<f64>) -> Cell {
    x.map_or(Cell::Missing, Cell::Num)
}

fn xi_sweep(s: &Settings) -> Result<Vec<Table>> {
    let g = s.economics.xi_grid_db;
    let grid = xi_grid_db(g.from, g.to, g.points);
    let m = model(s)?;
    let sweep = sweep_xi(&m, &grid, s.economics.bandwidth, s.economics.log_base, &s.economics.pricing)
        .context("ξ sweep")?;
    let mut t = Table::new(
        "sweep_xi",
        &["xi_db", "r_p", "r_s", "u_p", "u_s", "u_c", "m_p", "m_s", "p_p", "p_sc", "p_sp", "error"],
    );
    for p in &sweep.points {
        let mut row: Vec<Cell> = vec![linear_to_db(p.xi).into()];
        match &p.report {
            Some(r) => row.extend(
                [
                    r.rate_primary,
                    r.rate_secondary,
                    r.utility_primary,
                    r.utility_secondary,
                    r.utility_central,
                    r.revenue_primary,
                    r.revenue_secondary,
                    r.payment_primary_central,
                    r.payment_secondary_central,
                    r.payment_secondary_primary,
                ]
                .map(Cell::Num),
            ),
            None => row.extend(std::iter::repeat(Cell::Missing).take(10)),
        }
        row.push(p.error.clone().map_or(Cell::Missing, Cell::Text));
        t.push(row);
    }
    let mut a = Table::new("sweep_xi_argmax", &["utility", "xi_db"]);
    for (name, x) in [
        ("u_p", sweep.argmax_primary),
        ("u_s", sweep.argmax_secondary),
        ("u_c", sweep.argmax_central),
        ("u_p_plus_u_c", sweep.argmax_total),
    ] {
        a.push(vec![name.into(), opt(x.map(linear_to_db))]);
    }
    Ok(vec![t, a])
}

fn modes(s: &Settings) -> Result<Vec<Table>> {
    let g = s.economics.xi_grid_db;
    let grid = xi_grid_db(g.from, g.to, g.points);
    let m = model(s)?;
    let cmp = compare_sharing_modes(&m, &s.sweeps.secondary_densities, &grid, s.economics.bandwidth, s.economics.log_base)
        .context("sharing-mode comparison")?;
    let mut t = Table::new(
        "compare_modes",
        &[
            "lambda_s_km2",
            "xi_db",
            "restricted_primary_band",
            "restricted_secondary_band",
            "restricted_sum",
            "uncoordinated_power_dbm",
            "uncoordinated_primary_band",
            "uncoordinated_secondary_band",
            "uncoordinated_sum",
            "gain",
            "error",
        ],
    );
    for r in &cmp.rows {
        t.push(vec![
            to_per_km2(r.secondary_density).into(),
            linear_to_db(r.xi).into(),
            r.restricted_primary_band.into(),
            r.restricted_secondary_band.into(),
            r.restricted_sum.into(),
            watts_to_dbm(r.uncoordinated_power).into(),
            r.uncoordinated_primary_band.into(),
            r.uncoordinated_secondary_band.into(),
            r.uncoordinated_sum.into(),
            r.gain().into(),
            Cell::Missing,
        ]);
    }
    for (d, xi, e) in &cmp.failures {
        let mut row = vec![to_per_km2(*d).into(), linear_to_db(*xi).into()];
        row.extend(std::iter::repeat(Cell::Missing).take(8));
        row.push(e.clone().into());
        t.push(row);
    }
    let mut b = Table::new("compare_modes_best", &["lambda_s_km2", "best_gain"]);
    for (d, gain) in &cmp.best_gain {
        b.push(vec![to_per_km2(*d).into(), (*gain).into()]);
    }
    Ok(vec![t, b])
}

/// Median SINRs and median area rates of both operators.
fn medians(m: &AnalyticModel, s: &Settings) -> Result<[f64; 4]> {
    let tp = inverse_coverage(CoverageSource::Analytic { model: m, operator: Operator::Primary }, 0.5)?;
    let ts = inverse_coverage(CoverageSource::Analytic { model: m, operator: Operator::Secondary }, 0.5)?;
    let (rp, rs) = median_rates(m, s.economics.bandwidth, s.economics.log_base)?;
    Ok([tp, ts, rp, rs])
}

fn density_sweep(s: &Settings) -> Result<Table> {
    let mut t = Table::new(
        "sweep_density",
        &["lambda_s_km2", "median_sinr_p_db", "median_sinr_s_db", "r_p", "r_s", "engine"],
    );
    let base = model(s)?;
    for &d in &s.sweeps.secondary_densities {
        let secondary = with_density(&s.secondary, d);
        let ctx = || format!("median SINR at λ_S = {}/km²", to_per_km2(d));
        let [tp, ts, rp, rs] = match s.sweeps.density_engine {
            Engine::Analytic => medians(&base.with_operators(s.primary, secondary)?, s).with_context(ctx)?,
            Engine::Mc => {
                let samples = montecarlo::simulate(&scenario(s, secondary)?);
                let tp = montecarlo::median(&samples.primary);
                let ts = montecarlo::median(&samples.secondary);
                let load = LoadModel::from_operators(&s.primary, &secondary, s.economics.bandwidth, s.economics.log_base)
                    .with_context(ctx)?;
                let rp = rate_from_median_sinr(tp, s.primary.user_density, load.mean_load_primary, &load);
                let rs = rate_from_median_sinr(ts, secondary.user_density, load.mean_load_secondary, &load);
                [tp, ts, rp, rs]
            }
        };
        let engine = match s.sweeps.density_engine {
            Engine::Analytic => "analytic",
            Engine::Mc => "mc",
        };
        t.push(vec![
            to_per_km2(d).into(),
            linear_to_db(tp).into(),
            linear_to_db(ts).into(),
            rp.into(),
            rs.into(),
            engine.into(),
        ]);
    }
    Ok(t)
}

fn beamwidth_sweep(s: &Settings) -> Result<Table> {
    let mut t = Table::new(
        "sweep_beamwidth",
        &["n_s", "beamwidth_deg", "main_gain", "side_gain", "median_sinr_p_db", "median_sinr_s_db", "r_p", "r_s"],
    );
    let base = model(s)?;
    for &n in &s.sweeps.secondary_elements {
        let antenna = ula_pattern(n, s.sweeps.secondary_kappa)?;
        let secondary = OperatorConfig { antenna, ..s.secondary };
        let m = base.with_operators(s.primary, secondary)?;
        let [tp, ts, rp, rs] = medians(&m, s).with_context(|| format!("median SINR with {n} secondary antennas"))?;
        t.push(vec![
            Cell::Int(n as i64),
            (antenna.beamwidth * 180.0 / PI).into(),
            antenna.main_gain.into(),
            antenna.side_gain.into(),
            linear_to_db(tp).into(),
            linear_to_db(ts).into(),
            rp.into(),
            rs.into(),
        ]);
    }
    Ok(t)
}

