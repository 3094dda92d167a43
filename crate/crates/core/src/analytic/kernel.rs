//! Intensity kernels of the interferer fields in scaled distance.
//!
//! A fixed-power network seen from a user maps a BS of type `t` at
//! distance `x` to `v = x / (P C_t)^{1/α_t}`, so its average received power
//! is `v^{-α_t}`; the mapped points form a PPP with intensity
//! `λ M_t(v) 2πv dv`, `M_t(v) = p_t(v (P C_t)^{1/α_t}) (P C_t)^{2/α_t}`.
//!
//! A restricted network maps a BS with normalized power `X̄` to
//! `v = x / (X̄ C_t)^{1/α_t}` so its received power is `ξ v^{-α_t}`; averaging
//! over the home-link law gives `K_t(v) = E[p_t(v E_t) E_t²]` with
//! `E_t = (X̄ C_t)^{1/α_t}`.
//!
//! `Q_t(a) = ∫_0^a κ_t(z) z dz` is the companion cumulative used in void
//! probabilities.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::geometry::{ChannelModel, HomeLinkDistribution, LinkType};
use crate::quadrature::QuadratureSpec;

use super::AnalyticError;

/// How the restricted kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelMode {
    /// Precomputed on a log grid and interpolated.
    Tabulated,
    /// Quadrature over the home-link law at every call.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedKernel {
    pub channel: ChannelModel,
    pub power: f64,
    reach: [f64; 2],
}

impl FixedKernel {
    pub fn new(channel: ChannelModel, power: f64) -> Self {
        let reach = [LinkType::Los, LinkType::Nlos].map(|t| (power * channel.c(t)).powf(1.0 / channel.alpha(t)));
        Self { channel, power, reach }
    }

    /// `(P C_t)^{1/α_t}`: physical distance per unit scaled distance.
    pub fn reach(&self, t: LinkType) -> f64 {
        self.reach[t.index()]
    }

    #[inline]
    pub fn value(&self, t: LinkType, v: f64) -> f64 {
        let r = self.reach[t.index()];
        self.channel.link_probability(t, v * r) * r * r
    }

    #[inline]
    pub fn cumulative(&self, t: LinkType, a: f64) -> f64 {
        self.channel.volume(t, a * self.reach[t.index()]) / (2.0 * PI)
    }
}

const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e8;
const GRID_POINTS: usize = 561;

#[derive(Debug, Clone, PartialEq)]
struct Table {
    ln_lo: f64,
    step: f64,
    // ln of K_t and Q_t on the grid, indexed [t][i]
    ln_k: [Vec<f64>; 2],
    ln_q: [Vec<f64>; 2],
}

fn lagrange6(y: &[f64], x: f64) -> f64 {
    // x is a fractional index; the six-point stencil is shifted inward at the ends
    let n = y.len();
    let i = (x.floor() as isize).clamp(0, n as isize - 2) as usize;
    let start = i.saturating_sub(2).min(n.saturating_sub(6));
    let stencil = &y[start..(start + 6).min(n)];
    if stencil.len() < 6 || stencil.iter().any(|v| !v.is_finite()) {
        let t = x - i as f64;
        return y[i] + t * (y[i + 1] - y[i]);
    }
    let u = x - start as f64;
    let mut sum = 0.0;
    for (k, &yk) in stencil.iter().enumerate() {
        let mut w = 1.0;
        for j in 0..6 {
            if j != k {
                w *= (u - j as f64) / (k as f64 - j as f64);
            }
        }
        sum += w * yk;
    }
    sum
}

impl Table {
    fn lookup(&self, ln_y: &[f64], v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let x = (v.ln() - self.ln_lo) / self.step;
        let n = ln_y.len();
        let last = (n - 1) as f64;
        if x < 0.0 || x > last {
            // power-law continuation from the end slope
            let (i0, i1) = if x < 0.0 { (0, 1) } else { (n - 2, n - 1) };
            let (a, b) = (ln_y[i0], ln_y[i1]);
            if !(a.is_finite() && b.is_finite()) {
                return 0.0;
            }
            let slope = b - a;
            let anchor = if x < 0.0 { (0.0, a) } else { (last, b) };
            return (anchor.1 + slope * (x - anchor.0)).exp();
        }
        let y = lagrange6(ln_y, x);
        y.exp()
    }
}

/// `K_t` and `Q_t` of a restricted secondary network.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedKernel {
    pub home: HomeLinkDistribution,
    pub spec: QuadratureSpec,
    table: Option<Table>,
}

impl RestrictedKernel {
    pub fn new(home: HomeLinkDistribution, mode: KernelMode, spec: QuadratureSpec) -> Result<Self, AnalyticError> {
        let mut k = Self { home, spec: Self::inner_spec(&home, spec), table: None };
        if mode == KernelMode::Tabulated {
            k.table = Some(k.build_table()?);
        }
        Ok(k)
    }

    fn inner_spec(home: &HomeLinkDistribution, spec: QuadratureSpec) -> QuadratureSpec {
        let scale = 1.0 / (PI * home.primary_user_density);
        QuadratureSpec {
            rel_tol: spec.rel_tol.min(1e-8),
            abs_tol: 1e-13 * scale,
            ..spec
        }
    }

    pub fn mode(&self) -> KernelMode {
        if self.table.is_some() {
            KernelMode::Tabulated
        } else {
            KernelMode::Exact
        }
    }

    #[inline]
    fn reach(&self, t: LinkType, xbar: f64) -> f64 {
        let ch = &self.home.channel;
        (xbar * ch.c(t)).powf(1.0 / ch.alpha(t))
    }

    /// `K_t(v)` by quadrature over the home-link law.
    pub fn exact_value(&self, t: LinkType, v: f64) -> Result<f64, AnalyticError> {
        let ch = self.home.channel;
        let est = self.home.normalized_power_moments(
            |xbar| {
                let e = self.reach(t, xbar);
                ch.link_probability(t, v * e) * e * e
            },
            &self.spec,
        )?;
        Ok(est.value)
    }

    /// `Q_t(a) = E[V_t(a E_t)] / 2π` by quadrature.
    pub fn exact_cumulative(&self, t: LinkType, a: f64) -> Result<f64, AnalyticError> {
        let ch = self.home.channel;
        let est = self
            .home
            .normalized_power_moments(|xbar| ch.volume(t, a * self.reach(t, xbar)), &self.spec)?;
        Ok(est.value / (2.0 * PI))
    }

    /// `K_t(∞)`: `E[E_t²]` times the far-field link probability.
    pub fn limit(&self, t: LinkType) -> Result<f64, AnalyticError> {
        let p_inf = self.home.channel.link_probability(t, f64::MAX);
        if p_inf == 0.0 {
            return Ok(0.0);
        }
        let est = self.home.normalized_power_moments(|xbar| self.reach(t, xbar).powi(2), &self.spec)?;
        Ok(p_inf * est.value)
    }

    fn build_table(&self) -> Result<Table, AnalyticError> {
        let ln_lo = GRID_LO.ln();
        let step = (GRID_HI.ln() - ln_lo) / (GRID_POINTS - 1) as f64;
        let rows: Vec<Result<[f64; 4], AnalyticError>> = (0..GRID_POINTS)
            .into_par_iter()
            .map(|i| {
                let v = (ln_lo + step * i as f64).exp();
                Ok([
                    self.exact_value(LinkType::Los, v)?,
                    self.exact_value(LinkType::Nlos, v)?,
                    self.exact_cumulative(LinkType::Los, v)?,
                    self.exact_cumulative(LinkType::Nlos, v)?,
                ])
            })
            .collect();
        let mut ln_k = [Vec::with_capacity(GRID_POINTS), Vec::with_capacity(GRID_POINTS)];
        let mut ln_q = [Vec::with_capacity(GRID_POINTS), Vec::with_capacity(GRID_POINTS)];
        for row in rows {
            let row = row?;
            ln_k[0].push(row[0].ln());
            ln_k[1].push(row[1].ln());
            ln_q[0].push(row[2].ln());
            ln_q[1].push(row[3].ln());
        }
        Ok(Table { ln_lo, step, ln_k, ln_q })
    }

    #[inline]
    pub fn value(&self, t: LinkType, v: f64) -> f64 {
        match &self.table {
            Some(tab) => tab.lookup(&tab.ln_k[t.index()], v),
            None => self.exact_value(t, v).unwrap_or(f64::NAN),
        }
    }

    #[inline]
    pub fn cumulative(&self, t: LinkType, a: f64) -> f64 {
        match &self.table {
            Some(tab) => tab.lookup(&tab.ln_q[t.index()], a),
            None => self.exact_cumulative(t, a).unwrap_or(f64::NAN),
        }
    }
}

/// Kernel of one network as seen by a user of either network.
#[derive(Debug, Clone)]
pub enum Kernel {
    Fixed(FixedKernel),
    Restricted(Arc<RestrictedKernel>),
}

impl Kernel {
    #[inline]
    pub fn value(&self, t: LinkType, v: f64) -> f64 {
        match self {
            Kernel::Fixed(k) => k.value(t, v),
            Kernel::Restricted(k) => k.value(t, v),
        }
    }

    #[inline]
    pub fn cumulative(&self, t: LinkType, a: f64) -> f64 {
        match self {
            Kernel::Fixed(k) => k.cumulative(t, a),
            Kernel::Restricted(k) => k.cumulative(t, a),
        }
    }

    pub fn channel(&self) -> &ChannelModel {
        match self {
            Kernel::Fixed(k) => &k.channel,
            Kernel::Restricted(k) => &k.home.channel,
        }
    }

    /// Physical distance corresponding to unit scaled distance, roughly.
    pub fn typical_reach(&self, t: LinkType) -> f64 {
        match self {
            Kernel::Fixed(k) => k.reach(t),
            Kernel::Restricted(k) => k.home.scale(),
        }
    }
}
