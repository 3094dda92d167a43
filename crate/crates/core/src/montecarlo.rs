//! Monte Carlo network realizations.
//!
//! Four independent PPPs are dropped in a disk around the origin: primary
//! and secondary BSs inside `window_radius`, primary and secondary users
//! inside `window_radius + guard_radius` so that BSs near the edge still see
//! candidate home users. A typical user of each operator sits at the
//! origin. Restricted secondary BSs pick the primary user with the highest
//! average received power as their home and transmit `ξ R^{α_T}/C_T`.
//!
//! For the primary measurement the typical primary user is itself a home
//! candidate; the link type between a secondary BS and that user is the
//! same draw in the association and in the interference sum.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    normalized_power, ChannelModel, GeometryError, LinkType, OperatorConfig, PowerRule,
};
use crate::rng::{realization_rng, PairHasher};

const PROBE_ID: u64 = u64::MAX;
const MAX_ATTEMPTS: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Primary,
    Secondary,
}

impl Operator {
    pub fn label(self) -> &'static str {
        match self {
            Operator::Primary => "primary",
            Operator::Secondary => "secondary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub primary: OperatorConfig,
    pub secondary: OperatorConfig,
    pub channel: ChannelModel,
    pub window_radius: f64,
    pub guard_radius: f64,
    pub seed: u64,
    pub n_realizations: usize,
}

impl Scenario {
    /// Scenario with the default window: five times the larger of the mean
    /// cell radius and the LOS decay length, with a guard of one decay length.
    pub fn new(
        channel: ChannelModel,
        primary: OperatorConfig,
        secondary: OperatorConfig,
        seed: u64,
        n_realizations: usize,
    ) -> Result<Self, GeometryError> {
        let (window_radius, guard_radius) = default_window(&channel, &primary, &secondary);
        let s = Self { primary, secondary, channel, window_radius, guard_radius, seed, n_realizations };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        self.channel.validate()?;
        self.primary.validate()?;
        self.secondary.validate()?;
        if self.primary.power_rule.is_restricted() {
            return Err(GeometryError::Invalid {
                what: "scenario",
                reason: "the primary operator must transmit at fixed power".into(),
            });
        }
        if !(self.guard_radius > 0.0 && self.window_radius > self.guard_radius && self.window_radius.is_finite()) {
            return Err(GeometryError::Invalid {
                what: "scenario",
                reason: format!(
                    "need window_radius > guard_radius > 0, got {} and {}",
                    self.window_radius, self.guard_radius
                ),
            });
        }
        if self.n_realizations == 0 {
            return Err(GeometryError::Invalid { what: "scenario", reason: "need at least one realization".into() });
        }
        Ok(())
    }

    fn tx_power(&self, which: Operator) -> Option<f64> {
        let rule = match which {
            Operator::Primary => self.primary.power_rule,
            Operator::Secondary => self.secondary.power_rule,
        };
        match rule {
            PowerRule::Fixed { watts } => Some(watts),
            PowerRule::InterferenceCap { .. } => None,
        }
    }
}

/// `(window_radius, guard_radius)` defaults for a deployment.
pub fn default_window(channel: &ChannelModel, primary: &OperatorConfig, secondary: &OperatorConfig) -> (f64, f64) {
    let sparsest = primary.bs_density.min(secondary.bs_density);
    let cell_radius = 1.0 / (PI * sparsest).sqrt();
    let beta = channel.beta().unwrap_or(cell_radius);
    (5.0 * cell_radius.max(beta), beta.min(cell_radius.max(beta)))
}

/// Single-band variant in which both operators transmit at `power` watts.
pub fn uncoordinated_mode(scenario: &Scenario, power: f64) -> Scenario {
    let mut s = *scenario;
    s.primary.power_rule = PowerRule::Fixed { watts: power };
    s.secondary.power_rule = PowerRule::Fixed { watts: power };
    s
}

/// Per-link random draws toward a typical user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDraw {
    pub link: LinkType,
    /// Unit-mean exponential fading.
    pub fading: f64,
    /// Angle between the BS beam and the user, uniform on [−π, π].
    pub angle: f64,
}

/// One network's BSs and their links to the two typical users.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BsLayer {
    pub positions: Vec<[f64; 2]>,
    /// Sampling index of each BS; keys the pairwise link draws.
    pub ids: Vec<u32>,
    pub to_primary_user: Vec<LinkDraw>,
    pub to_secondary_user: Vec<LinkDraw>,
}

impl BsLayer {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    fn retain_within(&self, radius: f64) -> Self {
        let mut out = BsLayer::default();
        for i in 0..self.len() {
            if norm(self.positions[i]) <= radius {
                out.positions.push(self.positions[i]);
                out.ids.push(self.ids[i]);
                out.to_primary_user.push(self.to_primary_user[i]);
                out.to_secondary_user.push(self.to_secondary_user[i]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomeUser {
    /// The typical primary user at the origin.
    Probe,
    /// Index into `Realization::primary_users`.
    Point(usize),
}

/// A secondary BS's home primary user and the resulting transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Home {
    pub user: HomeUser,
    pub distance: f64,
    pub link: LinkType,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub index: u64,
    pub attempt: u32,
    pub primary_bs: BsLayer,
    pub secondary_bs: BsLayer,
    pub primary_users: Vec<[f64; 2]>,
    pub primary_user_ids: Vec<u32>,
    pub secondary_users: Vec<[f64; 2]>,
    /// Homes among the PPP primary users; empty under fixed secondary power.
    pub homes: Vec<Home>,
    /// Homes when the typical primary user also takes part.
    pub homes_with_probe: Vec<Home>,
    hasher: PairHasher,
}

impl Realization {
    /// Transmit power of secondary BS `i` as seen by `which` typical user.
    pub fn secondary_power(&self, scenario: &Scenario, i: usize, which: Operator) -> f64 {
        match scenario.secondary.power_rule {
            PowerRule::Fixed { watts } => watts,
            PowerRule::InterferenceCap { .. } => match which {
                Operator::Primary => self.homes_with_probe[i].power,
                Operator::Secondary => self.homes[i].power,
            },
        }
    }

    /// Same realization with BSs beyond `radius` and users beyond
    /// `radius + guard_radius` removed, re-associated.
    pub fn restrict(&self, scenario: &Scenario, radius: f64) -> Realization {
        let user_radius = radius + scenario.guard_radius;
        let mut primary_users = Vec::new();
        let mut primary_user_ids = Vec::new();
        for (p, &id) in self.primary_users.iter().zip(&self.primary_user_ids) {
            if norm(*p) <= user_radius {
                primary_users.push(*p);
                primary_user_ids.push(id);
            }
        }
        let mut r = Realization {
            index: self.index,
            attempt: self.attempt,
            primary_bs: self.primary_bs.retain_within(radius),
            secondary_bs: self.secondary_bs.retain_within(radius),
            primary_users,
            primary_user_ids,
            secondary_users: self.secondary_users.iter().copied().filter(|p| norm(*p) <= user_radius).collect(),
            homes: Vec::new(),
            homes_with_probe: Vec::new(),
            hasher: self.hasher,
        };
        associate_and_power(&mut r, scenario);
        r
    }
}

#[inline]
fn norm(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive Poisson mean");
    let n: f64 = d.sample(rng);
    n as usize
}

fn disk_points(rng: &mut ChaCha8Rng, density: f64, radius: f64) -> Vec<[f64; 2]> {
    let n = poisson_count(rng, density * PI * radius * radius);
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = 2.0 * PI * rng.gen::<f64>();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

fn random_link(rng: &mut ChaCha8Rng, channel: &ChannelModel, d: f64) -> LinkType {
    if rng.gen::<f64>() < channel.blockage.los(d) {
        LinkType::Los
    } else {
        LinkType::Nlos
    }
}

fn draw(rng: &mut ChaCha8Rng, link: LinkType) -> LinkDraw {
    let fading: f64 = Exp1.sample(rng);
    let angle = PI * (2.0 * rng.gen::<f64>() - 1.0);
    LinkDraw { link, fading, angle }
}

fn hashed_link(hasher: &PairHasher, channel: &ChannelModel, bs: u32, user: u64, d: f64) -> LinkType {
    if hasher.uniform(bs as u64, user) < channel.blockage.los(d) {
        LinkType::Los
    } else {
        LinkType::Nlos
    }
}

/// Draws realization `index` of the scenario; rejected draws (no BS in
/// either network, or no primary user to home to) are redrawn.
/// Returns the realization and the number of rejected attempts.
pub fn sample_realization(scenario: &Scenario, index: u64) -> (Realization, u32) {
    let restricted = scenario.secondary.power_rule.is_restricted();
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = realization_rng(scenario.seed, index, attempt);
        let hasher = PairHasher::new(scenario.seed, index, attempt, 0);
        let w = scenario.window_radius;
        let wu = w + scenario.guard_radius;
        let ch = &scenario.channel;

        let primary_pos = disk_points(&mut rng, scenario.primary.bs_density, w);
        let secondary_pos = disk_points(&mut rng, scenario.secondary.bs_density, w);
        let primary_users = disk_points(&mut rng, scenario.primary.user_density, wu);
        let secondary_users = disk_points(&mut rng, scenario.secondary.user_density, wu);

        let mut primary_bs = BsLayer {
            ids: (0..primary_pos.len() as u32).collect(),
            ..Default::default()
        };
        for p in &primary_pos {
            let d = norm(*p);
            let l = random_link(&mut rng, ch, d);
            primary_bs.to_primary_user.push(draw(&mut rng, l));
            let l = random_link(&mut rng, ch, d);
            primary_bs.to_secondary_user.push(draw(&mut rng, l));
        }
        primary_bs.positions = primary_pos;

        let mut secondary_bs = BsLayer {
            ids: (0..secondary_pos.len() as u32).collect(),
            ..Default::default()
        };
        for (i, p) in secondary_pos.iter().enumerate() {
            let d = norm(*p);
            let l = hashed_link(&hasher, ch, i as u32, PROBE_ID, d);
            secondary_bs.to_primary_user.push(draw(&mut rng, l));
            let l = random_link(&mut rng, ch, d);
            secondary_bs.to_secondary_user.push(draw(&mut rng, l));
        }
        secondary_bs.positions = secondary_pos;

        if primary_bs.is_empty() || secondary_bs.is_empty() || (restricted && primary_users.is_empty()) {
            continue;
        }
        let mut r = Realization {
            index,
            attempt,
            primary_bs,
            secondary_bs,
            primary_user_ids: (0..primary_users.len() as u32).collect(),
            primary_users,
            secondary_users,
            homes: Vec::new(),
            homes_with_probe: Vec::new(),
            hasher,
        };
        associate_and_power(&mut r, scenario);
        return (r, attempt);
    }
    panic!("scenario produced {MAX_ATTEMPTS} consecutive empty realizations");
}

/// Bucket grid over the primary users for nearest-first search.
struct UserGrid {
    lo: f64,
    cell: f64,
    n: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl UserGrid {
    fn new(points: &[[f64; 2]], extent: f64, density: f64) -> Self {
        let target = (2.0 / density).sqrt();
        let n = ((2.0 * extent / target).ceil() as usize).clamp(1, 400);
        let cell = 2.0 * extent / n as f64;
        let lo = -extent;
        let mut counts = vec![0u32; n * n + 1];
        let key = |p: &[f64; 2]| -> usize {
            let ix = (((p[0] - lo) / cell) as isize).clamp(0, n as isize - 1) as usize;
            let iy = (((p[1] - lo) / cell) as isize).clamp(0, n as isize - 1) as usize;
            iy * n + ix
        };
        for p in points {
            counts[key(p) + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; points.len()];
        for (i, p) in points.iter().enumerate() {
            let k = key(p);
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        Self { lo, cell, n, starts: counts, items }
    }

    fn cell(&self, ix: usize, iy: usize) -> &[u32] {
        let k = iy * self.n + ix;
        &self.items[self.starts[k] as usize..self.starts[k + 1] as usize]
    }

    fn coord(&self, x: f64) -> isize {
        (((x - self.lo) / self.cell).floor() as isize).clamp(0, self.n as isize - 1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    user: HomeUser,
    tie_id: u64,
    distance: f64,
    link: LinkType,
    gain: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        if self.gain != other.gain {
            return self.gain > other.gain;
        }
        if self.distance != other.distance {
            return self.distance < other.distance;
        }
        self.tie_id < other.tie_id
    }
}

fn strongest_user(
    grid: &UserGrid,
    users: &[[f64; 2]],
    user_ids: &[u32],
    bs: [f64; 2],
    bs_id: u32,
    channel: &ChannelModel,
    hasher: &PairHasher,
) -> Option<Candidate> {
    let cx = grid.coord(bs[0]);
    let cy = grid.coord(bs[1]);
    let n = grid.n as isize;
    let mut best: Option<Candidate> = None;
    let mut k: isize = 0;
    loop {
        let (x0, x1, y0, y1) = (cx - k, cx + k, cy - k, cy + k);
        for iy in y0.max(0)..=y1.min(n - 1) {
            let edge_row = iy == y0 || iy == y1;
            let mut ix = x0.max(0);
            while ix <= x1.min(n - 1) {
                for &u in grid.cell(ix as usize, iy as usize) {
                    let p = users[u as usize];
                    let d = (p[0] - bs[0]).hypot(p[1] - bs[1]);
                    let id = user_ids[u as usize] as u64;
                    let link = hashed_link(hasher, channel, bs_id, id, d);
                    let c = Candidate { user: HomeUser::Point(u as usize), tie_id: id, distance: d, link, gain: channel.gain(link, d) };
                    if best.map_or(true, |b| c.beats(&b)) {
                        best = Some(c);
                    }
                }
                // interior rows only need the two edge columns
                if edge_row || ix == x1 {
                    ix += 1;
                } else {
                    ix = x1;
                }
            }
        }
        if x0 <= 0 && y0 <= 0 && x1 >= n - 1 && y1 >= n - 1 {
            return best;
        }
        // distance from the BS to the outside of the searched block
        let gap = [
            if x0 > 0 { bs[0] - (grid.lo + x0 as f64 * grid.cell) } else { f64::INFINITY },
            if x1 < n - 1 { grid.lo + (x1 + 1) as f64 * grid.cell - bs[0] } else { f64::INFINITY },
            if y0 > 0 { bs[1] - (grid.lo + y0 as f64 * grid.cell) } else { f64::INFINITY },
            if y1 < n - 1 { grid.lo + (y1 + 1) as f64 * grid.cell - bs[1] } else { f64::INFINITY },
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
        if let Some(b) = best {
            if channel.max_gain(gap) < b.gain {
                return best;
            }
        }
        k += 1;
    }
}

/// Fills the home users and transmit powers of restricted secondary BSs.
pub fn associate_and_power(r: &mut Realization, scenario: &Scenario) {
    r.homes.clear();
    r.homes_with_probe.clear();
    let xi = match scenario.secondary.power_rule {
        PowerRule::InterferenceCap { xi } => xi,
        PowerRule::Fixed { .. } => return,
    };
    let ch = &scenario.channel;
    let extent = scenario.window_radius + scenario.guard_radius;
    let grid = UserGrid::new(&r.primary_users, extent, scenario.primary.user_density);
    let home = |c: &Candidate| Home {
        user: c.user,
        distance: c.distance,
        link: c.link,
        power: xi * normalized_power(ch, c.distance, c.link),
    };
    for i in 0..r.secondary_bs.len() {
        let bs = r.secondary_bs.positions[i];
        let id = r.secondary_bs.ids[i];
        let ppp = strongest_user(&grid, &r.primary_users, &r.primary_user_ids, bs, id, ch, &r.hasher);
        let d0 = norm(bs);
        let link0 = r.secondary_bs.to_primary_user[i].link;
        let probe = Candidate { user: HomeUser::Probe, tie_id: 0, distance: d0, link: link0, gain: ch.gain(link0, d0) };
        let with_probe = match ppp {
            Some(c) if c.beats(&probe) => c,
            _ => probe,
        };
        r.homes_with_probe.push(home(&with_probe));
        match ppp {
            Some(c) => r.homes.push(home(&c)),
            // only reachable for hand-built realizations without users
            None => r.homes.push(Home { user: HomeUser::Probe, distance: f64::INFINITY, link: LinkType::Nlos, power: f64::INFINITY }),
        }
    }
}

/// SINR of the typical user of `which` at the origin; `+∞` when there is
/// neither noise nor interference.
pub fn typical_user_sinr(r: &Realization, scenario: &Scenario, which: Operator) -> f64 {
    let ch = &scenario.channel;
    let (own, other, own_cfg, other_cfg) = match which {
        Operator::Primary => (&r.primary_bs, &r.secondary_bs, &scenario.primary, &scenario.secondary),
        Operator::Secondary => (&r.secondary_bs, &r.primary_bs, &scenario.secondary, &scenario.primary),
    };
    let links = |layer: &'_ BsLayer| -> Vec<LinkDraw> {
        match which {
            Operator::Primary => layer.to_primary_user.clone(),
            Operator::Secondary => layer.to_secondary_user.clone(),
        }
    };
    let own_links = links(own);
    let other_links = links(other);
    let power = |net: Operator, i: usize| -> f64 {
        match scenario.tx_power(net) {
            Some(p) => p,
            None => r.secondary_power(scenario, i, which),
        }
    };
    let (own_net, other_net) = match which {
        Operator::Primary => (Operator::Primary, Operator::Secondary),
        Operator::Secondary => (Operator::Secondary, Operator::Primary),
    };

    let mut tagged: Option<(usize, f64, f64)> = None; // (index, average power, distance)
    let mut avg = Vec::with_capacity(own.len());
    for i in 0..own.len() {
        let d = norm(own.positions[i]);
        let a = power(own_net, i) * ch.gain(own_links[i].link, d);
        avg.push(a);
        let better = match tagged {
            None => true,
            Some((j, aj, dj)) => a > aj || (a == aj && (d < dj || (d == dj && own.ids[i] < own.ids[j]))),
        };
        if better {
            tagged = Some((i, a, d));
        }
    }
    let (t, a0, _) = tagged.expect("realization has at least one BS per network");
    let signal = own_cfg.antenna.main_gain * own_links[t].fading * a0;
    let mut interference = 0.0;
    for i in 0..own.len() {
        if i != t {
            interference += own_cfg.antenna.gain(own_links[i].angle) * own_links[i].fading * avg[i];
        }
    }
    for i in 0..other.len() {
        let d = norm(other.positions[i]);
        let l = &other_links[i];
        interference += other_cfg.antenna.gain(l.angle) * l.fading * power(other_net, i) * ch.gain(l.link, d);
    }
    let denom = own_cfg.noise_power + interference;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        signal / denom
    }
}

/// Raw SINR samples of both typical users.
#[derive(Debug, Clone, PartialEq)]
pub struct McSamples {
    pub primary: Vec<f64>,
    pub secondary: Vec<f64>,
    pub rejected: u64,
}

impl McSamples {
    pub fn get(&self, which: Operator) -> &[f64] {
        match which {
            Operator::Primary => &self.primary,
            Operator::Secondary => &self.secondary,
        }
    }
}

/// Runs all realizations of the scenario on the current rayon pool.
pub fn simulate(scenario: &Scenario) -> McSamples {
    let per: Vec<(f64, f64, u32)> = (0..scenario.n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let (r, rejected) = sample_realization(scenario, i);
            (
                typical_user_sinr(&r, scenario, Operator::Primary),
                typical_user_sinr(&r, scenario, Operator::Secondary),
                rejected,
            )
        })
        .collect();
    McSamples {
        primary: per.iter().map(|x| x.0).collect(),
        secondary: per.iter().map(|x| x.1).collect(),
        rejected: per.iter().map(|x| x.2 as u64).sum(),
    }
}

/// Home links of secondary BSs within `inner_radius` of the origin, from
/// successive realizations, until `count` are collected.
pub fn collect_home_links(scenario: &Scenario, count: usize, inner_radius: f64) -> Vec<Home> {
    let mut out = Vec::with_capacity(count);
    let mut next = 0u64;
    let batch = 64u64;
    while out.len() < count {
        let homes: Vec<Vec<Home>> = (next..next + batch)
            .into_par_iter()
            .map(|i| {
                let (r, _) = sample_realization(scenario, i);
                r.secondary_bs
                    .positions
                    .iter()
                    .zip(&r.homes)
                    .filter(|(p, _)| norm(**p) <= inner_radius)
                    .map(|(_, h)| *h)
                    .collect()
            })
            .collect();
        for h in homes.into_iter().flatten() {
            if out.len() < count {
                out.push(h);
            }
        }
        next += batch;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum Provenance {
    MonteCarlo { realizations: usize, seed: u64 },
    Analytic { rel_tol: f64 },
}

impl Provenance {
    pub fn label(&self) -> String {
        match self {
            Provenance::MonteCarlo { realizations, seed } => format!("mc(n={realizations},seed={seed})"),
            Provenance::Analytic { rel_tol } => format!("analytic(rtol={rel_tol:e})"),
        }
    }
}

/// `P[SINR > τ]` tabulated at ascending linear thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub operator: Operator,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    /// 95% normal-approximation half-widths; zero for analytic curves.
    pub ci_halfwidth: Vec<f64>,
    pub provenance: Provenance,
}

impl CoverageCurve {
    pub fn from_samples(operator: Operator, samples: &[f64], thresholds: &[f64], provenance: Provenance) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut values = Vec::with_capacity(thresholds.len());
        let mut ci = Vec::with_capacity(thresholds.len());
        for &tau in thresholds {
            let below = sorted.partition_point(|&x| x <= tau);
            let p = (sorted.len() - below) as f64 / n;
            values.push(p);
            ci.push(1.96 * (p * (1.0 - p) / n).sqrt());
        }
        Self { operator, thresholds: thresholds.to_vec(), values, ci_halfwidth: ci, provenance }
    }

    /// Coverage at `tau`, interpolated linearly in `ln τ`.
    pub fn interpolate(&self, tau: f64) -> Option<f64> {
        let th = &self.thresholds;
        if th.is_empty() || tau < th[0] || tau > th[th.len() - 1] {
            return None;
        }
        let i = th.partition_point(|&x| x < tau);
        if th[i] == tau {
            return Some(self.values[i]);
        }
        let (x0, x1) = (th[i - 1].ln(), th[i].ln());
        let w = (tau.ln() - x0) / (x1 - x0);
        Some(self.values[i - 1] + w * (self.values[i] - self.values[i - 1]))
    }

    pub fn is_valid(&self) -> bool {
        self.values.iter().all(|v| (0.0..=1.0).contains(v))
            && self.values.windows(2).all(|w| w[1] <= w[0])
            && self.ci_halfwidth.iter().all(|c| *c >= 0.0)
    }
}

/// Monte Carlo coverage curves of both operators.
pub fn empirical_coverage(scenario: &Scenario, thresholds: &[f64]) -> [CoverageCurve; 2] {
    let samples = simulate(scenario);
    let prov = Provenance::MonteCarlo { realizations: scenario.n_realizations, seed: scenario.seed };
    [
        CoverageCurve::from_samples(Operator::Primary, &samples.primary, thresholds, prov),
        CoverageCurve::from_samples(Operator::Secondary, &samples.secondary, thresholds, prov),
    ]
}

/// Sample median (the value exceeded by half of the samples).
pub fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
