//! Grid-wide evaluation and stochastic blockage analysis.
//!
//! `evaluate_grid` enumerates every serving path each grid point could use
//! (direct, single relay, two-hop backhaul chains), keeps the strongest, and
//! aggregates coverage and percentile tables over outdoor points. The
//! Monte Carlo half models nomadic obstacles as random disks plus a
//! self-blockage sector at the UE and estimates outage for a two-path
//! connection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::em::{shannon_capacity_bps, snr_db, LinkBudgetTerms};
use crate::nodes::{iab_end_to_end_capacity, relay_path, NodeSpec, PathEval, RelayGeometry};
use crate::scenario::{angular_separation_deg, is_los, wall_crossings, Point3, Scenario};
use crate::{Error, Result};

/// Percentiles reported in coverage summaries and delta tables.
pub const PERCENTILES: [f64; 7] = [5.0, 10.0, 25.0, 50.0, 75.0, 90.0, 95.0];

pub const DEFAULT_OBSTACLE_DENSITY_PER_M2: f64 = 0.01;
pub const DEFAULT_OBSTACLE_RADIUS_M: f64 = 0.3;
pub const DEFAULT_SELF_BLOCKAGE_WIDTH_DEG: f64 = 60.0;

/// The chosen serving path for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkResult {
    pub ue_index: usize,
    /// `direct:<gnb>`, `via:<node>`, or `via:<iab>><iab>` for two-hop chains.
    pub path_id: String,
    pub rx_power_dbm: f64,
    pub snr_db: f64,
    pub capacity_bps: f64,
    /// Line-of-sight flag per segment, transmitter end first.
    pub segment_los: Vec<bool>,
    /// 3D segment lengths in meters, same order.
    pub segment_m: Vec<f64>,
}

/// One enumerated candidate before best-path selection.
#[derive(Debug, Clone)]
pub struct CandidatePath {
    pub path_id: String,
    pub eval: PathEval,
    pub segment_los: Vec<bool>,
    pub segment_m: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileRow {
    pub percent: f64,
    pub rx_power_dbm: f64,
    pub capacity_bps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub threshold_dbm: f64,
    /// Fraction of outdoor grid points at or above the threshold. Indoor
    /// points still get results and CSV rows but are excluded from every
    /// aggregate; a grid with no outdoor points reports 1.0 vacuously.
    pub coverage_fraction: f64,
    pub outdoor_points: usize,
    pub results: Vec<LinkResult>,
    /// Per grid point, true when the point is not inside any building.
    pub outdoor: Vec<bool>,
    /// Outdoor rx-power and capacity percentiles at [`PERCENTILES`].
    pub percentiles: Vec<PercentileRow>,
}

impl CoverageReport {
    pub fn outdoor_rx_powers(&self) -> Vec<f64> {
        self.results
            .iter()
            .zip(&self.outdoor)
            .filter(|(_, out)| **out)
            .map(|(r, _)| r.rx_power_dbm)
            .collect()
    }

    pub fn outdoor_capacities(&self) -> Vec<f64> {
        self.results
            .iter()
            .zip(&self.outdoor)
            .filter(|(_, out)| **out)
            .map(|(r, _)| r.capacity_bps)
            .collect()
    }

    /// Bottom-decile outdoor rx power, the cell-edge figure of merit.
    pub fn cell_edge_power_dbm(&self) -> Result<f64> {
        let mut v = self.outdoor_rx_powers();
        v.sort_by(f64::total_cmp);
        percentile(&v, 10.0)
    }
}

/// Enumerates every serving path for one UE position: a direct link from
/// each gNB, each gNB through each relay node, and each gNB through every
/// ordered pair of distinct backhaul (IAB) nodes. Passive surfaces drop out
/// via `relay_path` when the geometry is outside their service region.
pub fn enumerate_paths(scenario: &Scenario, ue: Point3) -> Result<Vec<CandidatePath>> {
    let radio = &scenario.radio;
    let buildings = &scenario.buildings;
    let mut out = Vec::new();

    for (gnode, gnb) in scenario.gnbs() {
        let d = gnode.position.distance(&ue);
        let (_, pen) = wall_crossings(gnode.position, ue, buildings);
        let terms = LinkBudgetTerms::new(
            gnb.eirp_dbm,
            crate::em::fspl_db(d, radio.carrier_frequency_hz)?,
            0.0,
            pen,
            radio.ue_antenna_gain_dbi,
        );
        out.push(CandidatePath {
            path_id: format!("direct:{}", gnode.name),
            eval: PathEval {
                terms,
                snr_db: snr_db(terms.rx_power_dbm, radio.bandwidth_hz, radio.noise_figure_db)?,
                capacity_bps: shannon_capacity_bps(
                    terms.rx_power_dbm,
                    radio.bandwidth_hz,
                    radio.noise_figure_db,
                )?,
            },
            segment_los: vec![is_los(gnode.position, ue, buildings)],
            segment_m: vec![d],
        });
    }

    for node in &scenario.nodes {
        if matches!(node.spec, NodeSpec::Gnb(_)) {
            continue;
        }
        for (gnode, gnb) in scenario.gnbs() {
            let (_, pen1) = wall_crossings(gnode.position, node.position, buildings);
            let (_, pen2) = wall_crossings(node.position, ue, buildings);
            let geo = RelayGeometry {
                d1_m: gnode.position.distance(&node.position),
                d2_m: node.position.distance(&ue),
                penetration1_db: pen1,
                penetration2_db: pen2,
                theta_i_deg: angular_separation_deg(
                    node.orientation_deg,
                    node.position.azimuth_deg_to(&gnode.position),
                ),
                theta_o_deg: angular_separation_deg(
                    node.orientation_deg,
                    node.position.azimuth_deg_to(&ue),
                ),
                incident_azimuth_deg: node.position.azimuth_deg_to(&gnode.position),
                departure_azimuth_deg: node.position.azimuth_deg_to(&ue),
            };
            if let Some(eval) = relay_path(gnb, node, &geo, radio)? {
                out.push(CandidatePath {
                    path_id: format!("via:{}", node.name),
                    eval,
                    segment_los: vec![
                        is_los(gnode.position, node.position, buildings),
                        is_los(node.position, ue, buildings),
                    ],
                    segment_m: vec![geo.d1_m, geo.d2_m],
                });
            }
        }
    }

    // Two-hop regenerative chains: gNB -> IAB a -> IAB b -> UE. Passive
    // surfaces cannot extend backhaul, so only IAB pairs qualify.
    let iabs: Vec<_> = scenario
        .nodes
        .iter()
        .filter_map(|n| match &n.spec {
            NodeSpec::Iab(s) => Some((n, s)),
            _ => None,
        })
        .collect();
    for (an, a) in &iabs {
        for (bn, b) in &iabs {
            if std::ptr::eq(*an, *bn) {
                continue;
            }
            for (gnode, gnb) in scenario.gnbs() {
                let seg = |from: Point3, to: Point3, eirp: f64, rx_gain: f64| -> Result<f64> {
                    let (_, pen) = wall_crossings(from, to, buildings);
                    let t = LinkBudgetTerms::new(
                        eirp,
                        crate::em::fspl_db(from.distance(&to), radio.carrier_frequency_hz)?,
                        0.0,
                        pen,
                        rx_gain,
                    );
                    Ok(t.rx_power_dbm)
                };
                let rx1 = seg(gnode.position, an.position, gnb.eirp_dbm, a.rx_gain_dbi)?;
                let rx2 = seg(an.position, bn.position, a.eirp_dbm, b.rx_gain_dbi)?;
                let (_, pen3) = wall_crossings(bn.position, ue, buildings);
                let access = LinkBudgetTerms::new(
                    b.eirp_dbm,
                    crate::em::fspl_db(bn.position.distance(&ue), radio.carrier_frequency_hz)?,
                    0.0,
                    pen3,
                    radio.ue_antenna_gain_dbi,
                );
                let cap = |rx: f64| {
                    shannon_capacity_bps(rx, radio.bandwidth_hz, radio.noise_figure_db)
                };
                let c1 = cap(rx1)?;
                let c2 = cap(rx2)?;
                let c3 = cap(access.rx_power_dbm)?;
                // Nested half-duplex splits: b shares its airtime between the
                // middle hop and the UE, then a shares between the donor hop
                // and everything downstream.
                let tail = iab_end_to_end_capacity(c2, c3, b.resource_split);
                let capacity = iab_end_to_end_capacity(c1, tail, a.resource_split);
                out.push(CandidatePath {
                    path_id: format!("via:{}>{}", an.name, bn.name),
                    eval: PathEval {
                        terms: access,
                        snr_db: snr_db(
                            access.rx_power_dbm,
                            radio.bandwidth_hz,
                            radio.noise_figure_db,
                        )?,
                        capacity_bps: capacity,
                    },
                    segment_los: vec![
                        is_los(gnode.position, an.position, buildings),
                        is_los(an.position, bn.position, buildings),
                        is_los(bn.position, ue, buildings),
                    ],
                    segment_m: vec![
                        gnode.position.distance(&an.position),
                        an.position.distance(&bn.position),
                        bn.position.distance(&ue),
                    ],
                });
            }
        }
    }

    Ok(out)
}

/// First candidate with maximal rx power; enumeration order breaks ties.
pub fn select_best(candidates: &[CandidatePath]) -> Result<&CandidatePath> {
    let mut best = candidates.first().ok_or(Error::EmptyInput("no serving paths"))?;
    for c in &candidates[1..] {
        if c.eval.terms.rx_power_dbm > best.eval.terms.rx_power_dbm {
            best = c;
        }
    }
    Ok(best)
}

fn is_outdoor(scenario: &Scenario, p: Point3) -> bool {
    !scenario
        .buildings
        .iter()
        .any(|b| p.z < b.height_m && b.contains_interior(p.xy()))
}

/// Evaluates every grid point independently and aggregates outdoor
/// coverage. Deterministic: the grid order is fixed and parallel workers
/// only fill disjoint slots.
pub fn evaluate_grid(scenario: &Scenario) -> Result<CoverageReport> {
    let results: Vec<LinkResult> = (0..scenario.grid.len())
        .into_par_iter()
        .map(|i| {
            let ue = scenario.grid.point(i);
            let candidates = enumerate_paths(scenario, ue)?;
            let best = select_best(&candidates)?;
            Ok(LinkResult {
                ue_index: i,
                path_id: best.path_id.clone(),
                rx_power_dbm: best.eval.terms.rx_power_dbm,
                snr_db: best.eval.snr_db,
                capacity_bps: best.eval.capacity_bps,
                segment_los: best.segment_los.clone(),
                segment_m: best.segment_m.clone(),
            })
        })
        .collect::<Result<_>>()?;

    let outdoor: Vec<bool> =
        (0..scenario.grid.len()).map(|i| is_outdoor(scenario, scenario.grid.point(i))).collect();

    let threshold = scenario.radio.coverage_threshold_dbm;
    let outdoor_points = outdoor.iter().filter(|o| **o).count();
    let covered = results
        .iter()
        .zip(&outdoor)
        .filter(|(r, out)| **out && r.rx_power_dbm >= threshold)
        .count();
    let coverage_fraction =
        if outdoor_points == 0 { 1.0 } else { covered as f64 / outdoor_points as f64 };

    let mut rx: Vec<f64> = results
        .iter()
        .zip(&outdoor)
        .filter(|(_, out)| **out)
        .map(|(r, _)| r.rx_power_dbm)
        .collect();
    let mut cap: Vec<f64> = results
        .iter()
        .zip(&outdoor)
        .filter(|(_, out)| **out)
        .map(|(r, _)| r.capacity_bps)
        .collect();
    rx.sort_by(f64::total_cmp);
    cap.sort_by(f64::total_cmp);
    let percentiles = if rx.is_empty() {
        Vec::new()
    } else {
        PERCENTILES
            .iter()
            .map(|&p| {
                Ok(PercentileRow {
                    percent: p,
                    rx_power_dbm: percentile(&rx, p)?,
                    capacity_bps: percentile(&cap, p)?,
                })
            })
            .collect::<Result<_>>()?
    };

    Ok(CoverageReport {
        threshold_dbm: threshold,
        coverage_fraction,
        outdoor_points,
        results,
        outdoor,
        percentiles,
    })
}

/// Linear-interpolation percentile of an ascending-sorted sample.
pub fn percentile(sorted: &[f64], percent: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput("percentile of empty sample"));
    }
    let p = (percent / 100.0).clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64))
}

/// Empirical CDF: ascending distinct values with P(X <= v). Ties collapse
/// into one step of the combined height.
pub fn cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("cdf"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = p,
            _ => out.push((*v, p)),
        }
    }
    Ok(out)
}

/// Before/after comparison of two reports over the same grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    /// Coverage-fraction gain, after minus before.
    pub coverage_delta: f64,
    /// Bottom-decile rx power gain in dB.
    pub cell_edge_delta_db: f64,
    pub median_rx_delta_db: f64,
    pub median_capacity_ratio: f64,
    /// (percent, after - before) over outdoor rx power.
    pub rx_percentile_deltas_db: Vec<(f64, f64)>,
    /// (percent, after / before) over outdoor capacity.
    pub capacity_percentile_ratios: Vec<(f64, f64)>,
}

pub fn delta_report(before: &CoverageReport, after: &CoverageReport) -> Result<DeltaReport> {
    if before.results.len() != after.results.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} grid points",
            before.results.len(),
            after.results.len()
        )));
    }
    if before.outdoor != after.outdoor {
        return Err(Error::GridMismatch("outdoor masks differ".into()));
    }
    let sorted = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v
    };
    let rx_b = sorted(before.outdoor_rx_powers());
    let rx_a = sorted(after.outdoor_rx_powers());
    let cap_b = sorted(before.outdoor_capacities());
    let cap_a = sorted(after.outdoor_capacities());
    let mut rx_deltas = Vec::new();
    let mut cap_ratios = Vec::new();
    for &p in &PERCENTILES {
        rx_deltas.push((p, percentile(&rx_a, p)? - percentile(&rx_b, p)?));
        cap_ratios.push((p, percentile(&cap_a, p)? / percentile(&cap_b, p)?));
    }
    Ok(DeltaReport {
        coverage_delta: after.coverage_fraction - before.coverage_fraction,
        cell_edge_delta_db: percentile(&rx_a, 10.0)? - percentile(&rx_b, 10.0)?,
        median_rx_delta_db: percentile(&rx_a, 50.0)? - percentile(&rx_b, 50.0)?,
        median_capacity_ratio: percentile(&cap_a, 50.0)? / percentile(&cap_b, 50.0)?,
        rx_percentile_deltas_db: rx_deltas,
        capacity_percentile_ratios: cap_ratios,
    })
}

/// Obstacle radius distribution for the blockage Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RadiusLaw {
    Fixed(f64),
    Uniform { min_m: f64, max_m: f64 },
}

impl RadiusLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            RadiusLaw::Fixed(r) if r > 0.0 => Ok(()),
            RadiusLaw::Fixed(r) => Err(Error::NonPositive { name: "obstacle radius", value: r }),
            RadiusLaw::Uniform { min_m, max_m } if min_m > 0.0 && max_m >= min_m => Ok(()),
            RadiusLaw::Uniform { min_m, .. } => {
                Err(Error::NonPositive { name: "obstacle radius range", value: min_m })
            }
        }
    }

    fn max_m(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform { max_m, .. } => max_m,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform { min_m, max_m } => rng.random_range(min_m..=max_m),
        }
    }
}

/// Two links sharing the UE endpoint, in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SrcPaths {
    pub ue: [f64; 2],
    pub primary_end: [f64; 2],
    pub reflected_end: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SrcParams {
    pub obstacle_density_per_m2: f64,
    pub radius_law: RadiusLaw,
    /// Angular width of the sector the user's own body shades, uniformly
    /// oriented per trial. Zero disables self-blockage.
    pub self_blockage_width_deg: f64,
    pub n_trials: u32,
}

impl Default for SrcParams {
    fn default() -> Self {
        Self {
            obstacle_density_per_m2: DEFAULT_OBSTACLE_DENSITY_PER_M2,
            radius_law: RadiusLaw::Fixed(DEFAULT_OBSTACLE_RADIUS_M),
            self_blockage_width_deg: DEFAULT_SELF_BLOCKAGE_WIDTH_DEG,
            n_trials: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub probability: f64,
    /// 95% Wilson score interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_trials: u32,
    pub n_outage: u32,
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u32, trials: u32) -> (f64, f64) {
    let z = 1.959963984540054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((centre - half) / denom).max(0.0), ((centre + half) / denom).min(1.0))
}

// Knuth's product method, chunked so exp(-mean) never underflows.
fn sample_poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    let mut remaining = mean;
    let mut total = 0u64;
    while remaining > 0.0 {
        let chunk = remaining.min(500.0);
        remaining -= chunk;
        let limit = (-chunk).exp();
        let mut product: f64 = rng.random();
        while product > limit {
            total += 1;
            product *= rng.random::<f64>();
        }
    }
    total
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) };
    let c = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt()
}

fn azimuth_deg(from: [f64; 2], to: [f64; 2]) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0]).to_degrees()
}

fn in_sector(azimuth_deg: f64, start_deg: f64, width_deg: f64) -> bool {
    (azimuth_deg - start_deg).rem_euclid(360.0) < width_deg
}

/// Estimates the probability that random obstacles plus self-blockage take
/// down both links in the same trial. Obstacles are a homogeneous Poisson
/// disk field over the paths' bounding box inflated by the largest radius;
/// each trial draws its own field and sector orientation from a
/// counter-seeded stream, so the estimate is independent of execution
/// order.
pub fn src_outage_probability(
    paths: &SrcPaths,
    params: &SrcParams,
    seed: u64,
) -> Result<OutageEstimate> {
    if params.n_trials == 0 {
        return Err(Error::NonPositive { name: "n_trials", value: 0.0 });
    }
    if params.obstacle_density_per_m2 < 0.0 {
        return Err(Error::NonPositive {
            name: "obstacle density",
            value: params.obstacle_density_per_m2,
        });
    }
    if !(0.0..=360.0).contains(&params.self_blockage_width_deg) {
        return Err(Error::AngleOutOfRange(format!(
            "self-blockage width {} outside [0, 360]",
            params.self_blockage_width_deg
        )));
    }
    params.radius_law.validate()?;

    let r_max = params.radius_law.max_m();
    let pts = [paths.ue, paths.primary_end, paths.reflected_end];
    let lo = [
        pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - r_max,
        pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min) - r_max,
    ];
    let hi = [
        pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) + r_max,
        pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) + r_max,
    ];
    let area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let mean = params.obstacle_density_per_m2 * area;
    let az_primary = azimuth_deg(paths.ue, paths.primary_end);
    let az_reflected = azimuth_deg(paths.ue, paths.reflected_end);

    let n_outage: u32 = (0..params.n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let sector_start = rng.random_range(0.0..360.0);
            let n = sample_poisson(&mut rng, mean);
            let disks: Vec<([f64; 2], f64)> = (0..n)
                .map(|_| {
                    let x = lo[0] + rng.random::<f64>() * (hi[0] - lo[0]);
                    let y = lo[1] + rng.random::<f64>() * (hi[1] - lo[1]);
                    let r = params.radius_law.sample(&mut rng);
                    ([x, y], r)
                })
                .collect();
            let blocked = |end: [f64; 2], az: f64| {
                if params.self_blockage_width_deg > 0.0
                    && in_sector(az, sector_start, params.self_blockage_width_deg)
                {
                    return true;
                }
                disks.iter().any(|(c, r)| point_segment_distance(*c, paths.ue, end) <= *r)
            };
            u32::from(
                blocked(paths.primary_end, az_primary) && blocked(paths.reflected_end, az_reflected),
            )
        })
        .sum();

    let (ci_low, ci_high) = wilson_interval(n_outage, params.n_trials);
    Ok(OutageEstimate {
        probability: n_outage as f64 / params.n_trials as f64,
        ci_low,
        ci_high,
        n_trials: params.n_trials,
        n_outage,
    })
}

/// Single-link blockage probability over a sweep of path lengths, same
/// obstacle field model. Output is sorted by length.
pub fn link_length_sensitivity(
    lengths_m: &[f64],
    params: &SrcParams,
    seed: u64,
) -> Result<Vec<(f64, OutageEstimate)>> {
    if lengths_m.is_empty() {
        return Err(Error::EmptyInput("length sweep"));
    }
    let mut lengths = lengths_m.to_vec();
    lengths.sort_by(f64::total_cmp);
    lengths
        .iter()
        .map(|&len| {
            if len <= 0.0 {
                return Err(Error::NonPositive { name: "path length", value: len });
            }
            // Degenerate two-path geometry: both links coincide, so "both
            // blocked" reduces to single-link blockage.
            let paths = SrcPaths { ue: [0.0, 0.0], primary_end: [len, 0.0], reflected_end: [len, 0.0] };
            Ok((len, src_outage_probability(&paths, params, seed)?))
        })
        .collect()
}
