//! 2.5D world model: extruded building footprints, node placements, the UE
//! evaluation grid and global radio parameters, plus the exact
//! line-of-sight / wall-crossing queries used by link evaluation.
//!
//! Scenario files are a single JSON document with top-level keys
//! `buildings`, `nodes`, `grid`, `radio`. Lengths are meters, powers dBm,
//! gains dB/dBi, angles degrees (azimuth 0° = +x, counterclockwise).
//! Unknown keys are rejected. Omitted optional fields take the documented
//! defaults and every applied default is recorded for the run manifest.

use serde::{Deserialize, Serialize};

use crate::nodes::{
    GnbSpec, IabSpec, NodeSpec, RepeaterSpec, ResourceSplit, RisSpec, SkinSpec,
    DEFAULT_GNB_ANTENNA_GAIN_DBI, DEFAULT_GNB_EIRP_DBM, DEFAULT_GNB_HEIGHT_M, DEFAULT_GNB_POWER_W,
    DEFAULT_IAB_EIRP_DBM, DEFAULT_IAB_POWER_W, DEFAULT_IAB_RX_GAIN_DBI,
    DEFAULT_REPEATER_E2E_GAIN_DB, DEFAULT_REPEATER_MARGIN_DB, DEFAULT_REPEATER_MAX_EIRP_DBM,
    DEFAULT_REPEATER_POWER_W, DEFAULT_RIS_BITS, DEFAULT_RIS_ELEMENT_POWER_MW, DEFAULT_RIS_SIDE_M,
    DEFAULT_SKIN_SIDE_M, DEFAULT_SKIN_TOLERANCE_DEG,
};
use crate::{Error, Result};

pub const DEFAULT_PENETRATION_LOSS_DB: f64 = 40.0;
pub const DEFAULT_GRID_SPACING_M: f64 = 2.0;
pub const DEFAULT_UE_HEIGHT_M: f64 = 1.5;
pub const DEFAULT_CARRIER_FREQUENCY_HZ: f64 = 28e9;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 400e6;
pub const DEFAULT_NOISE_FIGURE_DB: f64 = 7.0;
pub const DEFAULT_UE_ANTENNA_GAIN_DBI: f64 = 0.0;
pub const DEFAULT_COVERAGE_THRESHOLD_DBM: f64 = -65.0;

/// Coincident intersection parameters within this tolerance collapse to one
/// wall crossing (a segment passing exactly through a polygon vertex meets
/// two edges at the same point).
const CROSSING_DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (other.x - self.x, other.y - self.y, other.z - self.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// World azimuth of the horizontal direction from self toward other.
    pub fn azimuth_deg_to(&self, other: &Point3) -> f64 {
        (other.y - self.y).atan2(other.x - self.x).to_degrees()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Serialize for Point3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Ok(Point3 { x, y, z })
    }
}

/// Extruded polygon obstacle. The footprint is an ordered ring of ≥3 2D
/// vertices; each wall crossing of a link costs `penetration_loss_db`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Building {
    pub footprint: Vec<[f64; 2]>,
    pub height_m: f64,
    pub penetration_loss_db: f64,
}

impl Building {
    /// True when the 2D point lies strictly inside the footprint (boundary
    /// points, such as facade-mounted surfaces, do not count).
    pub fn contains_interior(&self, p: [f64; 2]) -> bool {
        !on_polygon_boundary(p, &self.footprint) && point_in_polygon(p, &self.footprint)
    }
}

/// Rectangular UE evaluation lattice. Points sit at
/// (origin.x + ix·spacing, origin.y + iy·spacing, ue_height).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UeGrid {
    pub origin: Point3,
    pub nx: usize,
    pub ny: usize,
    pub spacing_m: f64,
    pub ue_height_m: f64,
}

impl UeGrid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point for a flat index (row-major, x fastest).
    pub fn point(&self, index: usize) -> Point3 {
        let (ix, iy) = (index % self.nx, index / self.nx);
        Point3::new(
            self.origin.x + ix as f64 * self.spacing_m,
            self.origin.y + iy as f64 * self.spacing_m,
            self.ue_height_m,
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Point3> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadioParams {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub ue_antenna_gain_dbi: f64,
    pub coverage_threshold_dbm: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
            bandwidth_hz: DEFAULT_BANDWIDTH_HZ,
            noise_figure_db: DEFAULT_NOISE_FIGURE_DB,
            ue_antenna_gain_dbi: DEFAULT_UE_ANTENNA_GAIN_DBI,
            coverage_threshold_dbm: DEFAULT_COVERAGE_THRESHOLD_DBM,
        }
    }
}

/// A node spec bound to a position and an orientation azimuth. Orientation
/// is the outward normal for surfaces (RIS, skin); active nodes steer per
/// UE and ignore it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacedNode {
    pub name: String,
    pub position: Point3,
    pub orientation_deg: f64,
    #[serde(flatten)]
    pub spec: NodeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub buildings: Vec<Building>,
    pub nodes: Vec<PlacedNode>,
    pub grid: UeGrid,
    pub radio: RadioParams,
    /// Human-readable record of every default applied while parsing,
    /// echoed into run manifests.
    #[serde(skip)]
    pub applied_defaults: Vec<String>,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text)?;
        raw.resolve()
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn gnbs(&self) -> impl Iterator<Item = (&PlacedNode, &GnbSpec)> {
        self.nodes.iter().filter_map(|n| match &n.spec {
            NodeSpec::Gnb(g) => Some((n, g)),
            _ => None,
        })
    }
}

/// One broken invariant, named by entity and rule. Violations are data,
/// not faults: a scenario that parses always validates to a list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

/// Checks every type invariant; returns an empty list iff the scenario is
/// well formed.
pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity: String, rule: String| out.push(Violation { entity, rule });

    for (i, b) in scenario.buildings.iter().enumerate() {
        let entity = format!("buildings[{i}]");
        if b.footprint.len() < 3 {
            push(entity.clone(), "footprint needs at least 3 vertices".into());
        } else if b.footprint.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            push(entity.clone(), "footprint has non-finite coordinates".into());
        } else if let Some(rule) = polygon_simplicity_violation(&b.footprint) {
            push(entity.clone(), rule);
        }
        if !(b.height_m > 0.0) {
            push(entity.clone(), format!("height must be positive, got {}", b.height_m));
        }
        if !(b.penetration_loss_db >= 0.0) {
            push(
                entity,
                format!("penetration loss must be >= 0 dB, got {}", b.penetration_loss_db),
            );
        }
    }

    if scenario.gnbs().next().is_none() {
        push("nodes".into(), "no donor gNB".into());
    }

    for node in &scenario.nodes {
        let entity = format!("node '{}'", node.name);
        if !node.position.is_finite() || !node.orientation_deg.is_finite() {
            push(entity.clone(), "position/orientation must be finite".into());
            continue;
        }
        for (bi, b) in scenario.buildings.iter().enumerate() {
            if node.position.z < b.height_m && b.contains_interior(node.position.xy()) {
                push(entity.clone(), format!("node inside building (buildings[{bi}])"));
            }
        }
        match &node.spec {
            NodeSpec::Gnb(g) => {
                if g.eirp_dbm > 70.0 {
                    push(entity.clone(), format!("gNB EIRP must be <= 70 dBm, got {}", g.eirp_dbm));
                }
                if g.power_w > 800.0 {
                    push(entity.clone(), format!("gNB power must be <= 800 W, got {}", g.power_w));
                }
            }
            NodeSpec::Iab(iab) => {
                if iab.power_w > 350.0 {
                    push(
                        entity.clone(),
                        format!("IAB power must be <= 350 W, got {}", iab.power_w),
                    );
                }
                if let ResourceSplit::Fixed(a) = iab.resource_split {
                    if !(a > 0.0 && a < 1.0) {
                        push(entity.clone(), format!("resource split must lie in (0,1), got {a}"));
                    }
                }
            }
            NodeSpec::Repeater(rep) => {
                if rep.max_eirp_dbm >= 60.0 {
                    push(
                        entity.clone(),
                        format!("repeater EIRP must be < 60 dBm, got {}", rep.max_eirp_dbm),
                    );
                }
                if !(rep.stability_margin_db >= 0.0) {
                    push(
                        entity.clone(),
                        format!("stability margin must be >= 0 dB, got {}", rep.stability_margin_db),
                    );
                }
            }
            NodeSpec::Ris(ris) => {
                if !(1..=4).contains(&ris.bits) {
                    push(entity.clone(), format!("RIS bits must lie in 1..=4, got {}", ris.bits));
                }
                if !(ris.element_power_mw < 1.0) || !(ris.element_power_mw >= 0.0) {
                    push(
                        entity.clone(),
                        format!("RIS element power must lie in [0,1) mW, got {}", ris.element_power_mw),
                    );
                }
                match crate::nodes::ris_element_count(ris.side_m, scenario.radio.carrier_frequency_hz)
                {
                    Ok((_, total)) => {
                        let total_mw = total as f64 * ris.element_power_mw;
                        if total_mw >= 2000.0 {
                            push(
                                entity.clone(),
                                format!("RIS control power must stay < 2 W, got {total_mw} mW"),
                            );
                        }
                    }
                    Err(e) => push(entity.clone(), e.to_string()),
                }
            }
            NodeSpec::Skin(skin) => {
                if !(skin.side_m > 0.25) {
                    push(
                        entity.clone(),
                        format!("skin side must exceed 0.25 m, got {}", skin.side_m),
                    );
                }
                if !(skin.tolerance_deg >= 0.0) {
                    push(
                        entity.clone(),
                        format!("skin tolerance must be >= 0°, got {}", skin.tolerance_deg),
                    );
                }
            }
        }
    }

    let g = &scenario.grid;
    if g.is_empty() {
        push("grid".into(), "nx*ny must be >= 1".into());
    }
    if !(g.spacing_m > 0.0) {
        push("grid".into(), format!("spacing must be positive, got {}", g.spacing_m));
    }
    if !g.origin.is_finite() || !g.ue_height_m.is_finite() {
        push("grid".into(), "origin and UE height must be finite".into());
    }

    let r = &scenario.radio;
    if !(r.carrier_frequency_hz > 0.0) {
        push("radio".into(), format!("carrier frequency must be positive, got {}", r.carrier_frequency_hz));
    }
    if !(r.bandwidth_hz > 0.0) {
        push("radio".into(), format!("bandwidth must be positive, got {}", r.bandwidth_hz));
    }
    if !(r.noise_figure_db >= 0.0) {
        push("radio".into(), format!("noise figure must be >= 0 dB, got {}", r.noise_figure_db));
    }

    out
}

/// Counts wall crossings of the segment a→b against every building tall
/// enough at the crossing point, and sums their penetration losses.
///
/// The 2D projection of the segment is intersected with footprint edges on
/// closed parameter ranges, so grazing a vertex or running along an edge
/// counts (conservative blockage). Coincident crossing parameters collapse
/// to one crossing per building.
pub fn wall_crossings(a: Point3, b: Point3, buildings: &[Building]) -> (usize, f64) {
    let p = a.xy();
    let q = b.xy();
    let mut count = 0usize;
    let mut loss = 0.0f64;
    for building in buildings {
        let mut ts = segment_polygon_crossings(p, q, &building.footprint);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|x, y| (*x - *y).abs() <= CROSSING_DEDUP_TOL);
        let n = ts
            .iter()
            .filter(|&&t| building.height_m >= a.z + t * (b.z - a.z))
            .count();
        count += n;
        loss += n as f64 * building.penetration_loss_db;
    }
    (count, loss)
}

/// True iff the segment a→b crosses no wall.
pub fn is_los(a: Point3, b: Point3, buildings: &[Building]) -> bool {
    wall_crossings(a, b, buildings).0 == 0
}

/// Intersection parameters t along p→q where the segment meets polygon
/// edges, including endpoint touches; collinear overlap with an edge
/// contributes the overlap midpoint.
fn segment_polygon_crossings(p: [f64; 2], q: [f64; 2], poly: &[[f64; 2]]) -> Vec<f64> {
    let r = [q[0] - p[0], q[1] - p[1]];
    let mut ts = Vec::new();
    for (i, &u) in poly.iter().enumerate() {
        let v = poly[(i + 1) % poly.len()];
        let s = [v[0] - u[0], v[1] - u[1]];
        let denom = cross2(r, s);
        let pu = [u[0] - p[0], u[1] - p[1]];
        if denom != 0.0 {
            let t = cross2(pu, s) / denom;
            let w = cross2(pu, r) / denom;
            if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&w) {
                ts.push(t);
            }
        } else if cross2(pu, r) == 0.0 {
            // Collinear edge: project the edge onto the segment parameter and
            // record the overlap midpoint as a single crossing.
            let rr = r[0] * r[0] + r[1] * r[1];
            if rr == 0.0 {
                continue;
            }
            let t0 = (pu[0] * r[0] + pu[1] * r[1]) / rr;
            let t1 = ((v[0] - p[0]) * r[0] + (v[1] - p[1]) * r[1]) / rr;
            let (lo, hi) = (t0.min(t1).max(0.0), t0.max(t1).min(1.0));
            if lo <= hi {
                ts.push((lo + hi) / 2.0);
            }
        }
    }
    ts
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Even-odd ray-cast point-in-polygon test.
pub fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    for (i, &u) in poly.iter().enumerate() {
        let v = poly[(i + 1) % poly.len()];
        if (u[1] > p[1]) != (v[1] > p[1]) {
            let x_cross = u[0] + (p[1] - u[1]) / (v[1] - u[1]) * (v[0] - u[0]);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn on_polygon_boundary(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    const TOL: f64 = 1e-9;
    for (i, &u) in poly.iter().enumerate() {
        let v = poly[(i + 1) % poly.len()];
        let e = [v[0] - u[0], v[1] - u[1]];
        let w = [p[0] - u[0], p[1] - u[1]];
        let ee = e[0] * e[0] + e[1] * e[1];
        let t = if ee == 0.0 { 0.0 } else { ((w[0] * e[0] + w[1] * e[1]) / ee).clamp(0.0, 1.0) };
        let d = [w[0] - t * e[0], w[1] - t * e[1]];
        if (d[0] * d[0] + d[1] * d[1]).sqrt() <= TOL {
            return true;
        }
    }
    false
}

/// Simplicity check: no zero-length edges, no intersection between
/// non-adjacent edges (touching counts as an intersection).
fn polygon_simplicity_violation(poly: &[[f64; 2]]) -> Option<String> {
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a == b {
            return Some(format!("zero-length edge at vertex {i}"));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // Skip adjacent edge pairs (they share a vertex by construction).
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_touch(a, b, c, d) {
                return Some(format!("footprint self-intersects (edges {i} and {j})"));
            }
        }
    }
    None
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [d[0] - c[0], d[1] - c[1]];
    let ac = [c[0] - a[0], c[1] - a[1]];
    let denom = cross2(r, s);
    if denom != 0.0 {
        let t = cross2(ac, s) / denom;
        let w = cross2(ac, r) / denom;
        return (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&w);
    }
    if cross2(ac, r) != 0.0 {
        return false;
    }
    // Collinear: overlap iff 1D projections intersect.
    let rr = r[0] * r[0] + r[1] * r[1];
    if rr == 0.0 {
        return false;
    }
    let t0 = (ac[0] * r[0] + ac[1] * r[1]) / rr;
    let t1 = ((d[0] - a[0]) * r[0] + (d[1] - a[1]) * r[1]) / rr;
    t0.min(t1) <= 1.0 && t0.max(t1) >= 0.0
}

/// Wraps an angle difference into (−180°, 180°].
pub fn wrap_angle_deg(angle_deg: f64) -> f64 {
    let mut a = angle_deg % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Unsigned angular separation of two azimuths, in [0°, 180°].
pub fn angular_separation_deg(a_deg: f64, b_deg: f64) -> f64 {
    wrap_angle_deg(a_deg - b_deg).abs()
}

// ---------------------------------------------------------------------------
// JSON schema. Raw structs mirror the file exactly (deny_unknown_fields);
// `resolve` applies defaults, binds class-specific fields and records every
// default applied.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    buildings: Vec<RawBuilding>,
    nodes: Vec<RawNode>,
    grid: RawGrid,
    radio: RawRadio,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuilding {
    footprint: Vec<[f64; 2]>,
    height_m: f64,
    penetration_loss_db: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    /// [x, y]; a z component is accepted and ignored (UE height is
    /// `ue_height_m`).
    origin: Vec<f64>,
    nx: usize,
    ny: usize,
    spacing_m: Option<f64>,
    ue_height_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    carrier_frequency_hz: Option<f64>,
    bandwidth_hz: Option<f64>,
    noise_figure_db: Option<f64>,
    ue_antenna_gain_dbi: Option<f64>,
    coverage_threshold_dbm: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    kind: String,
    name: Option<String>,
    /// [x, y, z]; a gNB may give [x, y] and defaults to its 10 m mast.
    position: Vec<f64>,
    orientation_deg: Option<f64>,
    eirp_dbm: Option<f64>,
    antenna_gain_dbi: Option<f64>,
    power_w: Option<f64>,
    rx_gain_dbi: Option<f64>,
    resource_split: Option<RawResourceSplit>,
    e2e_gain_db: Option<f64>,
    max_eirp_dbm: Option<f64>,
    isolation_db: Option<f64>,
    stability_margin_db: Option<f64>,
    side_m: Option<f64>,
    bits: Option<u8>,
    element_power_mw: Option<f64>,
    incident_azimuth_deg: Option<f64>,
    departure_azimuth_deg: Option<f64>,
    tolerance_deg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawResourceSplit {
    Word(String),
    Fraction(f64),
}

impl RawScenario {
    fn resolve(self) -> Result<Scenario> {
        let mut defaults = Vec::new();

        let buildings = self
            .buildings
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                let penetration_loss_db = b.penetration_loss_db.unwrap_or_else(|| {
                    defaults.push(format!(
                        "buildings[{i}].penetration_loss_db = {DEFAULT_PENETRATION_LOSS_DB}"
                    ));
                    DEFAULT_PENETRATION_LOSS_DB
                });
                Building { footprint: b.footprint, height_m: b.height_m, penetration_loss_db }
            })
            .collect();

        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, raw) in self.nodes.into_iter().enumerate() {
            nodes.push(resolve_node(i, raw, &mut defaults)?);
        }

        let origin = match self.grid.origin.as_slice() {
            [x, y] => Point3::new(*x, *y, 0.0),
            [x, y, z] => Point3::new(*x, *y, *z),
            _ => {
                return Err(Error::Scenario(
                    "grid.origin must be [x, y] or [x, y, z]".into(),
                ))
            }
        };
        let grid = UeGrid {
            origin,
            nx: self.grid.nx,
            ny: self.grid.ny,
            spacing_m: self.grid.spacing_m.unwrap_or_else(|| {
                defaults.push(format!("grid.spacing_m = {DEFAULT_GRID_SPACING_M}"));
                DEFAULT_GRID_SPACING_M
            }),
            ue_height_m: self.grid.ue_height_m.unwrap_or_else(|| {
                defaults.push(format!("grid.ue_height_m = {DEFAULT_UE_HEIGHT_M}"));
                DEFAULT_UE_HEIGHT_M
            }),
        };

        let mut field = |name: &str, v: Option<f64>, d: f64| {
            v.unwrap_or_else(|| {
                defaults.push(format!("radio.{name} = {d}"));
                d
            })
        };
        let radio = RadioParams {
            carrier_frequency_hz: field(
                "carrier_frequency_hz",
                self.radio.carrier_frequency_hz,
                DEFAULT_CARRIER_FREQUENCY_HZ,
            ),
            bandwidth_hz: field("bandwidth_hz", self.radio.bandwidth_hz, DEFAULT_BANDWIDTH_HZ),
            noise_figure_db: field(
                "noise_figure_db",
                self.radio.noise_figure_db,
                DEFAULT_NOISE_FIGURE_DB,
            ),
            ue_antenna_gain_dbi: field(
                "ue_antenna_gain_dbi",
                self.radio.ue_antenna_gain_dbi,
                DEFAULT_UE_ANTENNA_GAIN_DBI,
            ),
            coverage_threshold_dbm: field(
                "coverage_threshold_dbm",
                self.radio.coverage_threshold_dbm,
                DEFAULT_COVERAGE_THRESHOLD_DBM,
            ),
        };

        Ok(Scenario { buildings, nodes, grid, radio, applied_defaults: defaults })
    }
}

fn resolve_node(i: usize, raw: RawNode, defaults: &mut Vec<String>) -> Result<PlacedNode> {
    let name = raw.name.clone().unwrap_or_else(|| format!("node{i}"));
    let label = format!("nodes[{i}] '{name}'");
    let err = |msg: String| Error::Scenario(format!("{label}: {msg}"));

    // Reject fields that do not belong to this kind so typos fail loudly.
    let class_fields: &[(&str, bool)] = &[
        ("antenna_gain_dbi", raw.antenna_gain_dbi.is_some()),
        ("power_w", raw.power_w.is_some()),
        ("eirp_dbm", raw.eirp_dbm.is_some()),
        ("rx_gain_dbi", raw.rx_gain_dbi.is_some()),
        ("resource_split", raw.resource_split.is_some()),
        ("e2e_gain_db", raw.e2e_gain_db.is_some()),
        ("max_eirp_dbm", raw.max_eirp_dbm.is_some()),
        ("isolation_db", raw.isolation_db.is_some()),
        ("stability_margin_db", raw.stability_margin_db.is_some()),
        ("side_m", raw.side_m.is_some()),
        ("bits", raw.bits.is_some()),
        ("element_power_mw", raw.element_power_mw.is_some()),
        ("incident_azimuth_deg", raw.incident_azimuth_deg.is_some()),
        ("departure_azimuth_deg", raw.departure_azimuth_deg.is_some()),
        ("tolerance_deg", raw.tolerance_deg.is_some()),
    ];
    let allowed: &[&str] = match raw.kind.as_str() {
        "gnb" => &["eirp_dbm", "antenna_gain_dbi", "power_w"],
        "iab" => &["eirp_dbm", "power_w", "rx_gain_dbi", "resource_split"],
        "repeater" => &[
            "e2e_gain_db",
            "max_eirp_dbm",
            "isolation_db",
            "stability_margin_db",
            "power_w",
        ],
        "ris" => &["side_m", "bits", "element_power_mw"],
        "skin" => &["side_m", "incident_azimuth_deg", "departure_azimuth_deg", "tolerance_deg"],
        other => {
            return Err(err(format!(
                "unknown kind '{other}' (expected gnb, iab, repeater, ris or skin)"
            )))
        }
    };
    for (field, set) in class_fields {
        if *set && !allowed.contains(field) {
            return Err(err(format!("field '{field}' is not valid for kind '{}'", raw.kind)));
        }
    }

    let position = match (raw.position.as_slice(), raw.kind.as_str()) {
        ([x, y, z], _) => Point3::new(*x, *y, *z),
        ([x, y], "gnb") => {
            defaults.push(format!("nodes[{i}].position.z = {DEFAULT_GNB_HEIGHT_M} (gNB mast)"));
            Point3::new(*x, *y, DEFAULT_GNB_HEIGHT_M)
        }
        ([_, _], _) => {
            return Err(err("position needs an explicit height [x, y, z]".into()));
        }
        _ => return Err(err("position must be [x, y, z]".into())),
    };

    fn field(
        defaults: &mut Vec<String>,
        i: usize,
        fname: &str,
        v: Option<f64>,
        d: f64,
    ) -> f64 {
        v.unwrap_or_else(|| {
            defaults.push(format!("nodes[{i}].{fname} = {d}"));
            d
        })
    }

    let spec = match raw.kind.as_str() {
        "gnb" => NodeSpec::Gnb(GnbSpec {
            eirp_dbm: field(defaults, i, "eirp_dbm", raw.eirp_dbm, DEFAULT_GNB_EIRP_DBM),
            antenna_gain_dbi: field(
                defaults,
                i,
                "antenna_gain_dbi",
                raw.antenna_gain_dbi,
                DEFAULT_GNB_ANTENNA_GAIN_DBI,
            ),
            power_w: field(defaults, i, "power_w", raw.power_w, DEFAULT_GNB_POWER_W),
        }),
        "iab" => {
            let resource_split = match raw.resource_split {
                None => {
                    defaults.push(format!("nodes[{i}].resource_split = optimal"));
                    ResourceSplit::Optimal
                }
                Some(RawResourceSplit::Word(w)) if w == "optimal" => ResourceSplit::Optimal,
                Some(RawResourceSplit::Word(w)) => {
                    return Err(err(format!(
                        "resource_split must be a fraction in (0,1) or \"optimal\", got \"{w}\""
                    )))
                }
                Some(RawResourceSplit::Fraction(a)) => ResourceSplit::Fixed(a),
            };
            NodeSpec::Iab(IabSpec {
                eirp_dbm: field(defaults, i, "eirp_dbm", raw.eirp_dbm, DEFAULT_IAB_EIRP_DBM),
                power_w: field(defaults, i, "power_w", raw.power_w, DEFAULT_IAB_POWER_W),
                rx_gain_dbi: field(defaults, i, "rx_gain_dbi", raw.rx_gain_dbi, DEFAULT_IAB_RX_GAIN_DBI),
                resource_split,
            })
        }
        "repeater" => NodeSpec::Repeater(RepeaterSpec {
            e2e_gain_db: field(defaults, i, "e2e_gain_db", raw.e2e_gain_db, DEFAULT_REPEATER_E2E_GAIN_DB),
            max_eirp_dbm: field(
                defaults,
                i,
                "max_eirp_dbm",
                raw.max_eirp_dbm,
                DEFAULT_REPEATER_MAX_EIRP_DBM,
            ),
            isolation_db: raw
                .isolation_db
                .ok_or_else(|| err("repeater requires isolation_db (no default)".into()))?,
            stability_margin_db: field(
                defaults,
                i,
                "stability_margin_db",
                raw.stability_margin_db,
                DEFAULT_REPEATER_MARGIN_DB,
            ),
            power_w: field(defaults, i, "power_w", raw.power_w, DEFAULT_REPEATER_POWER_W),
        }),
        "ris" => NodeSpec::Ris(RisSpec {
            side_m: field(defaults, i, "side_m", raw.side_m, DEFAULT_RIS_SIDE_M),
            bits: raw.bits.unwrap_or_else(|| {
                defaults.push(format!("nodes[{i}].bits = {DEFAULT_RIS_BITS}"));
                DEFAULT_RIS_BITS
            }),
            element_power_mw: field(
                defaults,
                i,
                "element_power_mw",
                raw.element_power_mw,
                DEFAULT_RIS_ELEMENT_POWER_MW,
            ),
        }),
        "skin" => NodeSpec::Skin(SkinSpec {
            side_m: field(defaults, i, "side_m", raw.side_m, DEFAULT_SKIN_SIDE_M),
            incident_azimuth_deg: raw
                .incident_azimuth_deg
                .ok_or_else(|| err("skin requires incident_azimuth_deg".into()))?,
            departure_azimuth_deg: raw
                .departure_azimuth_deg
                .ok_or_else(|| err("skin requires departure_azimuth_deg".into()))?,
            tolerance_deg: field(
                defaults,
                i,
                "tolerance_deg",
                raw.tolerance_deg,
                DEFAULT_SKIN_TOLERANCE_DEG,
            ),
        }),
        _ => unreachable!("kind checked above"),
    };

    let orientation_deg = raw.orientation_deg.unwrap_or_else(|| {
        if matches!(spec, NodeSpec::Ris(_) | NodeSpec::Skin(_)) {
            defaults.push(format!("nodes[{i}].orientation_deg = 0"));
        }
        0.0
    });

    Ok(PlacedNode { name, position, orientation_deg, spec })
}
