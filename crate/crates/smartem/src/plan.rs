//! Cost-minimizing node placement under a coverage constraint.
//!
//! Candidates are user-supplied mounting sites, each allowing a subset of
//! node classes and, for surfaces, a set of facing directions. The solver
//! is greedy (best coverage-gain per cost, one site per step) followed by a
//! first-improvement local search. Both are deterministic and report every
//! grid evaluation they spend, and a brute-force enumeration oracle is
//! provided for small fixtures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::nodes::{
    GnbSpec, IabSpec, NodeSpec, RepeaterSpec, ResourceSplit, RisSpec, SkinSpec,
    DEFAULT_GNB_ANTENNA_GAIN_DBI, DEFAULT_GNB_EIRP_DBM, DEFAULT_GNB_POWER_W, DEFAULT_IAB_EIRP_DBM,
    DEFAULT_IAB_POWER_W, DEFAULT_IAB_RX_GAIN_DBI, DEFAULT_REPEATER_E2E_GAIN_DB,
    DEFAULT_REPEATER_MARGIN_DB, DEFAULT_REPEATER_MAX_EIRP_DBM, DEFAULT_REPEATER_POWER_W,
    DEFAULT_RIS_BITS, DEFAULT_RIS_ELEMENT_POWER_MW, DEFAULT_RIS_SIDE_M, DEFAULT_SKIN_SIDE_M,
    DEFAULT_SKIN_TOLERANCE_DEG,
};
use crate::scenario::{is_los, PlacedNode, Point3, Scenario};
use crate::simulate::evaluate_grid;
use crate::{Error, Result};

/// Isolation assumed for planner-placed repeaters; sites with known worse
/// isolation should be modeled in the scenario directly.
pub const DEFAULT_PLAN_REPEATER_ISOLATION_DB: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    Gnb,
    Iab,
    Repeater,
    Ris,
    Skin,
}

/// Deterministic class visiting order, most to least expensive by default.
pub const CLASS_ORDER: [NodeClass; 5] =
    [NodeClass::Gnb, NodeClass::Iab, NodeClass::Repeater, NodeClass::Ris, NodeClass::Skin];

impl NodeClass {
    pub fn name(self) -> &'static str {
        match self {
            NodeClass::Gnb => "gnb",
            NodeClass::Iab => "iab",
            NodeClass::Repeater => "repeater",
            NodeClass::Ris => "ris",
            NodeClass::Skin => "skin",
        }
    }

    fn of(spec: &NodeSpec) -> NodeClass {
        match spec {
            NodeSpec::Gnb(_) => NodeClass::Gnb,
            NodeSpec::Iab(_) => NodeClass::Iab,
            NodeSpec::Repeater(_) => NodeClass::Repeater,
            NodeSpec::Ris(_) => NodeClass::Ris,
            NodeSpec::Skin(_) => NodeClass::Skin,
        }
    }
}

/// One mounting location the planner may use, at most once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateSite {
    pub position: Point3,
    pub classes: Vec<NodeClass>,
    /// Facing azimuths tried for surfaces (RIS normal, skin departure
    /// beam). Active classes ignore it.
    #[serde(default)]
    pub orientations: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateFile {
    sites: Vec<CandidateSite>,
}

pub fn candidates_from_json(text: &str) -> Result<Vec<CandidateSite>> {
    let file: CandidateFile = serde_json::from_str(text)?;
    if file.sites.is_empty() {
        return Err(Error::EmptyInput("candidate sites"));
    }
    Ok(file.sites)
}

/// Relative installation cost per node class plus an optional running-power
/// weight applied to active nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub gnb: f64,
    pub iab: f64,
    pub repeater: f64,
    pub ris: f64,
    pub skin: f64,
    #[serde(default)]
    pub power_weight_per_w: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self { gnb: 10.0, iab: 5.0, repeater: 2.0, ris: 1.0, skin: 0.3, power_weight_per_w: 0.0 }
    }
}

impl CostModel {
    pub fn class_cost(&self, class: NodeClass) -> f64 {
        match class {
            NodeClass::Gnb => self.gnb,
            NodeClass::Iab => self.iab,
            NodeClass::Repeater => self.repeater,
            NodeClass::Ris => self.ris,
            NodeClass::Skin => self.skin,
        }
    }

    pub fn node_cost(&self, node: &PlacedNode) -> f64 {
        let power_w = match &node.spec {
            NodeSpec::Gnb(s) => s.power_w,
            NodeSpec::Iab(s) => s.power_w,
            NodeSpec::Repeater(s) => s.power_w,
            // Surface power draw is milliwatt-scale; the class cost
            // dominates and the weight ignores it.
            NodeSpec::Ris(_) | NodeSpec::Skin(_) => 0.0,
        };
        self.class_cost(NodeClass::of(&node.spec)) + self.power_weight_per_w * power_w
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gnb cost", self.gnb),
            ("iab cost", self.iab),
            ("repeater cost", self.repeater),
            ("ris cost", self.ris),
            ("skin cost", self.skin),
        ] {
            if !(v > 0.0) {
                return Err(Error::NonPositive { name, value: v });
            }
        }
        if self.power_weight_per_w < 0.0 {
            return Err(Error::NonPositive {
                name: "power weight",
                value: self.power_weight_per_w,
            });
        }
        Ok(())
    }

    /// Costs are free parameters, but the expected complexity ordering is
    /// gnb > iab > repeater > ris > skin; breaches are reported, not fatal.
    pub fn ordering_warnings(&self) -> Vec<String> {
        let chain = [
            ("gnb", self.gnb),
            ("iab", self.iab),
            ("repeater", self.repeater),
            ("ris", self.ris),
            ("skin", self.skin),
        ];
        chain
            .windows(2)
            .filter(|w| w[0].1 <= w[1].1)
            .map(|w| format!("cost({}) = {} should exceed cost({}) = {}", w[0].0, w[0].1, w[1].0, w[1].1))
            .collect()
    }
}

/// One planner decision: a concrete node bound to its candidate site.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub site_index: usize,
    pub class: NodeClass,
    pub orientation_deg: f64,
    pub node: PlacedNode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSolution {
    pub selections: Vec<Selection>,
    pub total_cost: f64,
    pub coverage: f64,
    pub cell_edge_power_dbm: Option<f64>,
    /// Grid evaluations spent producing this solution.
    pub evaluation_count: usize,
    /// False when the coverage target was unreachable; the solution is
    /// then best-effort.
    pub feasible: bool,
}

fn default_node(
    class: NodeClass,
    name: String,
    position: Point3,
    orientation_deg: f64,
    incident_azimuth_deg: f64,
) -> PlacedNode {
    let spec = match class {
        NodeClass::Gnb => NodeSpec::Gnb(GnbSpec {
            eirp_dbm: DEFAULT_GNB_EIRP_DBM,
            antenna_gain_dbi: DEFAULT_GNB_ANTENNA_GAIN_DBI,
            power_w: DEFAULT_GNB_POWER_W,
        }),
        NodeClass::Iab => NodeSpec::Iab(IabSpec {
            eirp_dbm: DEFAULT_IAB_EIRP_DBM,
            power_w: DEFAULT_IAB_POWER_W,
            rx_gain_dbi: DEFAULT_IAB_RX_GAIN_DBI,
            resource_split: ResourceSplit::Optimal,
        }),
        NodeClass::Repeater => NodeSpec::Repeater(RepeaterSpec {
            e2e_gain_db: DEFAULT_REPEATER_E2E_GAIN_DB,
            max_eirp_dbm: DEFAULT_REPEATER_MAX_EIRP_DBM,
            isolation_db: DEFAULT_PLAN_REPEATER_ISOLATION_DB,
            stability_margin_db: DEFAULT_REPEATER_MARGIN_DB,
            power_w: DEFAULT_REPEATER_POWER_W,
        }),
        NodeClass::Ris => NodeSpec::Ris(RisSpec {
            side_m: DEFAULT_RIS_SIDE_M,
            bits: DEFAULT_RIS_BITS,
            element_power_mw: DEFAULT_RIS_ELEMENT_POWER_MW,
        }),
        NodeClass::Skin => NodeSpec::Skin(SkinSpec {
            side_m: DEFAULT_SKIN_SIDE_M,
            incident_azimuth_deg,
            departure_azimuth_deg: orientation_deg,
            tolerance_deg: DEFAULT_SKIN_TOLERANCE_DEG,
        }),
    };
    PlacedNode { name, position, orientation_deg, spec }
}

/// Nearest gNB with line of sight to the site, if any. Surfaces are only
/// worth planting where a donor can illuminate them.
fn nearest_los_gnb(scenario: &Scenario, position: Point3) -> Option<f64> {
    scenario
        .gnbs()
        .filter(|(gn, _)| is_los(gn.position, position, &scenario.buildings))
        .map(|(gn, _)| (position.distance(&gn.position), position.azimuth_deg_to(&gn.position)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, az)| az)
}

/// Expands one site into every concrete deployment the planner may try
/// there: one per active class, one per orientation for surfaces. RIS and
/// skin classes are dropped when no gNB sees the site.
fn expansions(scenario: &Scenario, site_index: usize, site: &CandidateSite) -> Vec<Selection> {
    let mut out = Vec::new();
    let donor_azimuth = nearest_los_gnb(scenario, site.position);
    for &class in &site.classes {
        let surface = matches!(class, NodeClass::Ris | NodeClass::Skin);
        if surface && donor_azimuth.is_none() {
            continue;
        }
        let orientations: &[f64] = if surface { &site.orientations } else { &[0.0] };
        for &orientation in orientations {
            let name = format!("plan{site_index}_{}", class.name());
            out.push(Selection {
                site_index,
                class,
                orientation_deg: orientation,
                node: default_node(
                    class,
                    name,
                    site.position,
                    orientation,
                    donor_azimuth.unwrap_or(0.0),
                ),
            });
        }
    }
    out
}

fn deployed(base: &Scenario, selections: &[Selection]) -> Scenario {
    let mut s = base.clone();
    s.nodes.extend(selections.iter().map(|sel| sel.node.clone()));
    s
}

fn total_cost(selections: &[Selection], cost_model: &CostModel) -> f64 {
    selections.iter().map(|s| cost_model.node_cost(&s.node)).sum()
}

fn finalize(
    base: &Scenario,
    selections: Vec<Selection>,
    cost_model: &CostModel,
    coverage_target: f64,
    evaluation_count: usize,
) -> Result<PlanSolution> {
    let report = evaluate_grid(&deployed(base, &selections))?;
    Ok(PlanSolution {
        total_cost: total_cost(&selections, cost_model),
        coverage: report.coverage_fraction,
        cell_edge_power_dbm: report.cell_edge_power_dbm().ok(),
        evaluation_count: evaluation_count + 1,
        feasible: report.coverage_fraction >= coverage_target,
        selections,
    })
}

fn check_target(coverage_target: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&coverage_target) {
        return Err(Error::Scenario(format!(
            "coverage target {coverage_target} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Adds the (site, class, orientation) with the best coverage gain per
/// cost until the target is met or nothing helps. Ties fall to the lower
/// cost, then the lower site index. Candidate evaluations within a step
/// run concurrently; the winner is reduced in a fixed order.
pub fn greedy_plan(
    scenario: &Scenario,
    candidates: &[CandidateSite],
    cost_model: &CostModel,
    coverage_target: f64,
) -> Result<PlanSolution> {
    cost_model.validate()?;
    check_target(coverage_target)?;
    let mut evals = 1usize;
    let mut coverage = evaluate_grid(scenario)?.coverage_fraction;
    let mut selections: Vec<Selection> = Vec::new();
    let mut current = scenario.clone();
    let mut used = vec![false; candidates.len()];

    while coverage < coverage_target {
        let options: Vec<(usize, Selection)> = candidates
            .iter()
            .enumerate()
            .filter(|(si, _)| !used[*si])
            .flat_map(|(si, site)| expansions(&current, si, site).into_iter().enumerate())
            .collect();
        let scored: Vec<(usize, Selection, f64)> = options
            .into_par_iter()
            .map(|(oi, sel)| {
                let mut trial = current.clone();
                trial.nodes.push(sel.node.clone());
                let cov = evaluate_grid(&trial)?.coverage_fraction;
                Ok((oi, sel, cov))
            })
            .collect::<Result<_>>()?;
        evals += scored.len();

        let mut best: Option<(f64, f64, usize, usize, Selection, f64)> = None;
        for (oi, sel, cov) in scored {
            let gain = cov - coverage;
            if gain <= 0.0 {
                continue;
            }
            let cost = cost_model.node_cost(&sel.node);
            let ratio = gain / cost;
            let key = (ratio, cost, sel.site_index, oi);
            let wins = match &best {
                None => true,
                Some(b) => {
                    key.0 > b.0
                        || (key.0 == b.0
                            && (key.1 < b.1
                                || (key.1 == b.1
                                    && (key.2 < b.2 || (key.2 == b.2 && key.3 < b.3)))))
                }
            };
            if wins {
                best = Some((ratio, cost, sel.site_index, oi, sel, cov));
            }
        }
        let Some((_, _, si, _, sel, cov)) = best else { break };
        used[si] = true;
        current.nodes.push(sel.node.clone());
        selections.push(sel);
        coverage = cov;
    }
    finalize(scenario, selections, cost_model, coverage_target, evals)
}

/// First-improvement descent over {drop a node, swap class at a site,
/// swap site within a class}. A move is taken iff it strictly cuts cost
/// and keeps the solution as good as required: the target when the input
/// was feasible, the input's own coverage otherwise.
pub fn local_search(
    scenario: &Scenario,
    initial: &PlanSolution,
    candidates: &[CandidateSite],
    cost_model: &CostModel,
    coverage_target: f64,
    max_moves: usize,
) -> Result<PlanSolution> {
    cost_model.validate()?;
    check_target(coverage_target)?;
    let required = if initial.feasible { coverage_target } else { initial.coverage };
    let mut selections = initial.selections.clone();
    let mut cost = total_cost(&selections, cost_model);
    let mut evals = initial.evaluation_count;
    let mut moves = 0usize;

    'outer: while moves < max_moves {
        let mut order: Vec<usize> = (0..selections.len()).collect();
        order.sort_by_key(|&i| selections[i].site_index);

        let mut attempts: Vec<Vec<Selection>> = Vec::new();
        // Drop one node.
        for &i in &order {
            let mut next = selections.clone();
            next.remove(i);
            attempts.push(next);
        }
        // Swap the class kept at a site.
        for &i in &order {
            let sel = &selections[i];
            let site = &candidates[sel.site_index];
            for class in CLASS_ORDER {
                if class == sel.class || !site.classes.contains(&class) {
                    continue;
                }
                let current = deployed_without(scenario, &selections, i);
                for cand in expansions(&current, sel.site_index, site) {
                    if cand.class != class {
                        continue;
                    }
                    let mut next = selections.clone();
                    next[i] = cand;
                    attempts.push(next);
                }
            }
        }
        // Move a node to an unused site that allows the same class.
        let used: Vec<usize> = selections.iter().map(|s| s.site_index).collect();
        for &i in &order {
            let sel = &selections[i];
            for (si, site) in candidates.iter().enumerate() {
                if used.contains(&si) || !site.classes.contains(&sel.class) {
                    continue;
                }
                let current = deployed_without(scenario, &selections, i);
                for cand in expansions(&current, si, site) {
                    if cand.class != sel.class {
                        continue;
                    }
                    let mut next = selections.clone();
                    next[i] = cand;
                    attempts.push(next);
                }
            }
        }

        for next in attempts {
            let next_cost = total_cost(&next, cost_model);
            if next_cost >= cost {
                continue;
            }
            let cov = evaluate_grid(&deployed(scenario, &next))?.coverage_fraction;
            evals += 1;
            if cov >= required {
                selections = next;
                cost = next_cost;
                moves += 1;
                continue 'outer;
            }
        }
        break;
    }
    finalize(scenario, selections, cost_model, coverage_target, evals)
}

fn deployed_without(base: &Scenario, selections: &[Selection], skip: usize) -> Scenario {
    let kept: Vec<Selection> = selections
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, s)| s.clone())
        .collect();
    deployed(base, &kept)
}

/// One greedy + local-search solution per target. Targets must arrive
/// ascending; the cost staircase is reported, not enforced.
pub fn pareto_sweep(
    scenario: &Scenario,
    candidates: &[CandidateSite],
    cost_model: &CostModel,
    coverage_targets: &[f64],
    local_moves: usize,
) -> Result<Vec<PlanSolution>> {
    if coverage_targets.is_empty() {
        return Err(Error::EmptyInput("coverage targets"));
    }
    if coverage_targets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Scenario("coverage targets must be sorted ascending".into()));
    }
    coverage_targets
        .iter()
        .map(|&t| {
            let greedy = greedy_plan(scenario, candidates, cost_model, t)?;
            local_search(scenario, &greedy, candidates, cost_model, t, local_moves)
        })
        .collect()
}

/// Exhaustive enumeration over per-site choices (leave empty or plant one
/// expansion). Minimum-cost feasible assignment wins; ties keep the
/// earliest in enumeration order. Intended as the optimality oracle for
/// small fixtures, and refuses search spaces past 100k assignments.
pub fn brute_force_plan(
    scenario: &Scenario,
    candidates: &[CandidateSite],
    cost_model: &CostModel,
    coverage_target: f64,
) -> Result<PlanSolution> {
    cost_model.validate()?;
    check_target(coverage_target)?;
    let per_site: Vec<Vec<Selection>> =
        candidates.iter().enumerate().map(|(si, site)| expansions(scenario, si, site)).collect();
    let mut space = 1usize;
    for opts in &per_site {
        space = space.saturating_mul(opts.len() + 1);
    }
    if space > 100_000 {
        return Err(Error::Scenario(format!(
            "brute force space {space} exceeds the 100000-assignment cap"
        )));
    }

    let mut evals = 0usize;
    let mut best: Option<(f64, Vec<Selection>)> = None;
    let mut counter = vec![0usize; per_site.len()];
    loop {
        let selections: Vec<Selection> = counter
            .iter()
            .zip(&per_site)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, opts)| opts[c - 1].clone())
            .collect();
        let cost = total_cost(&selections, cost_model);
        if best.as_ref().is_none_or(|(bc, _)| cost < *bc) {
            let cov = evaluate_grid(&deployed(scenario, &selections))?.coverage_fraction;
            evals += 1;
            if cov >= coverage_target {
                best = Some((cost, selections));
            }
        }
        // Mixed-radix increment; done when it wraps.
        let mut i = 0;
        loop {
            if i == counter.len() {
                let selections = best.map(|(_, s)| s).unwrap_or_default();
                return finalize(scenario, selections, cost_model, coverage_target, evals);
            }
            counter[i] += 1;
            if counter[i] <= per_site[i].len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}
