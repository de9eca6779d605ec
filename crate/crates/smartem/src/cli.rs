//! Command-line front end: scenario checking, coverage maps, CDF and
//! envelope exports, outage sweeps, and placement planning.
//!
//! Every artifact-writing run drops a `manifest.json` next to its outputs
//! recording the resolved configuration, applied defaults, seed, and tool
//! version, with no timestamps, so identical inputs give byte-identical
//! output trees. Floats in CSVs are printed at 9 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::arrays::{scan_loss_envelope, ArraySpec, BitsAssignment};
use crate::plan::{
    candidates_from_json, greedy_plan, local_search, CandidateSite, CostModel, PlanSolution,
};
use crate::scenario::{validate, Scenario};
use crate::sig9;
use crate::simulate::{
    cdf, evaluate_grid, src_outage_probability, CoverageReport, RadiusLaw, SrcParams, SrcPaths,
    DEFAULT_OBSTACLE_DENSITY_PER_M2, DEFAULT_OBSTACLE_RADIUS_M, DEFAULT_SELF_BLOCKAGE_WIDTH_DEG,
};

#[derive(Parser)]
#[command(
    name = "smartem",
    version,
    about = "Urban mmWave coverage simulator and deployment planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario file and list every broken modeling rule.
    Validate(ValidateArgs),
    /// Evaluate the UE grid and export the per-point coverage map.
    Coverage(CoverageArgs),
    /// Export rx-power and capacity CDFs over outdoor grid points.
    Cdf(CoverageArgs),
    /// Choose node placements that meet a coverage target at least cost.
    Plan(PlanArgs),
    /// Two-path outage probability versus angular separation.
    Src(SrcArgs),
    /// Scan-loss envelopes for a phase-quantized linear array.
    Envelope(EnvelopeArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Optional output directory for violations.json and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverageArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Override the scenario's coverage threshold in dBm.
    #[arg(long, allow_negative_numbers = true)]
    threshold_dbm: Option<f64>,
    /// Override the scenario's bandwidth in Hz.
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    /// Recorded in the manifest; grid evaluation itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlanArgs {
    /// Scenario JSON file (the baseline deployment).
    #[arg(long)]
    scenario: PathBuf,
    /// Candidate-site JSON file.
    #[arg(long)]
    candidates: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Outdoor coverage fraction to reach.
    #[arg(long, default_value_t = 0.9)]
    coverage_target: f64,
    /// Cost-model JSON file; defaults are built in.
    #[arg(long)]
    costs: Option<PathBuf>,
    /// Local-search improvement budget after the greedy pass.
    #[arg(long, default_value_t = 32)]
    local_moves: usize,
    /// Override the scenario's coverage threshold in dBm.
    #[arg(long, allow_negative_numbers = true)]
    threshold_dbm: Option<f64>,
    /// Override the scenario's bandwidth in Hz.
    #[arg(long)]
    bandwidth_hz: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SrcArgs {
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Monte Carlo seed; trials are counter-split from it.
    #[arg(long)]
    seed: u64,
    /// Length of both links in meters.
    #[arg(long, default_value_t = 50.0)]
    length_m: f64,
    /// Angular separations to sweep, degrees.
    #[arg(long, value_delimiter = ',', default_value = "10,30,60,90,120,150,180")]
    separations_deg: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_OBSTACLE_DENSITY_PER_M2)]
    density_per_m2: f64,
    #[arg(long, default_value_t = DEFAULT_OBSTACLE_RADIUS_M)]
    radius_m: f64,
    #[arg(long, default_value_t = DEFAULT_SELF_BLOCKAGE_WIDTH_DEG)]
    self_blockage_deg: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u32,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    elements: usize,
    /// Element spacing in wavelengths.
    #[arg(long, default_value_t = 1.5)]
    spacing: f64,
    /// Curves to export: integers 1-4, `hybrid`, `continuous`. The
    /// continuous reference is always included.
    #[arg(long, value_delimiter = ',', default_value = "1,2,hybrid")]
    bits: Vec<String>,
    /// Scan range is +/- this angle at 1 degree steps.
    #[arg(long, default_value_t = 60.0)]
    max_angle_deg: f64,
}

pub fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Validate(a) => cmd_validate(a),
        Command::Coverage(a) => cmd_coverage(a),
        Command::Cdf(a) => cmd_cdf(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Src(a) => cmd_src(a),
        Command::Envelope(a) => cmd_envelope(a),
    }
}

/// `SMARTEM_THREADS` caps rayon's worker count; 0 or unset means auto.
fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SMARTEM_THREADS") {
        let n: usize =
            v.trim().parse().context("SMARTEM_THREADS must be an unsigned integer")?;
        if n > 0 {
            // A prior global pool (possible under test harnesses) is fine.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    Ok(())
}

fn load_scenario(
    path: &Path,
    threshold_dbm: Option<f64>,
    bandwidth_hz: Option<f64>,
) -> anyhow::Result<Scenario> {
    let mut scenario = Scenario::from_path(path)
        .with_context(|| format!("loading scenario {}", path.display()))?;
    let violations = validate(&scenario);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        bail!("{} scenario violation(s) in {}", violations.len(), path.display());
    }
    if let Some(t) = threshold_dbm {
        scenario.radio.coverage_threshold_dbm = t;
    }
    if let Some(b) = bandwidth_hz {
        if !(b > 0.0 && b.is_finite()) {
            bail!("bandwidth override must be positive, got {b}");
        }
        scenario.radio.bandwidth_hz = b;
    }
    Ok(scenario)
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_manifest(
    dir: &Path,
    command: &str,
    seed: Option<u64>,
    scenario: Option<(&Path, &Scenario)>,
    config: serde_json::Value,
    artifacts: &[&str],
) -> anyhow::Result<()> {
    let scenario_echo = match scenario {
        Some((path, s)) => json!({
            "path": path.to_string_lossy(),
            "resolved": serde_json::to_value(s)?,
            "applied_defaults": s.applied_defaults,
        }),
        None => serde_json::Value::Null,
    };
    let manifest = json!({
        "tool": "smartem",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "scenario": scenario_echo,
        "config": config,
        "artifacts": artifacts,
    });
    write_text(dir, "manifest.json", &format!("{:#}\n", manifest))
}

fn coverage_csv(scenario: &Scenario, report: &CoverageReport) -> String {
    let mut out = String::from("x_m,y_m,rx_power_dbm,capacity_bps,path_id\n");
    for r in &report.results {
        let p = scenario.grid.point(r.ue_index);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig9(p.x),
            sig9(p.y),
            sig9(r.rx_power_dbm),
            sig9(r.capacity_bps),
            r.path_id
        ));
    }
    out
}

fn summary_json(report: &CoverageReport) -> serde_json::Value {
    json!({
        "threshold_dbm": report.threshold_dbm,
        "coverage_fraction": report.coverage_fraction,
        "outdoor_points": report.outdoor_points,
        "grid_points": report.results.len(),
        "cell_edge_power_dbm": report.cell_edge_power_dbm().ok(),
        "percentiles": serde_json::to_value(&report.percentiles).unwrap(),
    })
}

fn cmd_validate(args: ValidateArgs) -> anyhow::Result<()> {
    let scenario = Scenario::from_path(&args.scenario)
        .with_context(|| format!("loading scenario {}", args.scenario.display()))?;
    let violations = validate(&scenario);
    for v in &violations {
        println!("violation: {v}");
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        write_text(dir, "violations.json", &format!("{:#}\n", serde_json::to_value(&violations)?))?;
        write_manifest(
            dir,
            "validate",
            None,
            Some((&args.scenario, &scenario)),
            json!({}),
            &["violations.json"],
        )?;
    }
    if violations.is_empty() {
        println!(
            "ok: {} building(s), {} node(s), {} grid points",
            scenario.buildings.len(),
            scenario.nodes.len(),
            scenario.grid.len()
        );
        Ok(())
    } else {
        bail!("{} scenario violation(s)", violations.len());
    }
}

fn cmd_coverage(args: CoverageArgs) -> anyhow::Result<()> {
    let scenario = load_scenario(&args.scenario, args.threshold_dbm, args.bandwidth_hz)?;
    let report = evaluate_grid(&scenario)?;
    fs::create_dir_all(&args.out)?;
    write_text(&args.out, "coverage.csv", &coverage_csv(&scenario, &report))?;
    write_text(&args.out, "summary.json", &format!("{:#}\n", summary_json(&report)))?;
    write_manifest(
        &args.out,
        "coverage",
        args.seed,
        Some((&args.scenario, &scenario)),
        json!({
            "threshold_dbm_override": args.threshold_dbm,
            "bandwidth_hz_override": args.bandwidth_hz,
        }),
        &["coverage.csv", "summary.json"],
    )?;
    println!(
        "coverage {:.4} ({} outdoor points, threshold {} dBm)",
        report.coverage_fraction, report.outdoor_points, report.threshold_dbm
    );
    Ok(())
}

fn cmd_cdf(args: CoverageArgs) -> anyhow::Result<()> {
    let scenario = load_scenario(&args.scenario, args.threshold_dbm, args.bandwidth_hz)?;
    let report = evaluate_grid(&scenario)?;
    let two_col = |steps: &[(f64, f64)], value_name: &str| {
        let mut out = format!("{value_name},p\n");
        for (v, p) in steps {
            out.push_str(&format!("{},{}\n", sig9(*v), sig9(*p)));
        }
        out
    };
    let power = cdf(&report.outdoor_rx_powers())?;
    let capacity = cdf(&report.outdoor_capacities())?;
    fs::create_dir_all(&args.out)?;
    write_text(&args.out, "power_cdf.csv", &two_col(&power, "rx_power_dbm"))?;
    write_text(&args.out, "capacity_cdf.csv", &two_col(&capacity, "capacity_bps"))?;
    write_manifest(
        &args.out,
        "cdf",
        args.seed,
        Some((&args.scenario, &scenario)),
        json!({
            "threshold_dbm_override": args.threshold_dbm,
            "bandwidth_hz_override": args.bandwidth_hz,
        }),
        &["power_cdf.csv", "capacity_cdf.csv"],
    )?;
    println!("cdf over {} outdoor points", report.outdoor_points);
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> anyhow::Result<()> {
    let scenario = load_scenario(&args.scenario, args.threshold_dbm, args.bandwidth_hz)?;
    let candidates_text = fs::read_to_string(&args.candidates)
        .with_context(|| format!("reading {}", args.candidates.display()))?;
    let candidates: Vec<CandidateSite> = candidates_from_json(&candidates_text)?;
    let cost_model = match &args.costs {
        Some(path) => serde_json::from_str(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )
        .context("parsing cost model")?,
        None => CostModel::default(),
    };
    for w in cost_model.ordering_warnings() {
        eprintln!("warning: {w}");
    }

    let greedy = greedy_plan(&scenario, &candidates, &cost_model, args.coverage_target)?;
    let solution = local_search(
        &scenario,
        &greedy,
        &candidates,
        &cost_model,
        args.coverage_target,
        args.local_moves,
    )?;

    let mut deployed = scenario.clone();
    deployed.nodes.extend(solution.selections.iter().map(|s| s.node.clone()));
    let report = evaluate_grid(&deployed)?;

    fs::create_dir_all(&args.out)?;
    write_text(&args.out, "plan.json", &format!("{:#}\n", serde_json::to_value(&solution)?))?;
    write_text(&args.out, "coverage.csv", &coverage_csv(&deployed, &report))?;
    write_text(&args.out, "summary.json", &format!("{:#}\n", summary_json(&report)))?;
    write_manifest(
        &args.out,
        "plan",
        args.seed,
        Some((&args.scenario, &scenario)),
        json!({
            "candidates": args.candidates.to_string_lossy(),
            "coverage_target": args.coverage_target,
            "cost_model": serde_json::to_value(cost_model)?,
            "local_moves": args.local_moves,
            "threshold_dbm_override": args.threshold_dbm,
            "bandwidth_hz_override": args.bandwidth_hz,
        }),
        &["plan.json", "coverage.csv", "summary.json"],
    )?;
    print_plan(&solution);
    if !solution.feasible {
        bail!(
            "plan infeasible: coverage {:.4} below target {:.4}",
            solution.coverage,
            args.coverage_target
        );
    }
    Ok(())
}

fn print_plan(solution: &PlanSolution) {
    for s in &solution.selections {
        println!(
            "site {}: {} at ({}, {}, {}) facing {} deg",
            s.site_index,
            s.class.name(),
            s.node.position.x,
            s.node.position.y,
            s.node.position.z,
            s.orientation_deg
        );
    }
    println!(
        "cost {} coverage {:.4} feasible {} ({} grid evaluations)",
        solution.total_cost, solution.coverage, solution.feasible, solution.evaluation_count
    );
}

fn cmd_src(args: SrcArgs) -> anyhow::Result<()> {
    if args.length_m <= 0.0 {
        bail!("length must be positive, got {}", args.length_m);
    }
    if args.separations_deg.is_empty() {
        bail!("at least one separation required");
    }
    let params = SrcParams {
        obstacle_density_per_m2: args.density_per_m2,
        radius_law: RadiusLaw::Fixed(args.radius_m),
        self_blockage_width_deg: args.self_blockage_deg,
        n_trials: args.trials,
    };
    let mut rows = String::from("separation_deg,outage,ci_low,ci_high,n_outage,n_trials\n");
    for &sep in &args.separations_deg {
        let rad = sep.to_radians();
        let paths = SrcPaths {
            ue: [0.0, 0.0],
            primary_end: [args.length_m, 0.0],
            reflected_end: [args.length_m * rad.cos(), args.length_m * rad.sin()],
        };
        let est = src_outage_probability(&paths, &params, args.seed)?;
        rows.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig9(sep),
            sig9(est.probability),
            sig9(est.ci_low),
            sig9(est.ci_high),
            est.n_outage,
            est.n_trials
        ));
    }
    fs::create_dir_all(&args.out)?;
    write_text(&args.out, "src_outage.csv", &rows)?;
    write_manifest(
        &args.out,
        "src",
        Some(args.seed),
        None,
        json!({
            "length_m": args.length_m,
            "separations_deg": args.separations_deg,
            "density_per_m2": args.density_per_m2,
            "radius_m": args.radius_m,
            "self_blockage_deg": args.self_blockage_deg,
            "trials": args.trials,
        }),
        &["src_outage.csv"],
    )?;
    println!("src outage table over {} separations", args.separations_deg.len());
    Ok(())
}

fn parse_bits_token(token: &str, n_elements: usize) -> anyhow::Result<(String, BitsAssignment)> {
    match token.trim() {
        "continuous" => Ok(("continuous".into(), BitsAssignment::Continuous)),
        "hybrid" => Ok(("hybrid".into(), BitsAssignment::hybrid(n_elements))),
        t => {
            let bits: u8 = t
                .parse()
                .with_context(|| format!("bits token '{t}' is not 1-4, 'hybrid', or 'continuous'"))?;
            if !(1..=4).contains(&bits) {
                bail!("bits token '{t}' outside 1..=4");
            }
            Ok((format!("bits{bits}"), BitsAssignment::uniform(bits, n_elements)))
        }
    }
}

fn cmd_envelope(args: EnvelopeArgs) -> anyhow::Result<()> {
    if !(0.0..=90.0).contains(&args.max_angle_deg) {
        bail!("max angle must lie in [0, 90], got {}", args.max_angle_deg);
    }
    let spec = ArraySpec::new(args.elements, args.spacing, 2.0)?;
    let angles_deg: Vec<f64> = {
        let lo = -args.max_angle_deg.round() as i64;
        let hi = args.max_angle_deg.round() as i64;
        (lo..=hi).map(|d| d as f64).collect()
    };
    let angles_rad: Vec<f64> = angles_deg.iter().map(|d| d.to_radians()).collect();

    let mut curves: Vec<(String, Vec<(f64, f64)>)> =
        vec![("continuous".into(), scan_loss_envelope(&spec, &BitsAssignment::Continuous, &angles_rad)?)];
    for token in &args.bits {
        let (name, assignment) = parse_bits_token(token, args.elements)?;
        if curves.iter().any(|(n, _)| *n == name) {
            continue;
        }
        curves.push((name, scan_loss_envelope(&spec, &assignment, &angles_rad)?));
    }

    let mut csv = String::from("angle_deg");
    for (name, _) in &curves {
        csv.push_str(&format!(",{name}_dbi"));
    }
    csv.push('\n');
    for (i, &deg) in angles_deg.iter().enumerate() {
        csv.push_str(&sig9(deg));
        for (_, values) in &curves {
            csv.push_str(&format!(",{}", sig9(values[i].1)));
        }
        csv.push('\n');
    }
    fs::create_dir_all(&args.out)?;
    write_text(&args.out, "envelope.csv", &csv)?;
    write_manifest(
        &args.out,
        "envelope",
        None,
        None,
        json!({
            "elements": args.elements,
            "spacing_wavelengths": args.spacing,
            "bits": args.bits,
            "max_angle_deg": args.max_angle_deg,
        }),
        &["envelope.csv"],
    )?;
    println!("envelope over {} angles, {} curves", angles_deg.len(), curves.len());
    Ok(())
}
