//! Scenario files in, CSV tables / JSON reports out.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! usage error.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sharing_market::config::{MarketConfig, Scenario, StrategyProfile};
use sharing_market::duopoly::{
    behavior_pattern, classify_structure, expected_profits, pricing_equilibrium,
    win_probability, PricingOutcome,
};
use sharing_market::maps::{
    default_population, eligible_map, population_grid, population_sample, structure_map,
    SweepAxis,
};
use sharing_market::oligopoly::{
    disclosure_count_ordering, equilibria_limited, equilibria_single, equilibria_unlimited,
};
use sharing_market::oracle::{reprice_n, verify_equilibrium, GridSpec};
use sharing_market::sim::{simulate, simulate_replication};

#[derive(Parser)]
#[command(name = "sharing-market", version, about = "Disclosure and pricing equilibria in sharing markets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Table of quality gaps, prices, win probabilities, profits, and the
    /// equilibrium pattern for a two-seller market.
    Duopoly(DuopolyArgs),
    /// Grid of quality-pair classifications.
    StructureMap(StructureMapArgs),
    /// Grid marking which (quality, cost) sellers can disclose at some
    /// equilibrium.
    EligibleMap(EligibleMapArgs),
    /// Equilibrium report for a capacity scenario.
    Equilibria(EquilibriaArgs),
    /// Monte Carlo market simulation.
    Simulate(SimulateArgs),
    /// Verify a strategy profile against the brute-force oracle.
    Verify(VerifyArgs),
    /// Discloser-count comparison across the three capacity scenarios.
    Ordering(OrderingArgs),
}

#[derive(Args)]
struct DuopolyArgs {
    #[arg(long)]
    config: PathBuf,
    /// Disclosure grid step for the table rows.
    #[arg(long, default_value_t = 0.25)]
    alpha_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StructureMapArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    q_min: f64,
    #[arg(long, default_value_t = 20.0)]
    q_max: f64,
    #[arg(long, default_value_t = 40)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EligibleMapArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    /// Per-seller capacity in the limited scenario.
    #[arg(long, default_value_t = 8)]
    omega: u32,
    #[arg(long, default_value_t = 1.0)]
    q_min: f64,
    #[arg(long, default_value_t = 20.0)]
    q_max: f64,
    #[arg(long, default_value_t = 77)]
    q_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    c_min: f64,
    #[arg(long, default_value_t = 10.0)]
    c_max: f64,
    #[arg(long, default_value_t = 37)]
    c_steps: usize,
    /// Draw the population at random instead of the deterministic grid.
    #[arg(long)]
    sample_population: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Population grid resolution (quality axis).
    #[arg(long, default_value_t = 20)]
    pop_q_steps: usize,
    /// Population grid resolution (cost axis).
    #[arg(long, default_value_t = 10)]
    pop_c_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquilibriaArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated disclosure levels, one per seller.
    #[arg(long)]
    alpha: String,
    /// Comma-separated prices, one per seller.
    #[arg(long)]
    prices: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    draws: u64,
    /// Per-replication CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON destination (stderr when omitted).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    alpha: String,
    /// Prices supporting the profile; derived from the pricing stage when
    /// omitted.
    #[arg(long)]
    prices: Option<String>,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
}

#[derive(Args)]
struct OrderingArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 8)]
    omega: u32,
    #[arg(long, default_value_t = 0.01)]
    grid_step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    match s {
        "unlimited" => Ok(Scenario::Unlimited),
        "single" => Ok(Scenario::Single),
        "limited" => Ok(Scenario::Limited),
        other => Err(format!("unknown scenario {other:?} (expected unlimited|single|limited)")),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect()
}

fn load_config(path: &Path) -> Result<MarketConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let cfg: MarketConfig = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse {}", path.display()))?;
    let warnings = cfg.validate().map_err(|e| anyhow::anyhow!("invalid config: {e}"))?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(io::stdout()),
    })
}

/// First line of every table: the resolved configuration, for provenance.
fn write_header(w: &mut dyn Write, command: &str, cfg: &MarketConfig, args: serde_json::Value) -> Result<()> {
    let header = serde_json::json!({ "command": command, "config": cfg, "args": args });
    writeln!(w, "# {header}")?;
    Ok(())
}

fn run() -> Result<i32> {
    match Cli::parse().cmd {
        Cmd::Duopoly(a) => cmd_duopoly(a),
        Cmd::StructureMap(a) => cmd_structure_map(a),
        Cmd::EligibleMap(a) => cmd_eligible_map(a),
        Cmd::Equilibria(a) => cmd_equilibria(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Ordering(a) => cmd_ordering(a),
    }
}

fn cmd_duopoly(a: DuopolyArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    if cfg.n_sellers() != 2 {
        bail!("the duopoly table needs exactly 2 sellers, got {}", cfg.n_sellers());
    }
    let q = [cfg.sellers[0].quality, cfg.sellers[1].quality];
    let c = [cfg.sellers[0].cost, cfg.sellers[1].cost];
    let grid = GridSpec::for_config(&cfg);
    let structure = classify_structure(q[0], q[1], &cfg).map_err(|e| anyhow::anyhow!("{e}"))?;
    let pattern =
        behavior_pattern(q, c, &cfg, &grid).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut out = open_out(&a.out)?;
    write_header(&mut out, "duopoly", &cfg, serde_json::json!({ "alpha_step": a.alpha_step }))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "alpha1", "alpha2", "quality_gap", "case", "p1", "p2", "pr1", "pr2", "profit1",
        "profit2", "pattern", "structure",
    ])?;
    let steps = (1.0 / a.alpha_step).round() as usize;
    for i in 0..=steps {
        for j in 0..=steps {
            let alpha = [i as f64 / steps as f64, j as f64 / steps as f64];
            let gap = sharing_market::duopoly::expected_quality_gap(
                alpha[0], alpha[1], q[0], q[1], cfg.q0,
            );
            let outcome =
                pricing_equilibrium(alpha, q, &cfg).map_err(|e| anyhow::anyhow!("{e}"))?;
            let profits =
                expected_profits(alpha, q, c, &cfg).map_err(|e| anyhow::anyhow!("{e}"))?;
            let (case, p, pr) = match outcome {
                PricingOutcome::Pure { prices, case } => {
                    let pr = win_probability(alpha, prices, q, &cfg);
                    (format!("{case:?}"), Some(prices), Some(pr))
                }
                PricingOutcome::ZeroZero => {
                    ("ZeroZero".to_string(), Some([0.0, 0.0]), Some(win_probability(alpha, [0.0, 0.0], q, &cfg)))
                }
                PricingOutcome::NoPureEquilibrium => ("NoPure".to_string(), None, None),
            };
            let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6}"));
            w.write_record([
                format!("{:.4}", alpha[0]),
                format!("{:.4}", alpha[1]),
                format!("{gap:.6}"),
                case,
                fmt(p.map(|x| x[0])),
                fmt(p.map(|x| x[1])),
                fmt(pr.map(|x| x[0])),
                fmt(pr.map(|x| x[1])),
                format!("{:.6}", profits[0]),
                format!("{:.6}", profits[1]),
                pattern.roman().to_string(),
                structure.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn cmd_structure_map(a: StructureMapArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let axis = SweepAxis::new(a.q_min, a.q_max, a.steps).map_err(|e| anyhow::anyhow!("{e}"))?;
    let cells = structure_map(&cfg, axis).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = open_out(&a.out)?;
    write_header(
        &mut out,
        "structure-map",
        &cfg,
        serde_json::json!({ "q_min": a.q_min, "q_max": a.q_max, "steps": a.steps }),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q1", "q2", "structure", "profile", "near_boundary"])?;
    for cell in cells {
        w.write_record([
            format!("{:.6}", cell.q1),
            format!("{:.6}", cell.q2),
            cell.structure.to_string(),
            cell.profile,
            cell.near_boundary.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_eligible_map(a: EligibleMapArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let population = match a.sample_population {
        Some(n) => population_sample(n, [a.q_min, a.q_max], [a.c_min, a.c_max], a.seed),
        None if (a.pop_q_steps, a.pop_c_steps) == (20, 10)
            && (a.q_min, a.q_max, a.c_min, a.c_max) == (1.0, 20.0, 1.0, 10.0) =>
        {
            default_population()
        }
        None => population_grid(
            SweepAxis::new(a.q_min, a.q_max, a.pop_q_steps).map_err(|e| anyhow::anyhow!("{e}"))?,
            SweepAxis::new(a.c_min, a.c_max, a.pop_c_steps).map_err(|e| anyhow::anyhow!("{e}"))?,
        ),
    };
    let q_axis = SweepAxis::new(a.q_min, a.q_max, a.q_steps).map_err(|e| anyhow::anyhow!("{e}"))?;
    let c_axis = SweepAxis::new(a.c_min, a.c_max, a.c_steps).map_err(|e| anyhow::anyhow!("{e}"))?;
    let map = eligible_map(&cfg, a.scenario, a.omega, &population, q_axis, c_axis)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    eprintln!(
        "scenario {}: displacement bound {:.6} over {} population sellers",
        a.scenario,
        map.displacement_bound,
        population.len()
    );
    let mut out = open_out(&a.out)?;
    write_header(
        &mut out,
        "eligible-map",
        &cfg,
        serde_json::json!({
            "scenario": a.scenario,
            "omega": a.omega,
            "population": population.len(),
            "sampled": a.sample_population.is_some(),
            "seed": a.seed,
            "displacement_bound": map.displacement_bound,
        }),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["q", "c", "eligible", "in_equilibrium"])?;
    for cell in map.cells {
        w.write_record([
            format!("{:.6}", cell.q),
            format!("{:.6}", cell.c),
            cell.eligible.to_string(),
            cell.in_equilibrium.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(0)
}

fn cmd_equilibria(a: EquilibriaArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let mut grid = GridSpec::for_config(&cfg);
    grid = GridSpec::with_steps(a.grid_step, grid.price_ceiling, grid.alpha_step);
    let report = match a.scenario {
        Scenario::Unlimited => equilibria_unlimited(&cfg, &grid),
        Scenario::Single => equilibria_single(&cfg, &grid),
        Scenario::Limited => equilibria_limited(&cfg, &grid),
        Scenario::Duopoly => bail!("use `duopoly` for the two-seller table"),
    }
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = open_out(&a.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(0)
}

fn cmd_simulate(a: SimulateArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let profile = StrategyProfile::new(parse_list(&a.alpha)?, parse_list(&a.prices)?);
    profile.validate(&cfg).map_err(|e| anyhow::anyhow!("invalid profile: {e}"))?;
    let summary =
        simulate(&cfg, &profile, a.seed, a.draws).map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut out = open_out(&a.out)?;
    write_header(
        &mut out,
        "simulate",
        &cfg,
        serde_json::json!({ "alpha": profile.alpha, "prices": profile.prices, "seed": a.seed, "draws": a.draws }),
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replication", "seller_id", "units_sold", "profit"])?;
    for rep in 0..a.draws {
        let r = simulate_replication(&cfg, &profile, a.seed, rep);
        for (i, s) in cfg.sellers.iter().enumerate() {
            w.write_record([
                rep.to_string(),
                s.id.to_string(),
                r.units[i].to_string(),
                format!("{:.6}", r.profit[i]),
            ])?;
        }
    }
    w.flush()?;
    let json = serde_json::to_string_pretty(&summary)?;
    match &a.summary {
        Some(p) => std::fs::write(p, json + "\n")?,
        None => eprintln!("{json}"),
    }
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let alpha = parse_list(&a.alpha)?;
    let grid = {
        let g = GridSpec::for_config(&cfg);
        GridSpec::with_steps(a.grid_step, g.price_ceiling, g.alpha_step)
    };
    let prices = match &a.prices {
        Some(s) => parse_list(s)?,
        None => {
            if cfg.n_sellers() == 2 && cfg.k == 1 {
                let q = [cfg.sellers[0].quality, cfg.sellers[1].quality];
                match sharing_market::duopoly::pricing_formulas(
                    [alpha[0], alpha[1]],
                    q,
                    &cfg,
                ) {
                    PricingOutcome::Pure { prices, .. } => prices.to_vec(),
                    PricingOutcome::ZeroZero => vec![0.0, 0.0],
                    PricingOutcome::NoPureEquilibrium => vec![0.0, 0.0],
                }
            } else {
                reprice_n(&alpha, &cfg, &grid)
                    .ok_or_else(|| anyhow::anyhow!("pricing did not settle; pass --prices"))?
            }
        }
    };
    let profile = StrategyProfile::new(alpha, prices);
    profile.validate(&cfg).map_err(|e| anyhow::anyhow!("invalid profile: {e}"))?;
    let verdict = verify_equilibrium(&profile, &cfg, &grid);
    println!("{}", serde_json::to_string_pretty(&verdict)?);
    Ok(if verdict.verified { 0 } else { 1 })
}

fn cmd_ordering(a: OrderingArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let grid = {
        let g = GridSpec::for_config(&cfg);
        GridSpec::with_steps(a.grid_step, g.price_ceiling, g.alpha_step)
    };
    let report =
        disclosure_count_ordering(&cfg, a.omega, &grid).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut out = open_out(&a.out)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(if report.ordered { 0 } else { 1 })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
