//! Command-line front end for the competing-risks toolkit.
//!
//! `rmtl analyze` ingests a CSV dataset (columns time, status, group) and
//! prints the full report: per-group restricted means with confidence
//! intervals and the eight-test inference battery, optionally mirrored to
//! JSON and to step-function plot data. `rmtl simulate` runs Monte Carlo
//! benchmark cells (or the whole grid) and prints TSV rejection tables.
//!
//! Exit codes: 0 success, 2 unusable input, 3 computational degeneracy.

mod dataset;
mod error;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rmtl::{run_monte_carlo, Scenario, ScenarioConfig, PermutationPlan};

use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "rmtl",
    version,
    about = "Competing-risks analysis via restricted mean time lost",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a two-group dataset: restricted means and all tests
    Analyze(AnalyzeArgs),
    /// Run Monte Carlo benchmark cells and print rejection-rate tables
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV dataset with header `time,status,group` (status 0/1/2, group 1/2)
    file: PathBuf,

    /// Restriction time; defaults to the earliest last event of interest
    /// across the two groups
    #[arg(long)]
    tau: Option<f64>,

    /// Test level; intervals are reported at level 1 - alpha
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Label permutations behind the combined tests
    #[arg(long, default_value_t = PermutationPlan::DEFAULT_COUNT)]
    perms: usize,

    /// Root seed for the permutation streams (echoed in the report)
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Also write the report as JSON to this path
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,

    /// Write per-group step functions (CIF of interest, complement of the
    /// competing CIF) into this directory for external plotting
    #[arg(long, value_name = "DIR")]
    figure_data: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file with `key = value` lines; explicit flags override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Benchmark design: A (null), B (proportional), C (early), D (late)
    #[arg(long)]
    scenario: Option<Scenario>,

    /// Group-1 sample size
    #[arg(long)]
    n1: Option<usize>,

    /// Group-2 sample size
    #[arg(long)]
    n2: Option<usize>,

    /// Target censoring rate (one of 0, 0.15, 0.30, 0.45, 0.60)
    #[arg(long)]
    censoring: Option<f64>,

    /// Monte Carlo replicates per cell
    #[arg(long)]
    reps: Option<usize>,

    /// Label permutations per replicate
    #[arg(long)]
    perms: Option<usize>,

    /// Nominal test level
    #[arg(long)]
    alpha: Option<f64>,

    /// Root seed; the whole run is reproducible from it
    #[arg(long)]
    seed: Option<u64>,

    /// Subdistribution-hazard coefficient (proportional design only)
    #[arg(long)]
    beta: Option<f64>,

    /// Also evaluate the composite and restricted-mean-survival tests
    #[arg(long)]
    rmst_tests: bool,

    /// Sweep the full benchmark grid (six size pairs by five censoring
    /// rates) instead of a single cell
    #[arg(long)]
    grid: bool,

    /// Directory for TSV and JSON report files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn run_analyze(args: &AnalyzeArgs) -> Result<()> {
    let sample = dataset::parse_dataset(&args.file)?;
    if !sample.has_both_groups() {
        return Err(CliError::input(
            "the dataset must contain both groups (group column values 1 and 2)",
        ));
    }
    let (tau, provenance) = report::resolve_tau(&sample, args.tau)?;
    let analysis =
        report::build_report(&sample, tau, provenance, args.alpha, args.perms, args.seed)?;

    print!("{}", report::render_text(&analysis));

    if let Some(path) = &args.json {
        let body = serde_json::to_string_pretty(&analysis)
            .map_err(|err| CliError::input(format!("cannot encode the report: {err}")))?;
        std::fs::write(path, body)
            .map_err(|err| CliError::input(format!("cannot write {}: {err}", path.display())))?;
    }
    if let Some(dir) = &args.figure_data {
        report::write_figure_data(&sample, dir)?;
    }
    Ok(())
}

fn build_simulation_config(args: &SimulateArgs) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::new(Scenario::A, 50, 50, 0.0, 1);
    if let Some(path) = &args.config {
        simulate::apply_config_file(&mut config, path)?;
    }
    if let Some(scenario) = args.scenario {
        config.scenario = scenario;
        config.beta = scenario.needs_beta().then(|| config.beta.unwrap_or(rmtl::DEFAULT_BETA));
    }
    if let Some(n1) = args.n1 {
        config.n1 = n1;
    }
    if let Some(n2) = args.n2 {
        config.n2 = n2;
    }
    if let Some(censoring) = args.censoring {
        config.target_censoring = censoring;
    }
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(perms) = args.perms {
        config.permutations = perms;
    }
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(beta) = args.beta {
        config.beta = Some(beta);
    }
    if args.rmst_tests {
        config.include_rmst_tests = true;
    }
    config.validate()?;
    Ok(config)
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let config = build_simulation_config(args)?;
    let stem_scenario = config.scenario.to_string();

    if args.grid {
        let reports = simulate::run_grid(&config)?;
        let tsv = simulate::render_grid_tsv(&reports)?;
        print!("{tsv}");
        for report in &reports {
            if let Some(warning) = &report.warning {
                eprintln!(
                    "warning: cell n1={} n2={} censoring={:.2}: {warning}",
                    report.config.n1, report.config.n2, report.config.target_censoring
                );
            }
        }
        if let Some(dir) = &args.out {
            simulate::write_outputs(dir, &format!("scenario_{stem_scenario}_grid"), &tsv, &reports)?;
        }
    } else {
        let report = run_monte_carlo(&config)?;
        let tsv = simulate::render_cell_tsv(&report);
        print!("{tsv}");
        if let Some(warning) = &report.warning {
            eprintln!("warning: {warning}");
        }
        if let Some(dir) = &args.out {
            simulate::write_outputs(
                dir,
                &format!("scenario_{stem_scenario}_cell"),
                &tsv,
                std::slice::from_ref(&report),
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
