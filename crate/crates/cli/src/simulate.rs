//! Simulation runs: single benchmark cells and the full grid.
//!
//! A single cell prints a TSV table (method, rejection_rate, mc_stderr)
//! prefixed by `#` comment lines echoing the configuration, so the same
//! invocation is byte-identical run to run. The grid sweeps the benchmark
//! design space (six size pairs by five censoring rates) and prints one
//! row per cell with a column per method. `--out` additionally writes the
//! TSV next to a JSON dump of the full reports.

use std::fmt::Write as _;
use std::path::Path;

use rmtl::{run_monte_carlo, MonteCarloReport, ScenarioConfig, CENSORING_GRID};

use crate::error::{CliError, Result};

/// Size pairs of the benchmark grid, in table row order.
pub const GRID_SIZES: [(usize, usize); 6] =
    [(50, 50), (100, 100), (150, 150), (50, 100), (50, 150), (50, 200)];

/// Applies `key = value` lines from a config file onto a config. Flags
/// parsed later override anything set here.
pub fn apply_config_file(config: &mut ScenarioConfig, path: &Path) -> Result<()> {
    let body = std::fs::read_to_string(path)
        .map_err(|err| CliError::input(format!("cannot read {}: {err}", path.display())))?;
    for (index, line) in body.lines().enumerate() {
        let lineno = index + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::input(format!("expected `key = value` (line {lineno}): {line:?}"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_err =
            |what: &str| CliError::input(format!("invalid {what} {value:?} (line {lineno})"));
        match key {
            "scenario" => {
                config.scenario = value.parse().map_err(|_| parse_err("scenario"))?;
                // Keep the beta requirement consistent with the new design.
                config.beta = config
                    .scenario
                    .needs_beta()
                    .then(|| config.beta.unwrap_or(rmtl::DEFAULT_BETA));
            }
            "n1" => config.n1 = value.parse().map_err(|_| parse_err("n1"))?,
            "n2" => config.n2 = value.parse().map_err(|_| parse_err("n2"))?,
            "censoring" => {
                config.target_censoring = value.parse().map_err(|_| parse_err("censoring"))?
            }
            "p1" => config.p1 = value.parse().map_err(|_| parse_err("p1"))?,
            "beta" => config.beta = Some(value.parse().map_err(|_| parse_err("beta"))?),
            "reps" => config.replications = value.parse().map_err(|_| parse_err("reps"))?,
            "perms" => config.permutations = value.parse().map_err(|_| parse_err("perms"))?,
            "alpha" => config.alpha = value.parse().map_err(|_| parse_err("alpha"))?,
            "seed" => config.seed = value.parse().map_err(|_| parse_err("seed"))?,
            "rmst_tests" => {
                config.include_rmst_tests = value.parse().map_err(|_| parse_err("rmst_tests"))?
            }
            other => {
                return Err(CliError::input(format!(
                    "unknown config key {other:?} (line {lineno})"
                )))
            }
        }
    }
    Ok(())
}

fn mc_stderr(rate: f64, replications: usize) -> f64 {
    (rate * (1.0 - rate) / replications as f64).sqrt()
}

fn config_echo(out: &mut String, config: &ScenarioConfig) {
    let _ = writeln!(out, "# scenario\t{}", config.scenario);
    let _ = writeln!(out, "# n1\t{}", config.n1);
    let _ = writeln!(out, "# n2\t{}", config.n2);
    let _ = writeln!(out, "# censoring\t{:.2}", config.target_censoring);
    let _ = writeln!(out, "# p1\t{}", config.p1);
    if let Some(beta) = config.beta {
        let _ = writeln!(out, "# beta\t{beta}");
    }
    let _ = writeln!(out, "# replications\t{}", config.replications);
    let _ = writeln!(out, "# permutations\t{}", config.permutations);
    let _ = writeln!(out, "# alpha\t{}", config.alpha);
    let _ = writeln!(out, "# seed\t{}", config.seed);
}

/// TSV for a single cell: `#` config echo, then one row per method.
pub fn render_cell_tsv(report: &MonteCarloReport) -> String {
    let mut out = String::new();
    config_echo(&mut out, &report.config);
    let _ = writeln!(out, "# valid_replicates\t{}", report.valid_replicates);
    let _ = writeln!(out, "# regenerated\t{}", report.regenerated);
    if let Some(warning) = &report.warning {
        let _ = writeln!(out, "# warning\t{warning}");
    }
    let _ = writeln!(out, "method\trejection_rate\tmc_stderr");
    for method in report.config.methods() {
        let rate = report.rejection_rate[&method];
        let _ = writeln!(
            out,
            "{}\t{:.4}\t{:.4}",
            method.label(),
            rate,
            mc_stderr(rate, report.valid_replicates)
        );
    }
    out
}

/// TSV for a grid sweep: one row per cell, one column per method, in the
/// benchmark table layout (size pairs outer, censoring inner).
pub fn render_grid_tsv(reports: &[MonteCarloReport]) -> Result<String> {
    let first = reports
        .first()
        .ok_or_else(|| CliError::input("the grid produced no reports"))?;
    let methods = first.config.methods();
    let mut out = String::new();
    let _ = writeln!(out, "# scenario\t{}", first.config.scenario);
    let _ = writeln!(out, "# p1\t{}", first.config.p1);
    if let Some(beta) = first.config.beta {
        let _ = writeln!(out, "# beta\t{beta}");
    }
    let _ = writeln!(out, "# replications\t{}", first.config.replications);
    let _ = writeln!(out, "# permutations\t{}", first.config.permutations);
    let _ = writeln!(out, "# alpha\t{}", first.config.alpha);
    let _ = writeln!(out, "# seed\t{}", first.config.seed);
    let _ = write!(out, "n1\tn2\tcensoring");
    for method in &methods {
        let _ = write!(out, "\t{}", method.label());
    }
    out.push('\n');
    for report in reports {
        let _ = write!(
            out,
            "{}\t{}\t{:.2}",
            report.config.n1, report.config.n2, report.config.target_censoring
        );
        for method in &methods {
            let _ = write!(out, "\t{:.4}", report.rejection_rate[method]);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Runs every cell of the benchmark grid for the template's scenario and
/// test settings. The template's sizes and censoring are ignored; its
/// seed, level, replication and permutation counts apply to every cell.
pub fn run_grid(template: &ScenarioConfig) -> Result<Vec<MonteCarloReport>> {
    let mut reports = Vec::with_capacity(GRID_SIZES.len() * CENSORING_GRID.len());
    for &(n1, n2) in &GRID_SIZES {
        for &censoring in &CENSORING_GRID {
            let config = ScenarioConfig {
                n1,
                n2,
                target_censoring: censoring,
                ..template.clone()
            };
            reports.push(run_monte_carlo(&config)?);
        }
    }
    Ok(reports)
}

/// Writes the TSV and a JSON dump of the full reports into `dir`.
pub fn write_outputs(
    dir: &Path,
    stem: &str,
    tsv: &str,
    reports: &[MonteCarloReport],
) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|err| CliError::input(format!("cannot create {}: {err}", dir.display())))?;
    let tsv_path = dir.join(format!("{stem}.tsv"));
    std::fs::write(&tsv_path, tsv)
        .map_err(|err| CliError::input(format!("cannot write {}: {err}", tsv_path.display())))?;
    let json_path = dir.join(format!("{stem}.json"));
    let json = serde_json::to_string_pretty(reports)
        .map_err(|err| CliError::input(format!("cannot encode reports: {err}")))?;
    std::fs::write(&json_path, json)
        .map_err(|err| CliError::input(format!("cannot write {}: {err}", json_path.display())))?;
    Ok(())
}
