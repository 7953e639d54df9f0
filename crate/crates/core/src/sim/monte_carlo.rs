//! Monte Carlo driver for the benchmark designs.
//!
//! A run evaluates the full two-sample test battery on `replications`
//! independently generated datasets and reports per-method rejection
//! rates. Every replicate derives its generator stream from (seed,
//! replicate, attempt) and its permutation streams from (seed, replicate,
//! iteration), so reports are reproducible bit for bit under any thread
//! count; replicates execute in parallel.
//!
//! A replicate whose dataset leaves the restriction-time rule unsolvable
//! (some group without an event of interest) is regenerated from its next
//! attempt stream rather than dropped, keeping every cell at exactly
//! `replications` analyses. Regeneration is tracked: above 1% of
//! replicates it is reported as a warning, above 10% the run errors.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combined::combined_tests;
use crate::diff::{diff_star_test, rmst_diff_test, RmstVariant};
use crate::error::{Error, Result};
use crate::outcome::Method;
use crate::permutation::PermutationPlan;
use crate::sample::{select_tau, Group, Sample, Status, SurvRecord};
use crate::seeds::{domain, mix, stream_rng};
use crate::sim::censoring::calibrate_censoring_bound;
use crate::sim::scenario::{draw_event, Scenario};

/// Default subdistribution-hazard coefficient for the proportional design.
pub const DEFAULT_BETA: f64 = std::f64::consts::LN_2;

/// Target censoring rates the benchmark grid supports.
pub const CENSORING_GRID: [f64; 5] = [0.0, 0.15, 0.30, 0.45, 0.60];

/// Attempt budget per replicate before the run gives up.
pub(super) const MAX_ATTEMPTS: u64 = 1000;

/// One cell of the benchmark: design, sizes, censoring, and test settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Which benchmark design generates the data.
    pub scenario: Scenario,
    /// Group-1 sample size.
    pub n1: usize,
    /// Group-2 sample size.
    pub n2: usize,
    /// Target censored fraction; one of [`CENSORING_GRID`].
    pub target_censoring: f64,
    /// Maximum cumulative incidence of the event of interest.
    pub p1: f64,
    /// Subdistribution-hazard coefficient; required by (and only by) the
    /// proportional-hazards design.
    pub beta: Option<f64>,
    /// Number of Monte Carlo replicates.
    pub replications: usize,
    /// Label permutations per replicate for the combined tests.
    pub permutations: usize,
    /// Nominal test level.
    pub alpha: f64,
    /// Root seed; every stream in the run derives from it.
    pub seed: u64,
    /// Also run the composite-event and restricted-mean-survival
    /// difference tests in each replicate.
    pub include_rmst_tests: bool,
}

impl ScenarioConfig {
    /// A config with the benchmark defaults: p1 = 0.7, 5000 replications,
    /// 200 permutations, level 0.05, and the default coefficient when the
    /// design needs one.
    pub fn new(
        scenario: Scenario,
        n1: usize,
        n2: usize,
        target_censoring: f64,
        seed: u64,
    ) -> ScenarioConfig {
        ScenarioConfig {
            scenario,
            n1,
            n2,
            target_censoring,
            p1: 0.7,
            beta: scenario.needs_beta().then_some(DEFAULT_BETA),
            replications: 5000,
            permutations: PermutationPlan::DEFAULT_COUNT,
            alpha: 0.05,
            seed,
            include_rmst_tests: false,
        }
    }

    /// Checks every field against its stated domain.
    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidInput("group sizes must be positive".into()));
        }
        if !CENSORING_GRID.iter().any(|&c| (c - self.target_censoring).abs() < 1e-9) {
            return Err(Error::InvalidInput(format!(
                "target censoring must be one of {CENSORING_GRID:?}, got {}",
                self.target_censoring
            )));
        }
        if !(self.p1 > 0.0 && self.p1 < 1.0) {
            return Err(Error::InvalidInput(format!(
                "p1 must be in (0, 1), got {}",
                self.p1
            )));
        }
        match (self.scenario.needs_beta(), self.beta) {
            (true, None) => {
                return Err(Error::InvalidInput(
                    "the proportional-hazards design requires beta".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidInput(
                    "beta only applies to the proportional-hazards design".into(),
                ))
            }
            _ => {}
        }
        if self.replications == 0 {
            return Err(Error::InvalidInput("replications must be positive".into()));
        }
        if self.permutations == 0 {
            return Err(Error::InvalidInput("permutations must be positive".into()));
        }
        crate::diff::check_alpha(self.alpha)?;
        Ok(())
    }

    /// The methods a replicate evaluates, in report order.
    pub fn methods(&self) -> Vec<Method> {
        let mut methods = vec![
            Method::Gray,
            Method::Diff,
            Method::PComb,
            Method::FComb,
            Method::TComb,
        ];
        if self.include_rmst_tests {
            methods.extend([Method::DiffStar, Method::RmstInterest, Method::RmstComposite]);
        }
        methods
    }

    /// Per-group censoring bounds (infinite when censoring is off).
    fn censoring_bounds(&self) -> Result<[f64; 2]> {
        let beta = self.beta.unwrap_or(0.0);
        Ok([
            calibrate_censoring_bound(
                self.scenario,
                Group::One,
                self.p1,
                beta,
                self.target_censoring,
            )?,
            calibrate_censoring_bound(
                self.scenario,
                Group::Two,
                self.p1,
                beta,
                self.target_censoring,
            )?,
        ])
    }
}

/// Rejection rates and diagnostics from one benchmark cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    /// The cell that produced this report.
    pub config: ScenarioConfig,
    /// Per-method fraction of replicates with P <= alpha.
    pub rejection_rate: BTreeMap<Method, f64>,
    /// Replicates contributing to the rates (always `replications`).
    pub valid_replicates: usize,
    /// Replicates that needed at least one regeneration.
    pub regenerated: usize,
    /// Set when more than 1% of replicates were regenerated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// Per-method |rate - alpha|; populated for the null design only.
    pub mean_abs_deviation: BTreeMap<Method, f64>,
    /// Wall-clock duration of the run in seconds.
    pub wall_time_secs: f64,
}

/// Draws one complete dataset for the config through the supplied
/// generator, censoring with the calibrated per-group bounds.
pub fn simulate_dataset(config: &ScenarioConfig, rng: &mut impl Rng) -> Result<Sample> {
    config.validate()?;
    let bounds = config.censoring_bounds()?;
    Ok(generate_with_bounds(config, bounds, rng))
}

/// Dataset generation once the bounds are known; infallible by
/// construction (positive finite times, both groups populated).
pub(super) fn generate_with_bounds(
    config: &ScenarioConfig,
    bounds: [f64; 2],
    rng: &mut impl Rng,
) -> Sample {
    let q = config.beta.unwrap_or(0.0).exp();
    let mut records = Vec::with_capacity(config.n1 + config.n2);
    for (group, size) in [(Group::One, config.n1), (Group::Two, config.n2)] {
        let bound = bounds[group.index()];
        for _ in 0..size {
            let (event_time, event) = draw_event(config.scenario, group, config.p1, q, rng);
            let (time, status) = if bound.is_finite() {
                let c = bound * (1.0 - rng.random::<f64>());
                if event_time <= c {
                    (event_time, event)
                } else {
                    (c, Status::Censored)
                }
            } else {
                (event_time, event)
            };
            records.push(SurvRecord { time, status, group });
        }
    }
    Sample::new(records).expect("generated records satisfy the sample invariants")
}

struct ReplicateRow {
    rejected: Vec<bool>,
    attempts: u64,
}

fn run_replicate(
    config: &ScenarioConfig,
    bounds: [f64; 2],
    methods: &[Method],
    replicate: u64,
) -> Result<ReplicateRow> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream_rng(config.seed, &[domain::DATA, replicate, attempt]);
        let sample = generate_with_bounds(config, bounds, &mut rng);
        let Ok(tau) = select_tau(&sample) else {
            continue;
        };
        let plan = PermutationPlan::new(
            config.permutations,
            mix(config.seed, &[domain::PERM, replicate]),
        );
        let combined = combined_tests(&sample, tau, config.alpha, &plan)?;
        let mut rejected = Vec::with_capacity(methods.len());
        for &method in methods {
            let p = match method {
                Method::Gray => combined.gray.p_value,
                Method::Diff => combined.diff.p_value,
                Method::PComb => combined.pcomb.p_value,
                Method::FComb => combined.fcomb.p_value,
                Method::TComb => combined.tcomb.p_value,
                Method::DiffStar => diff_star_test(&sample, tau, config.alpha)?.p_value,
                Method::RmstInterest => {
                    rmst_diff_test(&sample, tau, config.alpha, RmstVariant::Interest)?.p_value
                }
                Method::RmstComposite => {
                    rmst_diff_test(&sample, tau, config.alpha, RmstVariant::Composite)?.p_value
                }
            };
            rejected.push(p <= config.alpha);
        }
        return Ok(ReplicateRow { rejected, attempts: attempt + 1 });
    }
    Err(Error::Simulation(format!(
        "replicate {replicate} produced no dataset with a defined restriction time in \
         {MAX_ATTEMPTS} attempts"
    )))
}

/// Runs the full benchmark cell and aggregates rejection rates.
///
/// Deterministic given the config (including its seed): replicates and
/// permutations use counter-derived streams and the aggregation is
/// order-independent, so thread count does not affect any reported number
/// except the wall time.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<MonteCarloReport> {
    config.validate()?;
    let start = Instant::now();
    let bounds = config.censoring_bounds()?;
    let methods = config.methods();
    let rows: Vec<ReplicateRow> = (0..config.replications as u64)
        .into_par_iter()
        .map(|replicate| run_replicate(config, bounds, &methods, replicate))
        .collect::<Result<_>>()?;

    let regenerated = rows.iter().filter(|r| r.attempts > 1).count();
    if regenerated * 10 > config.replications {
        return Err(Error::Simulation(format!(
            "{regenerated} of {} replicates needed regeneration; the design is too sparse \
             for the restriction-time rule",
            config.replications
        )));
    }
    let warning = (regenerated * 100 > config.replications).then(|| {
        format!(
            "{regenerated} of {} replicates were regenerated because the restriction-time \
             rule had no solution",
            config.replications
        )
    });

    let mut rejection_rate = BTreeMap::new();
    for (k, &method) in methods.iter().enumerate() {
        let hits = rows.iter().filter(|r| r.rejected[k]).count();
        rejection_rate.insert(method, hits as f64 / rows.len() as f64);
    }
    let mean_abs_deviation = if config.scenario == Scenario::A {
        rejection_rate.iter().map(|(&m, &r)| (m, (r - config.alpha).abs())).collect()
    } else {
        BTreeMap::new()
    };

    Ok(MonteCarloReport {
        config: config.clone(),
        rejection_rate,
        valid_replicates: rows.len(),
        regenerated,
        warning,
        mean_abs_deviation,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Mean absolute deviation of the rejection rate from the nominal level,
/// per method, across a collection of null-design cells.
pub fn summarize_deviation(reports: &[MonteCarloReport]) -> Result<BTreeMap<Method, f64>> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("no reports to summarize".into()));
    }
    if let Some(r) = reports.iter().find(|r| r.config.scenario != Scenario::A) {
        return Err(Error::InvalidInput(format!(
            "deviation from the nominal level is defined for the null design only, got \
             scenario {}",
            r.config.scenario
        )));
    }
    let mut sums: BTreeMap<Method, (f64, usize)> = BTreeMap::new();
    for report in reports {
        for (&method, &rate) in &report.rejection_rate {
            let entry = sums.entry(method).or_insert((0.0, 0));
            entry.0 += (rate - report.config.alpha).abs();
            entry.1 += 1;
        }
    }
    Ok(sums.into_iter().map(|(m, (total, n))| (m, total / n as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ScenarioConfig {
        let mut config = ScenarioConfig::new(Scenario::A, 30, 30, 0.0, 42);
        config.replications = 40;
        config.permutations = 30;
        config
    }

    #[test]
    fn config_defaults_and_validation() {
        let config = ScenarioConfig::new(Scenario::B, 50, 50, 0.30, 1);
        assert_eq!(config.p1, 0.7);
        assert_eq!(config.beta, Some(DEFAULT_BETA));
        assert_eq!(config.replications, 5000);
        assert_eq!(config.permutations, 200);
        assert_eq!(config.alpha, 0.05);
        config.validate().unwrap();

        let mut bad = config.clone();
        bad.beta = None;
        assert!(bad.validate().is_err());

        let mut bad = ScenarioConfig::new(Scenario::A, 50, 50, 0.30, 1);
        bad.beta = Some(0.5);
        assert!(bad.validate().is_err());

        let bad = ScenarioConfig::new(Scenario::A, 50, 50, 0.25, 1);
        assert!(bad.validate().is_err());

        let mut bad = ScenarioConfig::new(Scenario::A, 50, 50, 0.30, 1);
        bad.n2 = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dataset_has_exact_sizes_and_no_censoring_at_zero_target() {
        let config = ScenarioConfig::new(Scenario::A, 40, 25, 0.0, 9);
        let mut rng = stream_rng(9, &[domain::DATA, 0, 0]);
        let sample = simulate_dataset(&config, &mut rng).unwrap();
        assert_eq!(sample.len(), 65);
        assert_eq!(sample.group_size(Group::One), 40);
        assert_eq!(sample.group_size(Group::Two), 25);
        assert!(sample.statuses().iter().all(|&s| s != Status::Censored));
    }

    #[test]
    fn censored_fraction_tracks_the_target() {
        let config = ScenarioConfig::new(Scenario::A, 2000, 2000, 0.30, 5);
        let mut rng = stream_rng(5, &[domain::DATA, 0, 0]);
        let sample = simulate_dataset(&config, &mut rng).unwrap();
        let censored =
            sample.statuses().iter().filter(|&&s| s == Status::Censored).count();
        let rate = censored as f64 / sample.len() as f64;
        assert!((rate - 0.30).abs() < 0.03, "rate {rate}");
    }

    #[test]
    fn single_replicate_rates_are_zero_or_one() {
        let mut config = tiny_config();
        config.replications = 1;
        let report = run_monte_carlo(&config).unwrap();
        assert_eq!(report.valid_replicates, 1);
        for (&method, &rate) in &report.rejection_rate {
            assert!(rate == 0.0 || rate == 1.0, "{method:?} rate {rate}");
        }
    }

    #[test]
    fn report_is_deterministic_across_thread_counts() {
        let config = tiny_config();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_monte_carlo(&config).unwrap())
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.rejection_rate, b.rejection_rate);
        assert_eq!(a.regenerated, b.regenerated);
        assert_eq!(a.valid_replicates, b.valid_replicates);
    }

    #[test]
    fn null_design_populates_deviation_and_summary_averages_it() {
        let report = run_monte_carlo(&tiny_config()).unwrap();
        assert_eq!(report.mean_abs_deviation.len(), report.rejection_rate.len());
        let summary = summarize_deviation(std::slice::from_ref(&report)).unwrap();
        for (method, &dev) in &report.mean_abs_deviation {
            assert_eq!(summary[method], dev);
        }
    }

    #[test]
    fn deviation_summary_rejects_power_designs_and_empty_input() {
        assert!(summarize_deviation(&[]).is_err());
        let mut config = ScenarioConfig::new(Scenario::C, 20, 20, 0.0, 3);
        config.replications = 5;
        config.permutations = 20;
        let report = run_monte_carlo(&config).unwrap();
        assert!(summarize_deviation(std::slice::from_ref(&report)).is_err());
    }

    #[test]
    fn extra_tests_extend_the_method_set() {
        let mut config = tiny_config();
        config.replications = 10;
        config.include_rmst_tests = true;
        let report = run_monte_carlo(&config).unwrap();
        assert_eq!(report.rejection_rate.len(), 8);
        assert!(report.rejection_rate.contains_key(&Method::DiffStar));
        assert!(report.rejection_rate.contains_key(&Method::RmstComposite));
    }
}
