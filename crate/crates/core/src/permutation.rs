//! Seeded label-permutation engine.
//!
//! The combined tests calibrate their null distributions by permuting group
//! labels, which preserves both group sizes and the pooled set of
//! (time, status) pairs. Each of the B iterations draws its labels from its
//! own counter-derived generator, so the resampled matrix depends only on
//! the plan's seed and the iteration index: results are identical under any
//! thread count or scheduling, and the iterations parallelize freely.
//!
//! Two entry points are exposed. [`permutation_distribution`] evaluates an
//! arbitrary vector statistic on each relabeled sample and is the general
//! tool. The combined tests instead use a crate-internal path that reuses
//! per-thread scratch and skips sample reconstruction, which matters when
//! the engine sits inside a Monte Carlo loop.

use rayon::prelude::*;

use crate::diff::rmtl_diff_raw;
use crate::error::{Error, Result};
use crate::gray::{gray_raw, GrayScratch};
use crate::outcome::{Method, TestMeta, TestOutcome};
use crate::sample::{select_tau_columns, Group, Sample, Status};
use crate::seeds::{domain, stream_rng};

/// How the restriction time is chosen inside each permuted sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauMode {
    /// Re-derive the restriction time from the permuted labels by the
    /// last-event-of-interest rule. This resamples the full procedure and
    /// is the default; iterations where the rule has no solution are
    /// recorded as invalid.
    Recompute,
    /// Hold the observed restriction time fixed across permutations.
    /// Useful as a sensitivity analysis; group incidence curves are then
    /// treated as constant beyond their last observation.
    Fixed,
}

/// Resampling parameters shared by everything that permutes labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    /// Number of label permutations B.
    pub count: usize,
    /// Base seed; iteration b uses an independent stream derived from
    /// (seed, b).
    pub seed: u64,
    /// Restriction-time handling inside each iteration.
    pub tau_mode: TauMode,
}

impl PermutationPlan {
    /// Default number of permutations.
    pub const DEFAULT_COUNT: usize = 200;

    /// A plan with the given iteration count and seed, recomputing the
    /// restriction time in each iteration.
    pub fn new(count: usize, seed: u64) -> PermutationPlan {
        PermutationPlan { count, seed, tau_mode: TauMode::Recompute }
    }

    /// A plan with the default iteration count.
    pub fn with_seed(seed: u64) -> PermutationPlan {
        PermutationPlan::new(Self::DEFAULT_COUNT, seed)
    }

    /// Switches the plan to a fixed restriction time.
    pub fn fixed_tau(mut self) -> PermutationPlan {
        self.tau_mode = TauMode::Fixed;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidInput("permutation count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Writes a uniformly random relabeling of `base` into `out`.
///
/// Fisher-Yates over a copy of the canonical labels: group sizes are
/// preserved and all label arrangements are equally likely.
fn permute_labels(base: &[Group], out: &mut Vec<Group>, rng: &mut impl rand::Rng) {
    out.clear();
    out.extend_from_slice(base);
    for i in (1..out.len()).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
}

/// Enforces the shared invalid-iteration budget: more than 10% of
/// iterations failing is an error.
fn check_invalid_budget(invalid: usize, total: usize) -> Result<()> {
    if invalid * 10 > total {
        return Err(Error::Permutation(format!(
            "{invalid} of {total} permutation iterations failed; at most 10% may be excluded"
        )));
    }
    Ok(())
}

/// Evaluates `statistic` on B label-permuted copies of `sample`.
///
/// Returns one row per successful iteration, in iteration order. An
/// iteration where `statistic` errors is excluded; more than 10% excluded
/// is an error. The statistic decides for itself how to treat the
/// restriction time (the plan's `tau_mode` is a convention for callers
/// that close over a restriction-time rule).
pub fn permutation_distribution<F>(
    sample: &Sample,
    statistic: F,
    plan: &PermutationPlan,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Sample) -> Result<Vec<f64>> + Sync,
{
    plan.validate()?;
    let rows: Vec<Option<Vec<f64>>> = (0..plan.count)
        .into_par_iter()
        .map_init(Vec::new, |labels, b| {
            let mut rng = stream_rng(plan.seed, &[domain::PERM, b as u64]);
            permute_labels(sample.groups(), labels, &mut rng);
            let permuted = Sample::from_sorted_parts(
                sample.times().to_vec(),
                sample.statuses().to_vec(),
                labels.clone(),
            );
            statistic(&permuted).ok()
        })
        .collect();
    let invalid = rows.iter().filter(|r| r.is_none()).count();
    check_invalid_budget(invalid, plan.count)?;
    Ok(rows.into_iter().flatten().collect())
}

/// Component P-values from one permuted relabeling.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ComponentRow {
    pub p_gray: f64,
    pub p_diff: f64,
}

/// The (Gray, Diff) asymptotic P-value pairs across the plan's iterations.
///
/// `tau` is the observed restriction time; under [`TauMode::Recompute`]
/// each iteration replaces it by the rule applied to its own labels and an
/// iteration without a solution is invalid, as is one whose difference
/// test degenerates. Lean twin of running [`permutation_distribution`]
/// with the two component tests: no allocation per iteration beyond the
/// per-thread scratch.
pub(crate) fn component_pvalue_matrix(
    sample: &Sample,
    tau: f64,
    plan: &PermutationPlan,
) -> Result<Vec<ComponentRow>> {
    plan.validate()?;
    let times = sample.times();
    let statuses = sample.statuses();
    let rows: Vec<Option<ComponentRow>> = (0..plan.count)
        .into_par_iter()
        .map_init(
            || (GrayScratch::new(), Vec::new()),
            |(scratch, labels), b| {
                let mut rng = stream_rng(plan.seed, &[domain::PERM, b as u64]);
                permute_labels(sample.groups(), labels, &mut rng);
                let tau_b = match plan.tau_mode {
                    TauMode::Fixed => tau,
                    TauMode::Recompute => select_tau_columns(times, statuses, labels)?,
                };
                let gray = gray_raw(times, statuses, labels, scratch);
                let diff = rmtl_diff_raw(times, statuses, labels, tau_b);
                if !diff.valid {
                    return None;
                }
                Some(ComponentRow { p_gray: gray.p_value, p_diff: diff.p_value })
            },
        )
        .collect();
    let invalid = rows.iter().filter(|r| r.is_none()).count();
    check_invalid_budget(invalid, plan.count)?;
    Ok(rows.into_iter().flatten().collect())
}

/// Permutation version of Gray's test, ranking the observed chi-square
/// statistic within its own label-permutation distribution.
///
/// The add-one estimate (1 + #{b : stat_b >= stat_obs}) / (B + 1) keeps the
/// P-value in [1/(B+1), 1]. The score needs no restriction time, so every
/// iteration is valid and the plan's `tau_mode` is irrelevant.
pub fn gray_permutation_test(sample: &Sample, plan: &PermutationPlan) -> Result<TestOutcome> {
    plan.validate()?;
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("Gray's test needs both groups present".into()));
    }
    if !sample.statuses().contains(&Status::Interest) {
        return Err(Error::InvalidInput(
            "Gray's test needs at least one event of interest".into(),
        ));
    }
    let times = sample.times();
    let statuses = sample.statuses();
    let observed = gray_raw(times, statuses, sample.groups(), &mut GrayScratch::new());
    let exceed: usize = (0..plan.count)
        .into_par_iter()
        .map_init(
            || (GrayScratch::new(), Vec::new()),
            |(scratch, labels), b| {
                let mut rng = stream_rng(plan.seed, &[domain::PERM, b as u64]);
                permute_labels(sample.groups(), labels, &mut rng);
                let raw = gray_raw(times, statuses, labels, scratch);
                usize::from(raw.statistic >= observed.statistic)
            },
        )
        .sum();
    let p = (1 + exceed) as f64 / (plan.count + 1) as f64;
    let meta = TestMeta { permutations: Some(plan.count as u32), ..TestMeta::default() };
    Ok(TestOutcome::new(Method::Gray, observed.statistic, p).with_meta(meta))
}
