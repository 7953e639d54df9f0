//! Analysis reports: per-group restricted-mean summaries plus the full
//! two-sample test battery, rendered as aligned text, JSON, or plot data.
//!
//! One report covers a single two-group dataset at a single restriction
//! time. The descriptive block carries four restricted means per group
//! (RMTL, interest-only RMST, composite time lost RC, composite RMST) with
//! confidence intervals; the inference block carries all eight tests. The
//! sign convention is fixed as group 1 minus group 2 throughout.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rmtl::{
    aalen_johansen, combined_tests, diff_star_test, rc, rmst, rmst_diff_test, select_tau,
    Cause, EventSet, Group, PermutationPlan, RmstVariant, Sample, Status, TestOutcome,
};

use crate::error::{CliError, Result};

/// How the restriction time was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauProvenance {
    /// Earliest last event of interest across the two groups.
    Rule,
    /// Supplied explicitly on the command line.
    User,
}

impl TauProvenance {
    fn describe(self) -> &'static str {
        match self {
            TauProvenance::Rule => "earliest last event of interest across groups",
            TauProvenance::User => "supplied on the command line",
        }
    }
}

/// A point estimate with its confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateBlock {
    pub point: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    /// Degeneracy note (clamped or unstable variance), when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl EstimateBlock {
    fn new(point: f64, ci: (f64, f64), warning: Option<&str>) -> EstimateBlock {
        EstimateBlock {
            point,
            ci_lower: ci.0,
            ci_upper: ci.1,
            warning: warning.map(str::to_owned),
        }
    }
}

/// Descriptive summary of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    /// Group code (1 or 2).
    pub group: u8,
    pub n: usize,
    pub interest_events: usize,
    pub competing_events: usize,
    pub censored: usize,
    /// Restricted mean time lost to the event of interest.
    pub rmtl: EstimateBlock,
    /// Restricted mean survival time counting only the event of interest.
    pub rmst_interest: EstimateBlock,
    /// Restricted mean time lost to the composite of both events.
    pub rc: EstimateBlock,
    /// Restricted mean survival time counting the composite event.
    pub rmst_composite: EstimateBlock,
}

/// Full analysis of one dataset at one restriction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// Restriction time all restricted means and the Diff tests use.
    pub tau: f64,
    pub tau_provenance: TauProvenance,
    /// Test level; intervals are reported at level `1 - alpha`.
    pub alpha: f64,
    /// Label permutations behind the combined tests.
    pub permutations: usize,
    /// Root seed for the permutation streams.
    pub seed: u64,
    pub groups: Vec<GroupSummary>,
    /// All eight tests in report order: Gray, Diff, PComb, FComb, TComb,
    /// Diff*, RMSTi, RMSTc.
    pub tests: Vec<TestOutcome>,
}

fn clamp_note(clamped: bool) -> Option<&'static str> {
    clamped.then_some("variance clamped at zero")
}

fn unstable_note(unstable: bool) -> Option<&'static str> {
    unstable.then_some("variance term dropped at a depleted risk set")
}

fn summarize_group(sample: &Sample, group: Group, tau: f64, alpha: f64) -> Result<GroupSummary> {
    let sub = sample.subset(group)?;
    let mut interest_events = 0;
    let mut competing_events = 0;
    let mut censored = 0;
    for status in sub.statuses() {
        match status {
            Status::Interest => interest_events += 1,
            Status::Competing => competing_events += 1,
            Status::Censored => censored += 1,
        }
    }

    let cif = aalen_johansen(&sub, Cause::Interest)?;
    let rmtl_est = rmtl::rmtl(&cif, tau)?;
    let rmst_i = rmst(&sub, EventSet::interest_only(), tau)?;
    let rc_est = rc(&sub, tau)?;
    let rmst_c = rmst(&sub, EventSet::both(), tau)?;

    Ok(GroupSummary {
        group: group.code(),
        n: sub.len(),
        interest_events,
        competing_events,
        censored,
        rmtl: EstimateBlock::new(
            rmtl_est.point,
            rmtl_est.ci(alpha),
            clamp_note(rmtl_est.variance_clamped),
        ),
        rmst_interest: EstimateBlock::new(
            rmst_i.point,
            rmst_i.ci(alpha),
            unstable_note(rmst_i.unstable_variance),
        ),
        rc: EstimateBlock::new(rc_est.point, rc_est.ci(alpha), clamp_note(rc_est.variance_clamped)),
        rmst_composite: EstimateBlock::new(
            rmst_c.point,
            rmst_c.ci(alpha),
            unstable_note(rmst_c.unstable_variance),
        ),
    })
}

/// Resolves the restriction time: the user's value when given, otherwise
/// the rule. An unsolvable rule asks for `--tau` rather than crashing.
///
/// A user value exactly equal to the rule's is attributed to the rule, so
/// the two invocations produce identical output.
pub fn resolve_tau(sample: &Sample, user_tau: Option<f64>) -> Result<(f64, TauProvenance)> {
    match user_tau {
        Some(tau) => {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(CliError::input(format!(
                    "--tau must be a positive finite number, got {tau}"
                )));
            }
            if matches!(select_tau(sample), Ok(rule) if rule == tau) {
                return Ok((tau, TauProvenance::Rule));
            }
            Ok((tau, TauProvenance::User))
        }
        None => match select_tau(sample) {
            Ok(tau) => Ok((tau, TauProvenance::Rule)),
            Err(rmtl::Error::TauUndefined) => Err(CliError::Compute(
                "the restriction-time rule is undefined (a group has no events of interest); \
                 supply --tau explicitly"
                    .into(),
            )),
            Err(err) => Err(err.into()),
        },
    }
}

/// Runs every estimator and test on the dataset.
///
/// A rule-derived restriction time is re-derived from the permuted labels
/// in each permutation iteration, mirroring how the observed value was
/// chosen. A user-pinned time stays fixed across iterations: that is the
/// null matching a fixed-horizon statistic, and it keeps datasets whose
/// rule is unsolvable analyzable at all.
pub fn build_report(
    sample: &Sample,
    tau: f64,
    provenance: TauProvenance,
    alpha: f64,
    permutations: usize,
    seed: u64,
) -> Result<AnalysisReport> {
    if !sample.has_both_groups() {
        return Err(CliError::input(
            "the dataset must contain both groups (group column values 1 and 2)",
        ));
    }

    let groups = Group::BOTH
        .iter()
        .map(|&g| summarize_group(sample, g, tau, alpha))
        .collect::<Result<Vec<_>>>()?;

    let mut plan = PermutationPlan::new(permutations, seed);
    if provenance == TauProvenance::User {
        plan = plan.fixed_tau();
    }
    let combined = combined_tests(sample, tau, alpha, &plan)?;
    let tests = vec![
        combined.gray,
        combined.diff,
        combined.pcomb,
        combined.fcomb,
        combined.tcomb,
        diff_star_test(sample, tau, alpha)?,
        rmst_diff_test(sample, tau, alpha, RmstVariant::Interest)?,
        rmst_diff_test(sample, tau, alpha, RmstVariant::Composite)?,
    ];

    Ok(AnalysisReport {
        tau,
        tau_provenance: provenance,
        alpha,
        permutations,
        seed,
        groups,
        tests,
    })
}

fn ci_label(alpha: f64) -> String {
    let level = (1.0 - alpha) * 100.0;
    if (level - level.round()).abs() < 1e-9 {
        format!("{}% CI", level.round())
    } else {
        format!("{level}% CI")
    }
}

fn estimate_cell(block: &EstimateBlock) -> String {
    format!("{:.4} ({:.4}, {:.4})", block.point, block.ci_lower, block.ci_upper)
}

fn test_notes(outcome: &TestOutcome, ci: &str) -> String {
    let mut notes = Vec::new();
    if let Some(effect) = &outcome.effect {
        notes.push(format!(
            "{} {:.4} ({ci} {:.4}, {:.4})",
            effect.label, effect.point, effect.ci_lower, effect.ci_upper
        ));
    }
    if let Some(meta) = &outcome.meta {
        if let Some(stage) = meta.stage {
            notes.push(format!("stage {stage}"));
        }
        if let Some(q_hat) = meta.q_hat {
            notes.push(format!("q_hat {q_hat:.4}"));
        }
        if let Some(perms) = meta.permutations {
            notes.push(format!("{perms} permutations"));
        }
        if let Some(warning) = &meta.warning {
            notes.push(warning.clone());
        }
    }
    notes.join("; ")
}

/// Renders the report as the aligned-column text block for stdout.
pub fn render_text(report: &AnalysisReport) -> String {
    let ci = ci_label(report.alpha);
    let mut out = String::new();

    let _ = writeln!(out, "Competing-risks analysis (group 1 - group 2)");
    let _ = writeln!(
        out,
        "  restriction time : {} ({})",
        report.tau,
        report.tau_provenance.describe()
    );
    let _ = writeln!(out, "  alpha            : {}", report.alpha);
    let _ = writeln!(out, "  permutations     : {}", report.permutations);
    let _ = writeln!(out, "  seed             : {}", report.seed);
    out.push('\n');

    let _ = writeln!(out, "Group counts");
    let _ = writeln!(
        out,
        "  {:>5}  {:>6}  {:>8}  {:>9}  {:>8}",
        "group", "n", "interest", "competing", "censored"
    );
    for g in &report.groups {
        let _ = writeln!(
            out,
            "  {:>5}  {:>6}  {:>8}  {:>9}  {:>8}",
            g.group, g.n, g.interest_events, g.competing_events, g.censored
        );
    }
    out.push('\n');

    let _ = writeln!(out, "Restricted means on [0, {}] ({ci})", report.tau);
    let _ = writeln!(
        out,
        "  {:>5}  {:<28}  {:<28}  {:<28}  {:<28}",
        "group", "RMTL", "RMSTi", "RC", "RMSTc"
    );
    for g in &report.groups {
        let _ = writeln!(
            out,
            "  {:>5}  {:<28}  {:<28}  {:<28}  {:<28}",
            g.group,
            estimate_cell(&g.rmtl),
            estimate_cell(&g.rmst_interest),
            estimate_cell(&g.rc),
            estimate_cell(&g.rmst_composite)
        );
    }
    for g in &report.groups {
        for (name, block) in [
            ("RMTL", &g.rmtl),
            ("RMSTi", &g.rmst_interest),
            ("RC", &g.rc),
            ("RMSTc", &g.rmst_composite),
        ] {
            if let Some(warning) = &block.warning {
                let _ = writeln!(out, "  note: group {} {name}: {warning}", g.group);
            }
        }
    }
    out.push('\n');

    let _ = writeln!(out, "Tests");
    let _ = writeln!(out, "  {:<7}  {:>10}  {:>8}  notes", "method", "statistic", "P-value");
    for test in &report.tests {
        let notes = test_notes(test, &ci);
        let _ = writeln!(
            out,
            "  {:<7}  {:>10.4}  {:>8.4}  {notes}",
            test.method.label(),
            test.statistic,
            test.p_value
        );
    }
    out
}

fn write_curve(
    dir: &Path,
    name: &str,
    value_at_zero: f64,
    knots: &[f64],
    values: &[f64],
) -> Result<()> {
    let mut body = String::from("time\tvalue\n");
    let _ = writeln!(body, "0\t{value_at_zero:.6}");
    for (t, v) in knots.iter().zip(values) {
        let _ = writeln!(body, "{t}\t{v:.6}");
    }
    let path = dir.join(name);
    std::fs::write(&path, body)
        .map_err(|err| CliError::input(format!("cannot write {}: {err}", path.display())))
}

/// Writes one step function per curve, two columns (time, value): the
/// cumulative incidence of the event of interest rising from (0, 0) and
/// the complement of the competing-event incidence falling from (0, 1),
/// for each group.
pub fn write_figure_data(sample: &Sample, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|err| CliError::input(format!("cannot create {}: {err}", dir.display())))?;
    for group in Group::BOTH {
        let sub = sample.subset(group)?;
        let code = group.code();

        let interest = aalen_johansen(&sub, Cause::Interest)?;
        write_curve(
            dir,
            &format!("group{code}_interest_cif.tsv"),
            interest.cif.value_at_zero(),
            interest.cif.knots(),
            interest.cif.values(),
        )?;

        let competing = aalen_johansen(&sub, Cause::Competing)?;
        let complement: Vec<f64> = competing.cif.values().iter().map(|v| 1.0 - v).collect();
        write_curve(
            dir,
            &format!("group{code}_competing_complement.tsv"),
            1.0 - competing.cif.value_at_zero(),
            competing.cif.knots(),
            &complement,
        )?;
    }
    Ok(())
}
