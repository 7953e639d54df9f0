//! Combined two-sample tests.
//!
//! Gray's test reacts to differences expressed through the subdistribution
//! hazard, while the restricted-mean-time-lost difference measures an
//! absolute gap on the time scale. Neither dominates across alternatives
//! (crossing incidence curves favor one, steady separation the other), so
//! the tests here combine the two component P-values into a single
//! decision. Because both components are computed from the same data their
//! P-values are correlated, which rules out the textbook null
//! distributions for the combinations (Beta(1,2) for the minimum, chi
//! square with 4 degrees of freedom for Fisher's statistic); the
//! combinations are instead calibrated by label permutation.
//!
//! * [`pcomb_test`] ranks the smaller of the two P-values, Tippett's
//!   minimum-P combination, within its permutation distribution.
//! * [`fcomb_test`] does the same for Fisher's combination statistic
//!   -2(ln p_G + ln p_D).
//! * [`tcomb_test`] is a two-stage procedure: Gray's test first at level
//!   a1 = 1 - sqrt(1 - a); on non-rejection, the difference test decides,
//!   with the conditional rejection probability estimated from the
//!   permutations that also fail stage one. The split spends the overall
//!   level a symmetrically across the stages, a1 + a1(1 - a1) = a.
//!
//! Component P-values inside the permutations are the asymptotic ones; no
//! permutation nesting takes place. [`combined_tests`] evaluates all three
//! combinations, plus the components themselves, on one shared permutation
//! matrix: cheaper than three separate runs and the reported P-values are
//! mutually consistent by construction.

use serde::{Deserialize, Serialize};

use crate::diff::{check_alpha, diff_test, observed_diff_raw};
use crate::error::Result;
use crate::gray::gray_test;
use crate::outcome::{Method, TestMeta, TestOutcome};
use crate::permutation::{component_pvalue_matrix, ComponentRow, PermutationPlan};
use crate::sample::Sample;

/// Floor applied before taking logarithms in Fisher's statistic.
const LOG_FLOOR: f64 = 1e-300;

/// Stage-one level of the two-stage procedure: a1 = 1 - sqrt(1 - a).
fn alpha_one(alpha: f64) -> f64 {
    1.0 - (1.0 - alpha).sqrt()
}

/// Fisher's combination statistic -2(ln p_G + ln p_D), with the P-values
/// floored to keep the logarithm finite.
fn fisher_statistic(p_gray: f64, p_diff: f64) -> f64 {
    -2.0 * (p_gray.max(LOG_FLOOR).ln() + p_diff.max(LOG_FLOOR).ln())
}

fn permutation_meta(rows: &[ComponentRow]) -> TestMeta {
    TestMeta { permutations: Some(rows.len() as u32), ..TestMeta::default() }
}

/// Minimum-P combination from observed component P-values and the
/// permutation matrix: small values of m = min(p_G, p_D) are extreme.
fn pcomb_from_parts(p_gray: f64, p_diff: f64, rows: &[ComponentRow]) -> TestOutcome {
    let m = p_gray.min(p_diff);
    let hits = rows.iter().filter(|r| r.p_gray.min(r.p_diff) <= m).count();
    let p = (1 + hits) as f64 / (rows.len() + 1) as f64;
    TestOutcome::new(Method::PComb, m, p).with_meta(permutation_meta(rows))
}

/// Fisher combination from observed component P-values and the permutation
/// matrix: large values of the statistic are extreme.
fn fcomb_from_parts(p_gray: f64, p_diff: f64, rows: &[ComponentRow]) -> TestOutcome {
    let f = fisher_statistic(p_gray, p_diff);
    let hits =
        rows.iter().filter(|r| fisher_statistic(r.p_gray, r.p_diff) >= f).count();
    let p = (1 + hits) as f64 / (rows.len() + 1) as f64;
    TestOutcome::new(Method::FComb, f, p).with_meta(permutation_meta(rows))
}

/// Stage-one outcome: Gray's test already rejected at level a1, so its
/// P-value is final and no permutations are needed.
fn tcomb_stage_one(p_gray: f64) -> TestOutcome {
    let meta = TestMeta { stage: Some(1), ..TestMeta::default() };
    TestOutcome::new(Method::TComb, p_gray, p_gray).with_meta(meta)
}

/// Stage-two outcome. Among permutations that also fail stage one
/// (p_G,b > a1), q_hat is the fraction whose difference-test P-value is at
/// least as extreme as observed; the final P-value a1 + q_hat(1 - a1)
/// spends the stage-one budget plus the conditional remainder. An empty
/// conditioning set yields q_hat = 0 with a warning rather than an error.
fn tcomb_stage_two(p_diff: f64, a1: f64, rows: &[ComponentRow]) -> TestOutcome {
    let kept: Vec<&ComponentRow> = rows.iter().filter(|r| r.p_gray > a1).collect();
    let (q_hat, warning) = if kept.is_empty() {
        (0.0, Some("no permutation fell in stage two; conditional estimate is 0".to_string()))
    } else {
        let hits = kept.iter().filter(|r| r.p_diff <= p_diff).count();
        (hits as f64 / kept.len() as f64, None)
    };
    let meta = TestMeta {
        stage: Some(2),
        q_hat: Some(q_hat),
        permutations: Some(rows.len() as u32),
        warning,
    };
    TestOutcome::new(Method::TComb, p_diff, a1 + q_hat * (1.0 - a1)).with_meta(meta)
}

/// Minimum-P combined test: permutation P-value of min(p_Gray, p_Diff).
pub fn pcomb_test(sample: &Sample, tau: f64, plan: &PermutationPlan) -> Result<TestOutcome> {
    plan.validate()?;
    let gray = gray_test(sample)?;
    let diff = observed_diff_raw(sample, tau)?;
    let rows = component_pvalue_matrix(sample, tau, plan)?;
    Ok(pcomb_from_parts(gray.p_value, diff.p_value, &rows))
}

/// Fisher combined test: permutation P-value of -2(ln p_Gray + ln p_Diff).
pub fn fcomb_test(sample: &Sample, tau: f64, plan: &PermutationPlan) -> Result<TestOutcome> {
    plan.validate()?;
    let gray = gray_test(sample)?;
    let diff = observed_diff_raw(sample, tau)?;
    let rows = component_pvalue_matrix(sample, tau, plan)?;
    Ok(fcomb_from_parts(gray.p_value, diff.p_value, &rows))
}

/// Two-stage combined test at overall level `alpha`.
///
/// Stage one applies Gray's test at a1 = 1 - sqrt(1 - alpha); rejection
/// makes its P-value final (`meta.stage` = 1, no permutations run).
/// Otherwise the difference test decides, and the final P-value
/// a1 + q_hat(1 - a1) uses the permutation estimate q_hat of the
/// conditional rejection probability (`meta.stage` = 2, `meta.q_hat`
/// recorded). The reported statistic is the P-value the deciding stage
/// compared: Gray's at stage one, the difference test's at stage two.
pub fn tcomb_test(
    sample: &Sample,
    tau: f64,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    plan.validate()?;
    let gray = gray_test(sample)?;
    let diff = observed_diff_raw(sample, tau)?;
    let a1 = alpha_one(alpha);
    if gray.p_value <= a1 {
        return Ok(tcomb_stage_one(gray.p_value));
    }
    let rows = component_pvalue_matrix(sample, tau, plan)?;
    Ok(tcomb_stage_two(diff.p_value, a1, &rows))
}

/// The component tests and every combination, computed together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedOutcomes {
    /// Gray's test on the subdistribution hazard scale.
    pub gray: TestOutcome,
    /// Restricted-mean-time-lost difference test (with effect estimate).
    pub diff: TestOutcome,
    /// Minimum-P combination.
    pub pcomb: TestOutcome,
    /// Fisher combination.
    pub fcomb: TestOutcome,
    /// Two-stage procedure.
    pub tcomb: TestOutcome,
}

/// Runs Gray's test, the difference test, and the three combinations on a
/// single shared permutation matrix.
///
/// Each combined outcome is identical to what its standalone entry point
/// returns under the same plan; sharing the matrix only removes repeated
/// work. `alpha` drives the difference test's confidence interval and the
/// two-stage split.
pub fn combined_tests(
    sample: &Sample,
    tau: f64,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<CombinedOutcomes> {
    check_alpha(alpha)?;
    plan.validate()?;
    let gray = gray_test(sample)?;
    let diff = diff_test(sample, tau, alpha)?;
    let diff_raw = observed_diff_raw(sample, tau)?;
    let a1 = alpha_one(alpha);
    let needs_rows = gray.p_value > a1;
    let rows = component_pvalue_matrix(sample, tau, plan)?;
    let tcomb = if needs_rows {
        tcomb_stage_two(diff_raw.p_value, a1, &rows)
    } else {
        tcomb_stage_one(gray.p_value)
    };
    Ok(CombinedOutcomes {
        pcomb: pcomb_from_parts(gray.p_value, diff_raw.p_value, &rows),
        fcomb: fcomb_from_parts(gray.p_value, diff_raw.p_value, &rows),
        tcomb,
        gray,
        diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{Group, Status, SurvRecord};

    fn sample(rows: &[(f64, u8, u8)]) -> Sample {
        Sample::new(
            rows.iter()
                .map(|&(time, status, group)| SurvRecord {
                    time,
                    status: Status::from_code(status).unwrap(),
                    group: Group::from_code(group).unwrap(),
                })
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn mixed_sample() -> Sample {
        sample(&[
            (0.5, 1, 1),
            (0.9, 2, 1),
            (1.3, 1, 1),
            (1.8, 0, 1),
            (2.2, 1, 1),
            (2.9, 0, 1),
            (0.4, 1, 2),
            (0.8, 0, 2),
            (1.1, 1, 2),
            (1.6, 2, 2),
            (2.5, 1, 2),
            (3.0, 1, 2),
        ])
    }

    fn separated_sample() -> Sample {
        let mut rows = Vec::new();
        for i in 0..12 {
            rows.push((0.2 + 0.1 * i as f64, 1, 1));
            rows.push((5.0 + 0.1 * i as f64, if i % 3 == 0 { 0 } else { 1 }, 2));
        }
        sample(&rows)
    }

    #[test]
    fn stage_one_level_matches_closed_form() {
        assert!((alpha_one(0.05) - 0.025320565519103666).abs() < 1e-15);
        // The split spends exactly alpha overall.
        for a in [0.01, 0.05, 0.2] {
            let a1 = alpha_one(a);
            assert!((a1 + a1 * (1.0 - a1) - a).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_statistic_arithmetic() {
        let f = fisher_statistic(0.05, 0.05);
        assert!((f - (-4.0 * 0.05f64.ln())).abs() < 1e-12);
        assert!((f - 11.982929094219012).abs() < 1e-10);
        assert_eq!(fisher_statistic(1.0, 1.0), 0.0);
        // The floor keeps exact zeros finite.
        assert!(fisher_statistic(0.0, 0.0).is_finite());
    }

    #[test]
    fn identical_groups_give_p_one_for_min_and_fisher() {
        let mut rows = Vec::new();
        for i in 0..8 {
            let status = [1, 2, 1, 0][i % 4];
            rows.push((0.5 + i as f64 * 0.3, status, 1));
            rows.push((0.5 + i as f64 * 0.3, status, 2));
        }
        let s = sample(&rows);
        let tau = crate::sample::select_tau(&s).unwrap();
        let plan = PermutationPlan::new(50, 11);
        let pcomb = pcomb_test(&s, tau, &plan).unwrap();
        assert_eq!(pcomb.statistic, 1.0);
        assert_eq!(pcomb.p_value, 1.0);
        let fcomb = fcomb_test(&s, tau, &plan).unwrap();
        assert_eq!(fcomb.statistic, 0.0);
        assert_eq!(fcomb.p_value, 1.0);
        // Stage one cannot reject on identical groups; the final P-value
        // is at least the stage-one level.
        let tcomb = tcomb_test(&s, tau, 0.05, &plan).unwrap();
        let meta = tcomb.meta.as_ref().unwrap();
        assert_eq!(meta.stage, Some(2));
        assert!(tcomb.p_value >= alpha_one(0.05));
        assert!(tcomb.p_value <= 1.0);
    }

    #[test]
    fn standalone_tests_match_the_shared_run() {
        let s = mixed_sample();
        let tau = crate::sample::select_tau(&s).unwrap();
        let plan = PermutationPlan::new(60, 5);
        let all = combined_tests(&s, tau, 0.05, &plan).unwrap();
        assert_eq!(pcomb_test(&s, tau, &plan).unwrap(), all.pcomb);
        assert_eq!(fcomb_test(&s, tau, &plan).unwrap(), all.fcomb);
        assert_eq!(tcomb_test(&s, tau, 0.05, &plan).unwrap(), all.tcomb);
        assert_eq!(gray_test(&s).unwrap(), all.gray);
        assert_eq!(diff_test(&s, tau, 0.05).unwrap(), all.diff);
    }

    #[test]
    fn strong_separation_stops_at_stage_one() {
        let s = separated_sample();
        let tau = crate::sample::select_tau(&s).unwrap();
        let plan = PermutationPlan::new(40, 2);
        let gray = gray_test(&s).unwrap();
        assert!(gray.p_value <= alpha_one(0.05));
        let tcomb = tcomb_test(&s, tau, 0.05, &plan).unwrap();
        assert_eq!(tcomb.p_value, gray.p_value);
        let meta = tcomb.meta.as_ref().unwrap();
        assert_eq!(meta.stage, Some(1));
        assert_eq!(meta.permutations, None);
        // The minimum-P combination also lands at its floor.
        let pcomb = pcomb_test(&s, tau, &plan).unwrap();
        assert!(pcomb.p_value >= 1.0 / 41.0 && pcomb.p_value < 0.1);
    }

    #[test]
    fn permutation_p_values_respect_the_add_one_floor() {
        let s = mixed_sample();
        let tau = crate::sample::select_tau(&s).unwrap();
        let plan = PermutationPlan::new(30, 77);
        for outcome in [
            pcomb_test(&s, tau, &plan).unwrap(),
            fcomb_test(&s, tau, &plan).unwrap(),
        ] {
            assert!(outcome.p_value >= 1.0 / 31.0);
            assert!(outcome.p_value <= 1.0);
        }
    }

    #[test]
    fn stage_two_arithmetic_on_synthetic_rows() {
        let a1 = alpha_one(0.05);
        let rows: Vec<ComponentRow> = vec![
            // Six rows fail stage one, two of those have p_diff <= 0.3.
            ComponentRow { p_gray: 0.50, p_diff: 0.10 },
            ComponentRow { p_gray: 0.80, p_diff: 0.30 },
            ComponentRow { p_gray: 0.30, p_diff: 0.90 },
            ComponentRow { p_gray: 0.60, p_diff: 0.70 },
            ComponentRow { p_gray: 0.90, p_diff: 0.45 },
            ComponentRow { p_gray: 0.70, p_diff: 0.80 },
            // These reject at stage one and are excluded from q_hat.
            ComponentRow { p_gray: 0.01, p_diff: 0.05 },
            ComponentRow { p_gray: 0.02, p_diff: 0.99 },
        ];
        let outcome = tcomb_stage_two(0.3, a1, &rows);
        let meta = outcome.meta.as_ref().unwrap();
        let q = 2.0 / 6.0;
        assert_eq!(meta.q_hat, Some(q));
        assert!((outcome.p_value - (a1 + q * (1.0 - a1))).abs() < 1e-15);
        assert_eq!(meta.warning, None);
    }

    #[test]
    fn empty_stage_two_set_warns_and_spends_only_stage_one_budget() {
        let a1 = alpha_one(0.05);
        let rows: Vec<ComponentRow> = vec![
            ComponentRow { p_gray: 0.001, p_diff: 0.2 },
            ComponentRow { p_gray: 0.010, p_diff: 0.5 },
        ];
        let outcome = tcomb_stage_two(0.4, a1, &rows);
        let meta = outcome.meta.as_ref().unwrap();
        assert_eq!(meta.q_hat, Some(0.0));
        assert!(meta.warning.is_some());
        assert_eq!(outcome.p_value, a1);
    }

    #[test]
    fn degenerate_difference_propagates_as_an_error() {
        // Each group is a point mass of events of interest, so both
        // restricted means are exact (zero variance) yet differ: the
        // difference test has no reference distribution and the combined
        // test must surface that instead of ranking a meaningless value.
        let s = sample(&[
            (1.0, 1, 1),
            (1.0, 1, 1),
            (1.0, 1, 1),
            (2.0, 1, 2),
            (2.0, 1, 2),
            (2.0, 1, 2),
        ]);
        let err = pcomb_test(&s, 3.0, &PermutationPlan::new(20, 1)).unwrap_err();
        assert!(matches!(err, crate::error::Error::DegenerateVariance(_)));
    }
}
