//! Restricted-mean difference tests.
//!
//! The primary test (Diff) compares the groups' restricted mean time lost
//! to the event of interest:
//!
//! ```text
//! Z = (RMTL_1 - RMTL_2) / sqrt(v_1/n_1 + v_2/n_2)
//! ```
//!
//! with the per-subject plug-in variances v_g from
//! [`rmtl`](crate::restricted::rmtl), referred two-sided to the standard
//! normal. Companions with the same shape: Diff* on the competing-risks
//! restricted mean survival time (RC), and RMST differences from
//! Kaplan-Meier curves counting either the event of interest alone or the
//! composite of both events, using Greenwood variances.
//!
//! [`rmtl_diff_raw`] re-derives the Diff quantities from the sorted columns
//! with running sums instead of step-function objects; it allocates nothing
//! and is the permutation-loop path. The two routes agree to floating-point
//! rounding and are cross-checked in the unit tests.

use crate::cif::{aalen_johansen, Cause};
use crate::error::{Error, Result};
use crate::km::EventSet;
use crate::outcome::{Effect, Method, TestOutcome};
use crate::restricted::{rc, rmst, rmtl};
use crate::sample::{Group, Sample, Status};
use crate::stats::{normal_quantile, two_sided_normal_p};

/// Point difference, variance, and test quantities from one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DiffRaw {
    /// Group 1 minus group 2.
    pub delta: f64,
    /// Estimated variance of the difference.
    pub variance: f64,
    /// Z statistic; infinite in the degenerate invalid case.
    pub statistic: f64,
    pub p_value: f64,
    /// False when the variance is 0 with a non-zero difference, where no
    /// P-value is defined.
    pub valid: bool,
}

fn raw_from_moments(delta: f64, variance: f64) -> DiffRaw {
    if variance > 0.0 {
        let z = delta / variance.sqrt();
        DiffRaw { delta, variance, statistic: z, p_value: two_sided_normal_p(z), valid: true }
    } else if delta == 0.0 {
        DiffRaw { delta, variance: 0.0, statistic: 0.0, p_value: 1.0, valid: true }
    } else {
        DiffRaw {
            delta,
            variance: 0.0,
            statistic: f64::INFINITY,
            p_value: 0.0,
            valid: false,
        }
    }
}

/// One evaluation of the RMTL difference test on pre-sorted columns.
///
/// Integrates both groups' Aalen-Johansen incidence curves over `[0, tau]`
/// in a single pooled walk with running sums. `tau` is not validated here:
/// permutation callers derive it from the data rule (always within range)
/// or deliberately hold it fixed, in which case a group curve is constant
/// past its last observation.
pub(crate) fn rmtl_diff_raw(
    times: &[f64],
    statuses: &[Status],
    groups: &[Group],
    tau: f64,
) -> DiffRaw {
    let mut y = [0.0f64; 2];
    for &g in groups {
        y[g.index()] += 1.0;
    }
    let n = y;
    let mut surv = [1.0f64; 2]; // all-cause Kaplan-Meier per group
    let mut f1 = [0.0f64; 2]; // incidence of the event of interest
    let mut settled = [0.0f64; 2]; // time up to which the integrals are final
    let mut point = [0.0f64; 2]; // integral of f1 over [0, tau]
    let mut moment = [0.0f64; 2]; // integral of t * f1 over [0, tau]

    let len = times.len();
    let mut i = 0;
    while i < len {
        let t = times[i];
        let mut d1 = [0.0f64; 2];
        let mut de = [0.0f64; 2];
        let mut dall = [0.0f64; 2];
        while i < len && times[i] == t {
            let g = groups[i].index();
            match statuses[i] {
                Status::Interest => {
                    d1[g] += 1.0;
                    de[g] += 1.0;
                }
                Status::Competing => de[g] += 1.0,
                Status::Censored => {}
            }
            dall[g] += 1.0;
            i += 1;
        }
        for g in 0..2 {
            if de[g] > 0.0 {
                if d1[g] > 0.0 {
                    // Settle the constant piece of f1 that ends at this jump.
                    let b = t.min(tau);
                    let a = settled[g];
                    if b > a {
                        point[g] += f1[g] * (b - a);
                        moment[g] += f1[g] * (b * b - a * a) / 2.0;
                        settled[g] = b;
                    }
                    f1[g] += surv[g] * d1[g] / y[g];
                }
                surv[g] *= 1.0 - de[g] / y[g];
            }
            y[g] -= dall[g];
        }
    }
    let mut variance = 0.0;
    for g in 0..2 {
        let a = settled[g];
        if tau > a {
            point[g] += f1[g] * (tau - a);
            moment[g] += f1[g] * (tau * tau - a * a) / 2.0;
        }
        let v = 2.0 * tau * point[g] - 2.0 * moment[g] - point[g] * point[g];
        if n[g] > 0.0 {
            variance += v.max(0.0) / n[g];
        }
    }
    raw_from_moments(point[0] - point[1], variance)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn outcome_from_difference(
    method: Method,
    delta: f64,
    variance: f64,
    alpha: f64,
    effect_label: &str,
) -> Result<TestOutcome> {
    if variance <= 0.0 {
        if delta != 0.0 {
            return Err(Error::DegenerateVariance(format!(
                "estimated variance is zero but the {} is nonzero",
                effect_label
            )));
        }
        let effect = Effect {
            point: 0.0,
            ci_lower: 0.0,
            ci_upper: 0.0,
            label: effect_label.to_string(),
        };
        return Ok(TestOutcome::new(method, 0.0, 1.0).with_effect(effect));
    }
    let se = variance.sqrt();
    let z = delta / se;
    let q = normal_quantile(1.0 - alpha / 2.0);
    let effect = Effect {
        point: delta,
        ci_lower: delta - q * se,
        ci_upper: delta + q * se,
        label: effect_label.to_string(),
    };
    Ok(TestOutcome::new(method, z, two_sided_normal_p(z)).with_effect(effect))
}

/// Normal-theory test on the difference in restricted mean time lost to
/// the event of interest (group 1 minus group 2).
pub fn diff_test(sample: &Sample, tau: f64, alpha: f64) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("the difference test needs both groups present".into()));
    }
    let mut per_group = [(0.0, 0.0); 2]; // (point, variance of the point)
    for (slot, g) in per_group.iter_mut().zip(Group::BOTH) {
        let sub = sample.subset(g)?;
        let est = rmtl(&aalen_johansen(&sub, Cause::Interest)?, tau)?;
        *slot = (est.point, est.per_subject_variance / est.n as f64);
    }
    outcome_from_difference(
        Method::Diff,
        per_group[0].0 - per_group[1].0,
        per_group[0].1 + per_group[1].1,
        alpha,
        "RMTL difference (group 1 - group 2)",
    )
}

/// Observed difference quantities for the combined tests.
///
/// Validates exactly like [`diff_test`] (both groups present, `tau` inside
/// each group's valid range) but returns the single-walk raw quantities,
/// bitwise-identical to what the permutation engine computes per
/// iteration, so observed-vs-permuted rank comparisons never hinge on a
/// last-bit discrepancy between two summation orders.
pub(crate) fn observed_diff_raw(sample: &Sample, tau: f64) -> Result<DiffRaw> {
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("the difference test needs both groups present".into()));
    }
    for g in Group::BOTH {
        let sub = sample.subset(g)?;
        rmtl(&aalen_johansen(&sub, Cause::Interest)?, tau)?;
    }
    let raw = rmtl_diff_raw(sample.times(), sample.statuses(), sample.groups(), tau);
    if !raw.valid {
        return Err(Error::DegenerateVariance(
            "estimated variance is zero but the RMTL difference (group 1 - group 2) is nonzero"
                .into(),
        ));
    }
    Ok(raw)
}

/// The same Z test applied to the competing-risks restricted mean survival
/// time (RC scale): group 1 minus group 2.
pub fn diff_star_test(sample: &Sample, tau: f64, alpha: f64) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("the difference test needs both groups present".into()));
    }
    let mut per_group = [(0.0, 0.0); 2];
    for (slot, g) in per_group.iter_mut().zip(Group::BOTH) {
        let sub = sample.subset(g)?;
        let est = rc(&sub, tau)?;
        *slot = (est.point, est.per_subject_variance / est.n as f64);
    }
    outcome_from_difference(
        Method::DiffStar,
        per_group[0].0 - per_group[1].0,
        per_group[0].1 + per_group[1].1,
        alpha,
        "RC difference (group 1 - group 2)",
    )
}

/// Which events the RMST difference counts as failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmstVariant {
    /// Only the event of interest; competing events are censored.
    Interest,
    /// The composite of both event types.
    Composite,
}

/// Z test on the difference in Kaplan-Meier restricted mean survival time,
/// with Greenwood variances.
pub fn rmst_diff_test(
    sample: &Sample,
    tau: f64,
    alpha: f64,
    variant: RmstVariant,
) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("the difference test needs both groups present".into()));
    }
    let (counted, method, label) = match variant {
        RmstVariant::Interest => (
            EventSet::interest_only(),
            Method::RmstInterest,
            "RMST difference, event of interest (group 1 - group 2)",
        ),
        RmstVariant::Composite => (
            EventSet::both(),
            Method::RmstComposite,
            "RMST difference, composite event (group 1 - group 2)",
        ),
    };
    let mut per_group = [(0.0, 0.0); 2];
    for (slot, g) in per_group.iter_mut().zip(Group::BOTH) {
        let est = rmst(&sample.subset(g)?, counted, tau)?;
        *slot = (est.point, est.variance_of_point);
    }
    outcome_from_difference(
        method,
        per_group[0].0 - per_group[1].0,
        per_group[0].1 + per_group[1].1,
        alpha,
        label,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SurvRecord;

    fn sample(rows: &[(f64, u8, u8)]) -> Sample {
        Sample::new(rows.iter().map(|&(t, st, g)| SurvRecord {
            time: t,
            status: Status::from_code(st).unwrap(),
            group: Group::from_code(g).unwrap(),
        }))
        .unwrap()
    }

    fn mixed_rows() -> Vec<(f64, u8, u8)> {
        vec![
            (0.5, 1, 1),
            (1.0, 2, 1),
            (1.0, 0, 1),
            (2.0, 1, 1),
            (3.0, 0, 1),
            (3.5, 1, 1),
            (0.7, 2, 2),
            (1.0, 1, 2),
            (1.8, 0, 2),
            (2.5, 1, 2),
            (4.0, 2, 2),
            (4.2, 1, 2),
        ]
    }

    #[test]
    fn raw_path_matches_estimator_path() {
        let s = sample(&mixed_rows());
        let tau = 2.4;
        let raw = rmtl_diff_raw(s.times(), s.statuses(), s.groups(), tau);
        let outcome = diff_test(&s, tau, 0.05).unwrap();
        assert!((raw.statistic - outcome.statistic).abs() < 1e-12);
        assert!((raw.p_value - outcome.p_value).abs() < 1e-12);
        assert!((raw.delta - outcome.effect.as_ref().unwrap().point).abs() < 1e-12);
    }

    #[test]
    fn identical_groups_give_p_one_exactly() {
        let rows = [(1.0, 1, 1), (2.0, 2, 1), (3.0, 0, 1), (4.0, 1, 1)];
        let mut both: Vec<(f64, u8, u8)> = rows.to_vec();
        both.extend(rows.iter().map(|&(t, s, _)| (t, s, 2)));
        let s = sample(&both);
        let tau = 4.0;
        for outcome in [
            diff_test(&s, tau, 0.05).unwrap(),
            diff_star_test(&s, tau, 0.05).unwrap(),
            rmst_diff_test(&s, tau, 0.05, RmstVariant::Interest).unwrap(),
            rmst_diff_test(&s, tau, 0.05, RmstVariant::Composite).unwrap(),
        ] {
            assert_eq!(outcome.p_value, 1.0, "{:?}", outcome.method);
            assert_eq!(outcome.effect.as_ref().unwrap().point, 0.0);
        }
    }

    #[test]
    fn degenerate_zero_variance_with_difference_errors() {
        // Every subject fails from the event of interest at the same time
        // within each group: both plug-in variances are exactly 0, but the
        // points differ.
        let s = sample(&[(1.0, 1, 1), (1.0, 1, 1), (2.0, 1, 2), (2.0, 1, 2)]);
        let err = diff_test(&s, 2.0, 0.05).unwrap_err();
        assert!(matches!(err, Error::DegenerateVariance(_)));
    }

    #[test]
    fn effect_interval_is_well_ordered_and_centered() {
        let s = sample(&mixed_rows());
        let outcome = diff_test(&s, 2.4, 0.05).unwrap();
        let effect = outcome.effect.unwrap();
        assert!(effect.ci_lower <= effect.point && effect.point <= effect.ci_upper);
        let half = (effect.ci_upper - effect.ci_lower) / 2.0;
        assert!((effect.point - effect.ci_lower - half).abs() < 1e-12);
    }

    #[test]
    fn label_swap_negates_delta_and_keeps_p() {
        let rows = mixed_rows();
        let swapped: Vec<(f64, u8, u8)> =
            rows.iter().map(|&(t, s, g)| (t, s, if g == 1 { 2 } else { 1 })).collect();
        let a = diff_test(&sample(&rows), 2.4, 0.05).unwrap();
        let b = diff_test(&sample(&swapped), 2.4, 0.05).unwrap();
        let (ea, eb) = (a.effect.unwrap(), b.effect.unwrap());
        assert!((ea.point + eb.point).abs() < 1e-12);
        assert!((a.p_value - b.p_value).abs() < 1e-12);
        // Intervals mirror around zero.
        assert!((ea.ci_lower + eb.ci_upper).abs() < 1e-12);
    }

    #[test]
    fn composite_scale_matches_rmst_composite_point() {
        let s = sample(&mixed_rows());
        let a = diff_star_test(&s, 2.4, 0.05).unwrap();
        let b = rmst_diff_test(&s, 2.4, 0.05, RmstVariant::Composite).unwrap();
        let (ea, eb) = (a.effect.unwrap(), b.effect.unwrap());
        // Same point estimates (the two routes integrate the same curve),
        // different variances.
        assert!((ea.point - eb.point).abs() < 1e-10);
    }

    #[test]
    fn fixed_tau_beyond_group_range_extends_constantly() {
        // Group 2's last observation is at 2.0; with tau = 3.0 the raw path
        // holds its incidence constant on (2, 3].
        let s = sample(&[(1.0, 1, 1), (3.0, 0, 1), (1.5, 1, 2), (2.0, 0, 2)]);
        let raw = rmtl_diff_raw(s.times(), s.statuses(), s.groups(), 3.0);
        assert!(raw.valid);
        // Group 1: f1 = 1/2 on [1, 3] -> point 1. Group 2: f1 = 1/2 on
        // [1.5, 3] -> point 0.75. Delta = 0.25.
        assert!((raw.delta - 0.25).abs() < 1e-12);
    }
}
