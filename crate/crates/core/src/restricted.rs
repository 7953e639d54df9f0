//! Restricted-mean summaries: time lost to one cause (RMTL), time lost to
//! any cause (RC), and restricted mean survival time (RMST).
//!
//! All three are integrals of step functions over `[0, tau]` and are
//! computed in closed form. The RMTL and RC carry a per-subject variance
//! derived from the plug-in moments of the time-lost variable
//! `tau - min(T, tau)`:
//!
//! ```text
//! v = 2·tau·∫I(t)dt - 2·∫t·I(t)dt - (∫I(t)dt)^2
//! ```
//!
//! which the difference tests divide by the group size. The RMST instead
//! carries the Greenwood-form variance of the point estimate itself.

use crate::cif::{aalen_johansen, Cause, CifEstimate};
use crate::error::{Error, Result};
use crate::km::{kaplan_meier, EventSet, KmCurve};
use crate::sample::Sample;

/// Restricted mean time lost to one cause: `∫_0^tau I_j(t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmtlEstimate {
    pub tau: f64,
    pub point: f64,
    /// Plug-in variance of the per-subject time-lost variable; divide by `n`
    /// for the variance of the point estimate.
    pub per_subject_variance: f64,
    /// Number of subjects behind the estimate.
    pub n: usize,
    /// Set when the plug-in variance came out negative by rounding and was
    /// clamped to zero.
    pub variance_clamped: bool,
}

/// Restricted mean time lost to any cause (composite), `tau - RMTL_1 - RMTL_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcEstimate {
    pub tau: f64,
    pub point: f64,
    /// Plug-in variance of the composite time-lost variable (same form as
    /// the RMTL variance, applied to the summed incidence curve).
    pub per_subject_variance: f64,
    pub n: usize,
    pub variance_clamped: bool,
}

/// Restricted mean survival time `∫_0^tau S(t) dt` with Greenwood variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmstEstimate {
    pub tau: f64,
    pub point: f64,
    /// Greenwood-form variance of the point estimate (already on the
    /// estimate scale; no further division by `n`).
    pub variance_of_point: f64,
    pub n: usize,
    /// Set when a variance term hit a fully depleted risk set (0/0); the
    /// term is dropped and the reported variance may understate.
    pub unstable_variance: bool,
}

impl RmtlEstimate {
    /// Normal-theory confidence interval at level `1 - alpha`.
    pub fn ci(&self, alpha: f64) -> (f64, f64) {
        interval(self.point, self.per_subject_variance / self.n as f64, alpha)
    }
}

impl RcEstimate {
    /// Normal-theory confidence interval at level `1 - alpha`.
    pub fn ci(&self, alpha: f64) -> (f64, f64) {
        interval(self.point, self.per_subject_variance / self.n as f64, alpha)
    }
}

impl RmstEstimate {
    /// Normal-theory confidence interval at level `1 - alpha`.
    pub fn ci(&self, alpha: f64) -> (f64, f64) {
        interval(self.point, self.variance_of_point, alpha)
    }
}

fn interval(point: f64, variance: f64, alpha: f64) -> (f64, f64) {
    let half = crate::stats::normal_quantile(1.0 - alpha / 2.0) * variance.max(0.0).sqrt();
    (point - half, point + half)
}

/// Restricted mean time lost computed from a cumulative incidence estimate.
///
/// `tau` must be positive and no larger than the largest observed time of
/// the sample behind `cif`, unless the all-cause survival curve has already
/// reached zero (the curves are then exact on any horizon).
pub fn rmtl(cif: &CifEstimate, tau: f64) -> Result<RmtlEstimate> {
    cif.check_tau(tau)?;
    let (point, variance, clamped) = time_lost_moments(&cif.cif, tau);
    Ok(RmtlEstimate { tau, point, per_subject_variance: variance, n: cif.n, variance_clamped: clamped })
}

/// Restricted mean survival time under competing risks: `tau` minus the
/// time lost to either cause, with the plug-in variance applied to the
/// composite incidence curve `I_1 + I_2`.
///
/// The point estimate equals `∫_0^tau S(t) dt` for the all-cause survival
/// curve (the two incidence curves and the survival curve sum to one), so
/// this is an alternative route to the composite restricted mean with a
/// different variance estimate.
pub fn rc(sample: &Sample, tau: f64) -> Result<RcEstimate> {
    let interest = aalen_johansen(sample, Cause::Interest)?;
    let competing = aalen_johansen(sample, Cause::Competing)?;
    interest.check_tau(tau)?;
    let composite = interest.cif.sum(&competing.cif);
    let lost = composite.integral_to(tau);
    let (_, variance, clamped) = time_lost_moments(&composite, tau);
    Ok(RcEstimate {
        tau,
        point: tau - lost,
        per_subject_variance: variance,
        n: interest.n,
        variance_clamped: clamped,
    })
}

/// Restricted mean survival time from a Kaplan-Meier curve, with the
/// Greenwood-form variance.
pub fn rmst_from_survival(curve: &KmCurve, tau: f64) -> Result<RmstEstimate> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidTau(format!("tau must be positive and finite, got {tau}")));
    }
    // Beyond the last observed time the curve is known only if it has
    // already reached zero; the constant extension is then exact.
    if tau > curve.max_time && curve.survival.last_value() > 0.0 {
        return Err(Error::InvalidTau(format!(
            "tau {tau} exceeds the largest observed time {}",
            curve.max_time
        )));
    }
    let point = curve.survival.integral_to(tau);

    // Greenwood: sum over event times t_i <= tau of
    //   (∫_{t_i}^tau S du)^2 * d_i / (n_i (n_i - d_i)).
    let mut variance = 0.0;
    let mut unstable = false;
    for term in curve.terms.iter().take_while(|term| term.time <= tau) {
        let area = point - curve.survival.integral_to(term.time);
        if term.events == term.at_risk {
            // Fully depleted risk set: the factor is 0/0. The area above a
            // zero survival curve is also zero, so drop the term and flag.
            unstable = true;
            continue;
        }
        let d = f64::from(term.events);
        let r = f64::from(term.at_risk);
        variance += area * area * d / (r * (r - d));
    }

    Ok(RmstEstimate { tau, point, variance_of_point: variance, n: curve.n, unstable_variance: unstable })
}

/// Convenience: RMST of the sample for a given event set.
pub fn rmst(sample: &Sample, counted: EventSet, tau: f64) -> Result<RmstEstimate> {
    rmst_from_survival(&kaplan_meier(sample, counted)?, tau)
}

/// Plug-in moments of the time-lost variable for an incidence curve:
/// returns (point, per-subject variance, clamped?).
fn time_lost_moments(incidence: &crate::step::StepFunction, tau: f64) -> (f64, f64, bool) {
    let point = incidence.integral_to(tau);
    let moment = incidence.moment_integral_to(tau);
    let variance = 2.0 * tau * point - 2.0 * moment - point * point;
    if variance < 0.0 {
        (point, 0.0, true)
    } else {
        (point, variance, false)
    }
}
