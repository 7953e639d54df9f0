//! Aalen-Johansen estimation of cumulative incidence functions.
//!
//! With competing events, the naive "1 - KM treating the other cause as
//! censoring" overstates incidence. The Aalen-Johansen estimator attributes
//! mass correctly: the increment for cause `j` at an event time is the
//! cause-`j` event fraction among those at risk, scaled by the probability
//! of still being event-free just before (the left limit of the all-cause
//! Kaplan-Meier curve).

use crate::error::{Error, Result};
use crate::sample::{Sample, Status};
use crate::step::StepFunction;

/// Event type for a cumulative incidence function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cause {
    Interest,
    Competing,
}

impl Cause {
    pub fn status(self) -> Status {
        match self {
            Cause::Interest => Status::Interest,
            Cause::Competing => Status::Competing,
        }
    }
}

/// Aalen-Johansen estimate of one cause's cumulative incidence, along with
/// the all-cause survival curve from the same sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CifEstimate {
    pub cause: Cause,
    /// Cumulative incidence; non-decreasing, 0 at t=0, bounded by 1.
    pub cif: StepFunction,
    /// All-cause Kaplan-Meier survival curve.
    pub overall_survival: StepFunction,
    /// Largest observed time in the source sample.
    pub max_time: f64,
    /// Number of subjects in the source sample.
    pub n: usize,
}

/// Aalen-Johansen cumulative incidence for the given cause.
pub fn aalen_johansen(sample: &Sample, cause: Cause) -> Result<CifEstimate> {
    let times = sample.times();
    let statuses = sample.statuses();
    let n = sample.len();
    let target = cause.status();

    let mut cif_knots = Vec::new();
    let mut cif_values = Vec::new();
    let mut surv_knots = Vec::new();
    let mut surv_values = Vec::new();

    let mut cif = 0.0f64;
    let mut survival = 1.0f64; // left limit of the all-cause curve
    let mut at_risk = n as u32;

    let mut i = 0;
    while i < n {
        let t = times[i];
        let mut d_target = 0u32;
        let mut d_any = 0u32;
        let mut removed = 0u32;
        while i < n && times[i] == t {
            match statuses[i] {
                Status::Censored => {}
                s => {
                    d_any += 1;
                    if s == target {
                        d_target += 1;
                    }
                }
            }
            removed += 1;
            i += 1;
        }
        if d_target > 0 {
            cif += survival * f64::from(d_target) / f64::from(at_risk);
            cif_knots.push(t);
            cif_values.push(cif);
        }
        if d_any > 0 {
            survival *= 1.0 - f64::from(d_any) / f64::from(at_risk);
            surv_knots.push(t);
            surv_values.push(survival);
        }
        at_risk -= removed;
    }

    Ok(CifEstimate {
        cause,
        cif: StepFunction::new(0.0, cif_knots, cif_values)?,
        overall_survival: StepFunction::new(1.0, surv_knots, surv_values)?,
        max_time: sample.max_time(),
        n,
    })
}

impl CifEstimate {
    /// Validates a restriction time against the source sample's range.
    ///
    /// A horizon beyond the largest observed time is permitted only when the
    /// all-cause survival curve has already reached zero: the curves are then
    /// fully resolved and their constant extension is exact, not an
    /// extrapolation.
    pub(crate) fn check_tau(&self, tau: f64) -> Result<()> {
        if !tau.is_finite() || tau <= 0.0 {
            return Err(Error::InvalidTau(format!("tau must be positive and finite, got {tau}")));
        }
        if tau > self.max_time && self.overall_survival.last_value() > 0.0 {
            return Err(Error::InvalidTau(format!(
                "tau {tau} exceeds the largest observed time {}",
                self.max_time
            )));
        }
        Ok(())
    }
}
