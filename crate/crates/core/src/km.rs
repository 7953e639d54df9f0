//! Product-limit (Kaplan-Meier) estimation.
//!
//! Two variants are needed for competing-risks work:
//!
//! * the all-cause or cause-restricted survival curve, where a configurable
//!   set of statuses counts as "event" and everything else as censored; and
//! * the censoring-distribution curve `G`, where censorings are the events
//!   and both event types are removal without an event.
//!
//! Tie convention: at equal times, events happen before censorings. For the
//! survival curves this is the usual rule (subjects censored at `t` are still
//! at risk at `t`). For the censoring curve the same rule means subjects with
//! an event at `t` are removed from the risk set before censorings at `t` are
//! processed. With both conventions in place the product of the all-event
//! survival curve and the censoring curve telescopes exactly to the empirical
//! fraction still under observation, an identity the risk-set algebra of
//! Gray's test relies on.

use crate::error::Result;
use crate::sample::{Sample, Status};
use crate::step::StepFunction;

/// Which statuses count as events for a survival curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventSet {
    interest: bool,
    competing: bool,
}

impl EventSet {
    /// Only the event of interest (status 1); competing events are censored.
    pub fn interest_only() -> EventSet {
        EventSet { interest: true, competing: false }
    }

    /// Only competing events (status 2).
    pub fn competing_only() -> EventSet {
        EventSet { interest: false, competing: true }
    }

    /// Any event (statuses 1 and 2): the all-cause survival curve.
    pub fn both() -> EventSet {
        EventSet { interest: true, competing: true }
    }

    pub fn counts(self, status: Status) -> bool {
        match status {
            Status::Interest => self.interest,
            Status::Competing => self.competing,
            Status::Censored => false,
        }
    }
}

/// One factor of the product-limit estimate: `events` events out of
/// `at_risk` subjects at `time`. Inputs to the Greenwood variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskTerm {
    pub time: f64,
    pub events: u32,
    pub at_risk: u32,
}

/// A Kaplan-Meier curve together with its risk-set terms and the largest
/// observed time of the sample that produced it (the upper bound for valid
/// restriction times).
#[derive(Debug, Clone, PartialEq)]
pub struct KmCurve {
    pub survival: StepFunction,
    pub terms: Vec<RiskTerm>,
    pub max_time: f64,
    pub n: usize,
}

/// Kaplan-Meier estimate of the survival function, counting the given status
/// set as events.
pub fn kaplan_meier(sample: &Sample, counted: EventSet) -> Result<KmCurve> {
    let times = sample.times();
    let statuses = sample.statuses();
    let n = sample.len();

    let mut knots = Vec::new();
    let mut values = Vec::new();
    let mut terms = Vec::new();
    let mut survival = 1.0f64;
    let mut at_risk = n as u32;

    let mut i = 0;
    while i < n {
        let t = times[i];
        let mut d = 0u32;
        let mut removed = 0u32;
        while i < n && times[i] == t {
            if counted.counts(statuses[i]) {
                d += 1;
            }
            removed += 1;
            i += 1;
        }
        if d > 0 {
            survival *= 1.0 - f64::from(d) / f64::from(at_risk);
            knots.push(t);
            values.push(survival);
            terms.push(RiskTerm { time: t, events: d, at_risk });
        }
        at_risk -= removed;
    }

    Ok(KmCurve {
        survival: StepFunction::new(1.0, knots, values)?,
        terms,
        max_time: sample.max_time(),
        n,
    })
}

/// Kaplan-Meier estimate `G` of the censoring distribution: status 0 is the
/// event, statuses 1 and 2 are removal without an event. Per the tie
/// convention, subjects with an event at `t` leave the risk set before
/// censorings at `t` are counted.
pub fn censoring_km(sample: &Sample) -> Result<StepFunction> {
    let times = sample.times();
    let statuses = sample.statuses();
    let n = sample.len();

    let mut knots = Vec::new();
    let mut values = Vec::new();
    let mut g = 1.0f64;
    let mut at_risk = n as u32;

    let mut i = 0;
    while i < n {
        let t = times[i];
        let mut censored = 0u32;
        let mut events = 0u32;
        while i < n && times[i] == t {
            if statuses[i] == Status::Censored {
                censored += 1;
            } else {
                events += 1;
            }
            i += 1;
        }
        if censored > 0 {
            // Events at t are already out of the censoring risk set.
            g *= 1.0 - f64::from(censored) / f64::from(at_risk - events);
            knots.push(t);
            values.push(g);
        }
        at_risk -= censored + events;
    }

    StepFunction::new(1.0, knots, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{Group, SurvRecord};

    fn sample(rows: &[(f64, u8)]) -> Sample {
        Sample::new(rows.iter().map(|&(t, s)| SurvRecord {
            time: t,
            status: Status::from_code(s).unwrap(),
            group: Group::One,
        }))
        .unwrap()
    }

    #[test]
    fn all_censored_gives_constant_one() {
        let km = kaplan_meier(&sample(&[(1.0, 0), (2.0, 0), (3.0, 0)]), EventSet::both()).unwrap();
        assert!(km.survival.knots().is_empty());
        assert_eq!(km.survival.value_at(10.0), 1.0);
        assert!(km.terms.is_empty());
    }

    #[test]
    fn single_event_drops_to_zero() {
        let km = kaplan_meier(&sample(&[(2.0, 1)]), EventSet::both()).unwrap();
        assert_eq!(km.survival.value_at(1.9), 1.0);
        assert_eq!(km.survival.value_at(2.0), 0.0);
    }

    #[test]
    fn mixed_events_and_censoring() {
        // Times 1(event), 2(censored), 3(competing), 4(event); all events counted:
        // S = 3/4 on [1,3), 3/8 on [3,4), 0 from 4 on.
        let km = kaplan_meier(
            &sample(&[(1.0, 1), (2.0, 0), (3.0, 2), (4.0, 1)]),
            EventSet::both(),
        )
        .unwrap();
        assert_eq!(km.survival.knots(), &[1.0, 3.0, 4.0]);
        assert_eq!(km.survival.value_at(1.0), 0.75);
        assert_eq!(km.survival.value_at(3.5), 0.375);
        assert_eq!(km.survival.value_at(4.0), 0.0);
        let counts: Vec<(u32, u32)> = km.terms.iter().map(|t| (t.events, t.at_risk)).collect();
        assert_eq!(counts, vec![(1, 4), (1, 2), (1, 1)]);
    }

    #[test]
    fn interest_only_treats_competing_as_censored() {
        let km = kaplan_meier(
            &sample(&[(1.0, 1), (2.0, 0), (3.0, 2), (4.0, 1)]),
            EventSet::interest_only(),
        )
        .unwrap();
        assert_eq!(km.survival.knots(), &[1.0, 4.0]);
        assert_eq!(km.survival.value_at(2.0), 0.75);
        assert_eq!(km.survival.value_at(4.0), 0.0);
    }

    #[test]
    fn censoring_km_swaps_roles() {
        // Censoring at t=1 with both subjects at risk: G = 1/2 from t=1 on;
        // the event at t=2 does not move G.
        let g = censoring_km(&sample(&[(1.0, 0), (2.0, 1)])).unwrap();
        assert_eq!(g.knots(), &[1.0]);
        assert_eq!(g.value_at(0.5), 1.0);
        assert_eq!(g.value_at(1.0), 0.5);
        assert_eq!(g.value_at(5.0), 0.5);
    }

    #[test]
    fn censoring_km_without_censorings_is_one() {
        let g = censoring_km(&sample(&[(1.0, 1), (2.0, 2)])).unwrap();
        assert!(g.knots().is_empty());
        assert_eq!(g.value_at(3.0), 1.0);
    }

    #[test]
    fn tied_event_leaves_censoring_risk_set_first() {
        // At t=1: one event, one censoring among 3 subjects. The censoring
        // risk set at t=1 is 2, so G(1) = 1/2.
        let g = censoring_km(&sample(&[(1.0, 1), (1.0, 0), (2.0, 0)])).unwrap();
        assert_eq!(g.value_at(1.0), 0.5);
    }

    #[test]
    fn survival_times_censoring_is_empirical_at_risk() {
        // S(t)*G(t) telescopes to the fraction with observed time > t.
        let s = sample(&[(1.0, 1), (1.0, 0), (2.0, 2), (3.0, 0), (3.0, 1), (4.0, 0)]);
        let km = kaplan_meier(&s, EventSet::both()).unwrap();
        let g = censoring_km(&s).unwrap();
        let n = s.len() as f64;
        for &t in &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0] {
            let surviving = s.times().iter().filter(|&&x| x > t).count() as f64;
            let product = km.survival.value_at(t) * g.value_at(t);
            assert!(
                (product - surviving / n).abs() < 1e-12,
                "identity failed at t={t}: {product} vs {}",
                surviving / n
            );
        }
    }
}
