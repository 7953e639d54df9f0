//! Shared fixtures for the integration suites: a brute-force product-limit
//! oracle, a fine-grid Riemann integrator, and a seeded random-sample
//! generator. The oracle recounts risk sets from scratch at every distinct
//! time, so it shares no code with the library's single sweep.

// Each integration target compiles this module on its own and uses a
// different subset of the helpers.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use rmtl::{
    aalen_johansen, kaplan_meier, Cause, EventSet, Group, Sample, Status, StepFunction, SurvRecord,
};

/// A step function as plain parallel vectors, built by brute force.
pub struct NaiveCurve {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
}

fn distinct_times(records: &[(f64, Status)]) -> Vec<f64> {
    let mut times: Vec<f64> = records.iter().map(|&(t, _)| t).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    times
}

fn at_risk(records: &[(f64, Status)], t: f64) -> u32 {
    records.iter().filter(|&&(time, _)| time >= t).count() as u32
}

fn events_at(records: &[(f64, Status)], t: f64, counts: impl Fn(Status) -> bool) -> u32 {
    records.iter().filter(|&&(time, s)| time == t && counts(s)).count() as u32
}

/// Product-limit survival curve by definition: at each distinct time the
/// risk set and event count are recounted over the full record list.
pub fn naive_km(records: &[(f64, Status)], counts: impl Fn(Status) -> bool + Copy) -> NaiveCurve {
    let mut knots = Vec::new();
    let mut values = Vec::new();
    let mut survival = 1.0f64;
    for t in distinct_times(records) {
        let d = events_at(records, t, counts);
        if d > 0 {
            let y = at_risk(records, t);
            survival *= 1.0 - f64::from(d) / f64::from(y);
            knots.push(t);
            values.push(survival);
        }
    }
    NaiveCurve { knots, values }
}

/// Aalen-Johansen cumulative incidence by definition: the plug-in sum of
/// `S(t-) * d_cause / y` over distinct times, with `S` the all-cause
/// product-limit curve recomputed from scratch.
pub fn naive_aj(records: &[(f64, Status)], cause: Status) -> NaiveCurve {
    let mut knots = Vec::new();
    let mut values = Vec::new();
    let mut cif = 0.0f64;
    let mut survival = 1.0f64;
    for t in distinct_times(records) {
        let y = at_risk(records, t);
        let d_cause = events_at(records, t, |s| s == cause);
        if d_cause > 0 {
            cif += survival * f64::from(d_cause) / f64::from(y);
            knots.push(t);
            values.push(cif);
        }
        let d_any = events_at(records, t, |s| s != Status::Censored);
        if d_any > 0 {
            survival *= 1.0 - f64::from(d_any) / f64::from(y);
        }
    }
    NaiveCurve { knots, values }
}

/// Asserts a library step function equals a brute-force curve exactly:
/// same knots, bitwise-equal values.
pub fn assert_curve_exact(step: &StepFunction, naive: &NaiveCurve, label: &str) {
    assert_eq!(step.knots(), naive.knots.as_slice(), "{label}: knot set differs");
    assert_eq!(step.values(), naive.values.as_slice(), "{label}: values differ");
}

/// Riemann midpoint integral of a step function over [0, tau], walking
/// cells and knots together so evaluation stays linear.
pub fn riemann_integral(step: &StepFunction, tau: f64, cells: usize) -> f64 {
    let h = tau / cells as f64;
    let knots = step.knots();
    let values = step.values();
    let mut passed = 0usize; // knots at or below the current midpoint
    let mut total = 0.0f64;
    for i in 0..cells {
        let mid = (i as f64 + 0.5) * h;
        while passed < knots.len() && knots[passed] <= mid {
            passed += 1;
        }
        let value = if passed == 0 { step.value_at_zero() } else { values[passed - 1] };
        total += value * h;
    }
    total
}

/// A random two-group sample: exponential-ish event times, three statuses,
/// both groups guaranteed non-empty when `n >= 2`.
pub fn random_sample(rng: &mut ChaCha12Rng, n: usize) -> Sample {
    let records: Vec<SurvRecord> = (0..n)
        .map(|i| {
            let time = -(1.0 - rng.random::<f64>()).ln() * 5.0 + 0.01;
            let status = match rng.random_range(0..3u8) {
                0 => Status::Censored,
                1 => Status::Interest,
                _ => Status::Competing,
            };
            // Alternate the first two records so both groups are present.
            let group = if i < 2 {
                if i == 0 { Group::One } else { Group::Two }
            } else if rng.random::<f64>() < 0.5 {
                Group::One
            } else {
                Group::Two
            };
            SurvRecord { time, status, group }
        })
        .collect();
    Sample::new(records).expect("random records are valid")
}

pub fn seeded_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// The same sample with every group label flipped.
pub fn swap_labels(sample: &Sample) -> Sample {
    Sample::new(sample.records().map(|mut record| {
        record.group = record.group.other();
        record
    }))
    .unwrap()
}

/// The same sample with every time multiplied by `factor`.
pub fn scale_times(sample: &Sample, factor: f64) -> Sample {
    Sample::new(sample.records().map(|mut record| {
        record.time *= factor;
        record
    }))
    .unwrap()
}

/// A random sample with exactly equal group sizes, so permuted label
/// vectors coincide between a sample and its label-swapped twin.
pub fn balanced_sample(seed: u64, per_group: usize) -> Sample {
    let base = random_sample(&mut seeded_rng(seed), 4 * per_group);
    let mut taken = [0usize; 2];
    let records: Vec<SurvRecord> = base
        .records()
        .filter_map(|mut record| {
            let preferred = (record.group.code() - 1) as usize;
            let slot = if taken[preferred] < per_group {
                preferred
            } else {
                1 - preferred
            };
            if taken[slot] == per_group {
                return None;
            }
            taken[slot] += 1;
            record.group = Group::BOTH[slot];
            Some(record)
        })
        .collect();
    Sample::new(records).unwrap()
}

/// The restriction time under the default rule, when it is defined.
pub fn usable_tau(sample: &Sample) -> Option<f64> {
    rmtl::select_tau(sample).ok()
}

/// A sample with every record in group 1.
pub fn one_group_sample(rows: &[(f64, Status)]) -> Sample {
    Sample::new(rows.iter().map(|&(time, status)| SurvRecord {
        time,
        status,
        group: Group::One,
    }))
    .unwrap()
}

/// Compares every product-limit curve the library derives from one
/// single-group sample against the brute-force oracle; panics on any
/// bitwise mismatch.
pub fn check_against_oracle(rows: &[(f64, Status)]) {
    let sample = one_group_sample(rows);

    for (set, label, counts) in [
        (EventSet::both(), "km all-cause", (|s| s != Status::Censored) as fn(Status) -> bool),
        (EventSet::interest_only(), "km interest", |s| s == Status::Interest),
        (EventSet::competing_only(), "km competing", |s| s == Status::Competing),
    ] {
        let curve = kaplan_meier(&sample, set).unwrap();
        assert_curve_exact(&curve.survival, &naive_km(rows, counts), label);
    }

    for (cause, status) in [(Cause::Interest, Status::Interest), (Cause::Competing, Status::Competing)] {
        let estimate = aalen_johansen(&sample, cause).unwrap();
        assert_curve_exact(&estimate.cif, &naive_aj(rows, status), "aalen-johansen cif");
        assert_curve_exact(
            &estimate.overall_survival,
            &naive_km(rows, |s| s != Status::Censored),
            "aalen-johansen survival",
        );
    }
}

/// Runs [`check_against_oracle`] on every status pattern for 1 through
/// `max_n` subjects, over distinct, pairwise-tied, and fully tied time
/// layouts. Returns the number of samples checked.
pub fn exhaustive_oracle_check(max_n: usize) -> usize {
    let mut checked = 0usize;
    for n in 1..=max_n {
        let layouts: [Vec<f64>; 3] = [
            (0..n).map(|i| (i + 1) as f64).collect(),
            (0..n).map(|i| (i / 2 + 1) as f64).collect(),
            vec![1.0; n],
        ];
        for times in &layouts {
            for pattern in status_patterns(n) {
                let rows: Vec<(f64, Status)> = times.iter().copied().zip(pattern).collect();
                check_against_oracle(&rows);
                checked += 1;
            }
        }
    }
    checked
}

/// Every status assignment of length `n`, as base-3 digits.
pub fn status_patterns(n: usize) -> impl Iterator<Item = Vec<Status>> {
    let total = 3usize.pow(n as u32);
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let digit = code % 3;
                code /= 3;
                match digit {
                    0 => Status::Censored,
                    1 => Status::Interest,
                    _ => Status::Competing,
                }
            })
            .collect()
    })
}
