//! Subject-level records and the sorted two-group sample.
//!
//! A [`Sample`] stores one record per subject: the observed time (event or
//! censoring, whichever came first), the status at that time, and a group
//! label. Records are kept sorted by time with a fixed tie order so that
//! every estimator and test in this crate sees the same deterministic
//! ordering: at equal times, events of interest come first, then competing
//! events, then censorings, and ties beyond that preserve input order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Subject status at the observed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    /// Observation ended without an event.
    Censored,
    /// The event of interest (type 1) occurred.
    Interest,
    /// A competing event (type 2) occurred.
    Competing,
}

impl Status {
    /// Numeric code used in data files: 0 censored, 1 interest, 2 competing.
    pub fn code(self) -> u8 {
        match self {
            Status::Censored => 0,
            Status::Interest => 1,
            Status::Competing => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Status> {
        match code {
            0 => Some(Status::Censored),
            1 => Some(Status::Interest),
            2 => Some(Status::Competing),
            _ => None,
        }
    }

    /// Position in the tie order: events of interest before competing
    /// events before censorings.
    fn tie_rank(self) -> u8 {
        match self {
            Status::Interest => 0,
            Status::Competing => 1,
            Status::Censored => 2,
        }
    }
}

/// Group label in a two-sample comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    One,
    Two,
}

impl Group {
    pub fn code(self) -> u8 {
        match self {
            Group::One => 1,
            Group::Two => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Group> {
        match code {
            1 => Some(Group::One),
            2 => Some(Group::Two),
            _ => None,
        }
    }

    /// The other group.
    pub fn other(self) -> Group {
        match self {
            Group::One => Group::Two,
            Group::Two => Group::One,
        }
    }

    /// Zero-based index, for group-indexed scratch arrays.
    pub(crate) fn index(self) -> usize {
        match self {
            Group::One => 0,
            Group::Two => 1,
        }
    }

    pub const BOTH: [Group; 2] = [Group::One, Group::Two];
}

/// One subject's observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvRecord {
    /// Observed time; strictly positive and finite.
    pub time: f64,
    pub status: Status,
    pub group: Group,
}

/// A validated, time-sorted collection of records.
///
/// Stored as parallel vectors so that label permutations (which preserve the
/// sort order) can reuse the time and status columns unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    times: Vec<f64>,
    statuses: Vec<Status>,
    groups: Vec<Group>,
}

impl Sample {
    /// Builds a sample from records in any order. Validates that every time
    /// is finite and strictly positive and that the sample is non-empty.
    pub fn new(records: impl IntoIterator<Item = SurvRecord>) -> Result<Sample> {
        let records: Vec<SurvRecord> = records.into_iter().collect();
        if records.is_empty() {
            return Err(Error::InvalidInput("sample is empty".into()));
        }
        for r in &records {
            if !r.time.is_finite() || r.time <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "time must be positive and finite, got {}",
                    r.time
                )));
            }
        }
        let mut order: Vec<usize> = (0..records.len()).collect();
        // Stable sort keeps input order as the final tie-breaker.
        order.sort_by(|&a, &b| {
            records[a]
                .time
                .total_cmp(&records[b].time)
                .then(records[a].status.tie_rank().cmp(&records[b].status.tie_rank()))
        });
        let mut times = Vec::with_capacity(records.len());
        let mut statuses = Vec::with_capacity(records.len());
        let mut groups = Vec::with_capacity(records.len());
        for &i in &order {
            times.push(records[i].time);
            statuses.push(records[i].status);
            groups.push(records[i].group);
        }
        Ok(Sample { times, statuses, groups })
    }

    /// Rebuilds a sample from columns already in sorted order. Used by the
    /// permutation engine, where only labels change.
    pub(crate) fn from_sorted_parts(
        times: Vec<f64>,
        statuses: Vec<Status>,
        groups: Vec<Group>,
    ) -> Sample {
        debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
        Sample { times, statuses, groups }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn statuses(&self) -> &[Status] {
        &self.statuses
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn record(&self, i: usize) -> SurvRecord {
        SurvRecord { time: self.times[i], status: self.statuses[i], group: self.groups[i] }
    }

    pub fn records(&self) -> impl Iterator<Item = SurvRecord> + '_ {
        (0..self.len()).map(move |i| self.record(i))
    }

    pub fn group_size(&self, group: Group) -> usize {
        self.groups.iter().filter(|&&g| g == group).count()
    }

    pub fn has_both_groups(&self) -> bool {
        self.group_size(Group::One) > 0 && self.group_size(Group::Two) > 0
    }

    /// Largest observed time (events and censorings alike).
    pub fn max_time(&self) -> f64 {
        *self.times.last().expect("sample is non-empty")
    }

    /// Largest observed time within one group, or `None` if the group is
    /// empty.
    pub fn max_time_in(&self, group: Group) -> Option<f64> {
        (0..self.len()).rev().find(|&i| self.groups[i] == group).map(|i| self.times[i])
    }

    /// Records of one group, preserving sort order.
    pub fn subset(&self, group: Group) -> Result<Sample> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.groups[i] == group).collect();
        if idx.is_empty() {
            return Err(Error::InvalidInput(format!("group {} has no records", group.code())));
        }
        Ok(Sample {
            times: idx.iter().map(|&i| self.times[i]).collect(),
            statuses: idx.iter().map(|&i| self.statuses[i]).collect(),
            groups: idx.iter().map(|&i| self.groups[i]).collect(),
        })
    }
}

/// Data-driven restriction time: the smaller, across groups, of the largest
/// observed event-of-interest time in the group.
///
/// Errors with [`Error::TauUndefined`] when either group has no events of
/// interest (including when a group is empty).
pub fn select_tau(sample: &Sample) -> Result<f64> {
    select_tau_columns(sample.times(), sample.statuses(), sample.groups())
        .ok_or(Error::TauUndefined)
}

/// Column-slice form of [`select_tau`] for callers that permute labels in
/// place without rebuilding a [`Sample`]. `None` when the rule has no
/// solution.
pub(crate) fn select_tau_columns(
    times: &[f64],
    statuses: &[Status],
    groups: &[Group],
) -> Option<f64> {
    let mut last = [None::<f64>; 2];
    for i in (0..times.len()).rev() {
        let slot = &mut last[groups[i].index()];
        if slot.is_none() && statuses[i] == Status::Interest {
            *slot = Some(times[i]);
            if last[0].is_some() && last[1].is_some() {
                break;
            }
        }
    }
    match (last[0], last[1]) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => None,
    }
}
