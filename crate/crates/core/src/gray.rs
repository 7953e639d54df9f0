//! Gray's two-sample test for equality of cumulative incidence functions
//! (Gray, Annals of Statistics 1988; the rho = 0 member of the family).
//!
//! The score compares the groups on the subdistribution-hazard scale. With
//! pooled event-of-interest times t_1 < ... < t_K, group risk masses
//! R_g(t) and their ratio E(t) = R_1(t) / (R_1(t) + R_2(t)),
//!
//! ```text
//! U = sum_k [ dN_11(t_k) * (1 - E(t_k)) - dN_12(t_k) * E(t_k) ]
//! ```
//!
//! where dN_1g counts group-g events of interest at t_k. R_g is the
//! inverse-probability-of-censoring-weighted size of the subdistribution
//! risk set: subjects under observation count 1, subjects with an earlier
//! competing event stay in with weight G_g(t-) / G_g(X_i-), where G_g is
//! the group's censoring Kaplan-Meier curve. Under the tie convention used
//! throughout this crate (events leave the censoring risk set first) the
//! weighted sum collapses to the closed form
//!
//! ```text
//! R_g(t) = n_g * G_g(t-) * (1 - F_1g(t-))
//! ```
//!
//! with F_1g the group's Aalen-Johansen incidence of the event of interest.
//!
//! The variance is estimated by the influence-function sandwich of Fine &
//! Gray (JASA 1994/1999 weighting technique): V = sum_i (eta_i + psi_i)^2,
//! where eta_i is subject i's martingale contribution to the score and
//! psi_i the contribution of its censoring information to everyone's IPCW
//! weights. Both reduce to prefix sums over the pooled event grid and the
//! group's censoring times, so one evaluation costs O(n + K) after the
//! initial sort that [`Sample`](crate::sample::Sample) already maintains.
//! The statistic U^2 / V is referred to a chi-square distribution with one
//! degree of freedom.

use crate::error::{Error, Result};
use crate::outcome::{Method, TestOutcome};
use crate::sample::{Group, Sample, Status};
use crate::stats::chi_square_1_upper;

/// Score, variance, and the derived test quantities from one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GrayRaw {
    /// Score U (group 1 minus its pooled expectation).
    pub score: f64,
    /// Influence-function variance estimate of the score.
    pub variance: f64,
    /// U^2 / V, or 0 when the variance is 0 (no information; U is then 0).
    pub statistic: f64,
    /// Upper tail of chi-square(1) at the statistic.
    pub p_value: f64,
}

/// Reusable buffers for [`gray_raw`]; one per thread in permutation loops.
#[derive(Debug, Default)]
pub(crate) struct GrayScratch {
    /// Pooled distinct event-of-interest times.
    grid: Vec<f64>,
    /// Event-of-interest counts per group at each grid time.
    dn1: [Vec<f64>; 2],
    /// R_1 / (R_1 + R_2) at each grid time.
    ebar: Vec<f64>,
    /// Pooled subdistribution-hazard increments dN_1./(R_1+R_2).
    dlambda: Vec<f64>,
    /// IPCW risk mass per group at each grid time (left limits).
    risk: [Vec<f64>; 2],
    /// Censoring-survival left limit G_g(t_k-) per group.
    gminus: [Vec<f64>; 2],
    /// Prefix sums of h_g * dLambda over the grid; length K+1.
    cum1: [Vec<f64>; 2],
    /// Prefix sums of h_g * G_g(t-) * dLambda over the grid; length K+1.
    cum2: [Vec<f64>; 2],
    /// Censoring risk-set size at each of the group's censoring times.
    c_yc: [Vec<f64>; 2],
    /// Censoring counts at each of the group's censoring times.
    c_dnc: [Vec<f64>; 2],
    /// Running sum of 1/G_g(X_i-) over competing-event subjects with
    /// X_i <= (censoring time).
    c_w2: [Vec<f64>; 2],
    /// Number of grid times <= each censoring time.
    c_gidx: [Vec<u32>; 2],
    /// B(s) = W2(s) * (tail of cum2 past s), per censoring time.
    cb: [Vec<f64>; 2],
    /// Prefix sums of B * dNc / Yc^2; length M+1.
    cumc: [Vec<f64>; 2],
    /// Per subject: number of grid times <= X_i.
    rec_k: Vec<u32>,
    /// Per subject: censoring-time prefix count for the psi compensator
    /// (inclusive of X_i for censored subjects, exclusive for events).
    rec_c: Vec<u32>,
    /// Per subject with a competing event: G_g(X_i-).
    rec_gpre: Vec<f64>,
}

impl GrayScratch {
    pub(crate) fn new() -> Self {
        GrayScratch::default()
    }
}

/// One evaluation of Gray's test on pre-sorted columns.
///
/// `times` must be ascending with the crate's tie order; each group must be
/// non-empty. Infallible: a sample without events of interest yields zero
/// score and variance, reported as statistic 0 with P = 1.
pub(crate) fn gray_raw(
    times: &[f64],
    statuses: &[Status],
    groups: &[Group],
    s: &mut GrayScratch,
) -> GrayRaw {
    let n = times.len();
    let mut n_group = [0.0f64; 2];
    for &g in groups {
        n_group[g.index()] += 1.0;
    }

    // Pass 1: pooled grid of distinct event-of-interest times with
    // per-group event counts.
    s.grid.clear();
    for g in 0..2 {
        s.dn1[g].clear();
    }
    let mut i = 0;
    while i < n {
        let t = times[i];
        let mut d = [0.0f64; 2];
        let mut j = i;
        while j < n && times[j] == t {
            if statuses[j] == Status::Interest {
                d[groups[j].index()] += 1.0;
            }
            j += 1;
        }
        if d[0] + d[1] > 0.0 {
            s.grid.push(t);
            s.dn1[0].push(d[0]);
            s.dn1[1].push(d[1]);
        }
        i = j;
    }
    let k_len = s.grid.len();

    // Pass 2: one walk over the pooled sample maintaining both groups'
    // product-limit states; records risk masses at grid times (left
    // limits) and the per-subject quantities the variance needs.
    let mut y = n_group; // at-risk counts
    let mut surv = [1.0f64; 2]; // all-cause Kaplan-Meier
    let mut gcens = [1.0f64; 2]; // censoring Kaplan-Meier
    let mut f1 = [0.0f64; 2]; // incidence of the event of interest
    let mut w2run = [0.0f64; 2]; // sum of 1/G(X_i-) over competing events
    let mut kptr = 0usize;

    for g in 0..2 {
        s.risk[g].clear();
        s.risk[g].resize(k_len, 0.0);
        s.gminus[g].clear();
        s.gminus[g].resize(k_len, 0.0);
        s.c_yc[g].clear();
        s.c_dnc[g].clear();
        s.c_w2[g].clear();
        s.c_gidx[g].clear();
    }
    s.rec_k.clear();
    s.rec_k.resize(n, 0);
    s.rec_c.clear();
    s.rec_c.resize(n, 0);
    s.rec_gpre.clear();
    s.rec_gpre.resize(n, 0.0);

    let record_grid =
        |kptr: usize, s: &mut GrayScratch, gcens: &[f64; 2], f1: &[f64; 2]| {
            for g in 0..2 {
                s.risk[g][kptr] = n_group[g] * gcens[g] * (1.0 - f1[g]);
                s.gminus[g][kptr] = gcens[g];
            }
        };

    let mut i = 0;
    while i < n {
        let t = times[i];
        // Grid times strictly before this block: record left limits.
        while kptr < k_len && s.grid[kptr] < t {
            record_grid(kptr, s, &gcens, &f1);
            kptr += 1;
        }
        if kptr < k_len && s.grid[kptr] == t {
            record_grid(kptr, s, &gcens, &f1);
            kptr += 1;
        }

        // Tied block: count events and censorings per group.
        let block_start = i;
        let mut d1 = [0.0f64; 2];
        let mut d2 = [0.0f64; 2];
        let mut dc = [0.0f64; 2];
        while i < n && times[i] == t {
            let g = groups[i].index();
            match statuses[i] {
                Status::Interest => d1[g] += 1.0,
                Status::Competing => d2[g] += 1.0,
                Status::Censored => dc[g] += 1.0,
            }
            i += 1;
        }

        // Per-subject stores, using state left limits at t.
        for j in block_start..i {
            let g = groups[j].index();
            s.rec_k[j] = kptr as u32;
            match statuses[j] {
                Status::Competing => {
                    s.rec_gpre[j] = gcens[g];
                    s.rec_c[j] = s.c_yc[g].len() as u32;
                }
                Status::Interest => {
                    s.rec_c[j] = s.c_yc[g].len() as u32;
                }
                Status::Censored => {
                    // Inclusive of this block's own censoring entry.
                    s.rec_c[j] = s.c_yc[g].len() as u32 + 1;
                }
            }
        }

        // State updates, events before censorings.
        for g in 0..2 {
            let de = d1[g] + d2[g];
            if de > 0.0 {
                f1[g] += surv[g] * d1[g] / y[g];
                w2run[g] += d2[g] / gcens[g];
                surv[g] *= 1.0 - de / y[g];
            }
            if dc[g] > 0.0 {
                let yc = y[g] - de;
                s.c_yc[g].push(yc);
                s.c_dnc[g].push(dc[g]);
                s.c_w2[g].push(w2run[g]);
                s.c_gidx[g].push(kptr as u32);
                gcens[g] *= 1.0 - dc[g] / yc;
            }
            y[g] -= de + dc[g];
        }
    }
    while kptr < k_len {
        record_grid(kptr, s, &gcens, &f1);
        kptr += 1;
    }

    // Pass 3: score and grid prefix sums.
    s.ebar.clear();
    s.ebar.resize(k_len, 0.0);
    s.dlambda.clear();
    s.dlambda.resize(k_len, 0.0);
    for g in 0..2 {
        s.cum1[g].clear();
        s.cum1[g].resize(k_len + 1, 0.0);
        s.cum2[g].clear();
        s.cum2[g].resize(k_len + 1, 0.0);
    }
    let mut score = 0.0;
    for k in 0..k_len {
        let r1 = s.risk[0][k];
        let rt = r1 + s.risk[1][k];
        // A grid time has an event, so someone is at risk; guard anyway.
        if rt <= 0.0 {
            for g in 0..2 {
                s.cum1[g][k + 1] = s.cum1[g][k];
                s.cum2[g][k + 1] = s.cum2[g][k];
            }
            continue;
        }
        let e = r1 / rt;
        let dl = (s.dn1[0][k] + s.dn1[1][k]) / rt;
        s.ebar[k] = e;
        s.dlambda[k] = dl;
        score += s.dn1[0][k] * (1.0 - e) - s.dn1[1][k] * e;
        for g in 0..2 {
            let h = if g == 0 { 1.0 - e } else { -e };
            s.cum1[g][k + 1] = s.cum1[g][k] + h * dl;
            s.cum2[g][k + 1] = s.cum2[g][k] + h * s.gminus[g][k] * dl;
        }
    }

    // Pass 4: censoring-time aggregates for the psi terms.
    for g in 0..2 {
        let m_len = s.c_yc[g].len();
        let cum2_total = s.cum2[g][k_len];
        s.cb[g].clear();
        s.cb[g].resize(m_len, 0.0);
        s.cumc[g].clear();
        s.cumc[g].resize(m_len + 1, 0.0);
        for m in 0..m_len {
            let tail = cum2_total - s.cum2[g][s.c_gidx[g][m] as usize];
            let b = s.c_w2[g][m] * tail;
            s.cb[g][m] = b;
            let yc = s.c_yc[g][m];
            s.cumc[g][m + 1] = s.cumc[g][m] + b * s.c_dnc[g][m] / (yc * yc);
        }
    }

    // Pass 5: per-subject influence terms.
    let mut variance = 0.0;
    for j in 0..n {
        let g = groups[j].index();
        let rk = s.rec_k[j] as usize;
        let mut eta = -s.cum1[g][rk];
        match statuses[j] {
            Status::Interest => {
                let e = s.ebar[rk - 1];
                eta += if g == 0 { 1.0 - e } else { -e };
            }
            Status::Competing => {
                eta -= (s.cum2[g][k_len] - s.cum2[g][rk]) / s.rec_gpre[j];
            }
            Status::Censored => {}
        }
        let rc = s.rec_c[j] as usize;
        let mut psi = -s.cumc[g][rc];
        if statuses[j] == Status::Censored {
            let m = rc - 1;
            psi += s.cb[g][m] / s.c_yc[g][m];
        }
        let inf = eta + psi;
        variance += inf * inf;
    }

    let (statistic, p_value) = if variance > 0.0 {
        let stat = score * score / variance;
        (stat, chi_square_1_upper(stat))
    } else {
        (0.0, 1.0)
    };
    GrayRaw { score, variance, statistic, p_value }
}

/// Gray's test comparing the two groups' cumulative incidence of the event
/// of interest. The restriction time plays no role here: the score uses
/// the whole observed time range.
pub fn gray_test(sample: &Sample) -> Result<TestOutcome> {
    if !sample.has_both_groups() {
        return Err(Error::InvalidInput("Gray's test needs both groups present".into()));
    }
    if !sample.statuses().contains(&Status::Interest) {
        return Err(Error::InvalidInput(
            "Gray's test needs at least one event of interest".into(),
        ));
    }
    let mut scratch = GrayScratch::new();
    let raw = gray_raw(sample.times(), sample.statuses(), sample.groups(), &mut scratch);
    Ok(TestOutcome::new(Method::Gray, raw.statistic, raw.p_value))
}
