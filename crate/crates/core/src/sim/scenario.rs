//! Competing-risks event-time generators for the four benchmark designs.
//!
//! Every design fixes the two cumulative incidence functions analytically
//! and draws a subject in two exact steps: the event type from a Bernoulli
//! trial on the type-1 mass pi1 = I1(infinity), then the event time by
//! inverting the conditional distribution I_j(t) / I_j(infinity). No
//! acceptance-rejection or discretization is involved, so the empirical
//! incidence converges to the analytic target at the Monte Carlo rate.
//!
//! * `A` - null design: both groups share I1(t) = p1(1 - e^-t) and
//!   I2(t) = (1 - p1)(1 - e^-t); every conditional event time is Exp(1).
//! * `B` - proportional subdistribution hazards: group 2 tilts the group-1
//!   incidence by q = e^beta, I1(t) = 1 - [1 - p1(1 - e^-t)]^q and
//!   I2(t) = (1 - p1)^q (1 - e^-tq), the alternative Gray's test is built
//!   for.
//! * `C` - late difference: both incidences are Weibull-shaped in
//!   (t/2)^A with shape 2 up to the two-year break for both groups, then
//!   shapes 0.1 and 4.
//! * `D` - early difference: shapes 0.1 and 4 before the break, shape 2
//!   after.
//!
//! The piecewise designs stay continuous at the break because
//! (2/2)^A = 1 regardless of the shape, putting the conditional
//! probability of an event before the break at 1 - e^-1 in every arm.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{Group, Status};

/// Benchmark design for the two-group competing-risks generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Both groups identical (type-I-error design).
    A,
    /// Proportional subdistribution hazards between groups.
    B,
    /// Incidence curves separating after two years.
    C,
    /// Incidence curves separating before two years.
    D,
}

impl Scenario {
    /// Stable numeric tag for seed-stream coordinates.
    pub(crate) fn tag(self) -> u64 {
        match self {
            Scenario::A => 1,
            Scenario::B => 2,
            Scenario::C => 3,
            Scenario::D => 4,
        }
    }

    /// True when the design needs the proportional-hazards coefficient.
    pub fn needs_beta(self) -> bool {
        matches!(self, Scenario::B)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::C => "C",
            Scenario::D => "D",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scenario> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Scenario::A),
            "B" => Ok(Scenario::B),
            "C" => Ok(Scenario::C),
            "D" => Ok(Scenario::D),
            other => Err(Error::InvalidInput(format!("unknown scenario {other:?}"))),
        }
    }
}

/// The two-piece Weibull shapes (before, after) the two-year break.
fn weibull_shapes(scenario: Scenario, group: Group) -> (f64, f64) {
    match (scenario, group) {
        (Scenario::C, Group::One) => (2.0, 0.1),
        (Scenario::C, Group::Two) => (2.0, 4.0),
        (Scenario::D, Group::One) => (0.1, 2.0),
        (Scenario::D, Group::Two) => (4.0, 2.0),
        _ => unreachable!("shapes are defined for the piecewise designs only"),
    }
}

/// Probability that a subject's event is the event of interest.
pub(crate) fn interest_mass(scenario: Scenario, group: Group, p1: f64, q: f64) -> f64 {
    match (scenario, group) {
        (Scenario::B, Group::Two) => 1.0 - (1.0 - p1).powf(q),
        _ => p1,
    }
}

/// Inverse of the conditional event-time distribution at probability `u`.
fn inverse_event_time(
    scenario: Scenario,
    group: Group,
    p1: f64,
    q: f64,
    status: Status,
    u: f64,
) -> f64 {
    match (scenario, group) {
        // The exponential designs: every conditional law is Exp(1).
        (Scenario::A, _) | (Scenario::B, Group::One) => -(1.0 - u).ln(),
        (Scenario::B, Group::Two) => match status {
            // Invert u = {1 - [1 - p1(1 - e^-t)]^q} / pi1.
            Status::Interest => {
                let pi1 = interest_mass(scenario, group, p1, q);
                let base = (1.0 - u * pi1).powf(1.0 / q);
                -(1.0 - (1.0 - base) / p1).ln()
            }
            // The competing law is Exp(q) after normalization.
            Status::Competing => -(1.0 - u).ln() / q,
            Status::Censored => unreachable!("only event types have event times"),
        },
        // Both event types share the group's piecewise Weibull law.
        _ => {
            let (before, after) = weibull_shapes(scenario, group);
            let break_mass = 1.0 - (-1.0f64).exp();
            let shape = if u <= break_mass { before } else { after };
            2.0 * (-(1.0 - u).ln()).powf(1.0 / shape)
        }
    }
}

/// Draws one (event time, event type) pair for a subject of `group`.
///
/// `q` is the subdistribution-hazard ratio e^beta; it only matters for
/// group 2 of the proportional-hazards design. Zero times (probability
/// zero up to floating-point granularity) are redrawn so every record
/// satisfies the sample invariants.
pub(crate) fn draw_event(
    scenario: Scenario,
    group: Group,
    p1: f64,
    q: f64,
    rng: &mut impl Rng,
) -> (f64, Status) {
    let status = if rng.random::<f64>() < interest_mass(scenario, group, p1, q) {
        Status::Interest
    } else {
        Status::Competing
    };
    loop {
        let u: f64 = rng.random();
        let t = inverse_event_time(scenario, group, p1, q, status, u);
        if t > 0.0 {
            return (t, status);
        }
    }
}

/// Analytic cumulative incidence of the event of interest at `t`.
///
/// The exact target the generator draws from; exposed so simulated output
/// can be validated against it.
pub fn interest_cif(scenario: Scenario, group: Group, p1: f64, beta: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let q = beta.exp();
    match (scenario, group) {
        (Scenario::A, _) | (Scenario::B, Group::One) => p1 * (1.0 - (-t).exp()),
        (Scenario::B, Group::Two) => 1.0 - (1.0 - p1 * (1.0 - (-t).exp())).powf(q),
        _ => {
            let (before, after) = weibull_shapes(scenario, group);
            let shape = if t <= 2.0 { before } else { after };
            p1 * (1.0 - (-((t / 2.0).powf(shape))).exp())
        }
    }
}

/// Analytic cumulative incidence of the competing event at `t`.
pub fn competing_cif(scenario: Scenario, group: Group, p1: f64, beta: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let q = beta.exp();
    match (scenario, group) {
        (Scenario::A, _) | (Scenario::B, Group::One) => (1.0 - p1) * (1.0 - (-t).exp()),
        (Scenario::B, Group::Two) => (1.0 - p1).powf(q) * (1.0 - (-t * q).exp()),
        _ => {
            let (before, after) = weibull_shapes(scenario, group);
            let shape = if t <= 2.0 { before } else { after };
            (1.0 - p1) * (1.0 - (-((t / 2.0).powf(shape))).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::stream_rng;

    fn empirical_interest_cif(
        scenario: Scenario,
        group: Group,
        p1: f64,
        beta: f64,
        t: f64,
        draws: usize,
    ) -> f64 {
        let mut rng = stream_rng(314, &[scenario.tag(), group.code() as u64]);
        let q = beta.exp();
        let mut hits = 0usize;
        for _ in 0..draws {
            let (time, status) = draw_event(scenario, group, p1, q, &mut rng);
            if status == Status::Interest && time <= t {
                hits += 1;
            }
        }
        hits as f64 / draws as f64
    }

    #[test]
    fn interest_fraction_matches_the_type_mass() {
        let mut rng = stream_rng(7, &[1]);
        let mut interest = 0usize;
        let n = 10_000;
        for _ in 0..n {
            let (_, status) = draw_event(Scenario::A, Group::One, 0.7, 1.0, &mut rng);
            if status == Status::Interest {
                interest += 1;
            }
        }
        let frac = interest as f64 / n as f64;
        assert!((frac - 0.7).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn empirical_incidence_matches_the_analytic_curve() {
        let cases = [
            (Scenario::A, Group::One, 0.0),
            (Scenario::A, Group::Two, 0.0),
            (Scenario::B, Group::Two, 0.5),
            (Scenario::C, Group::One, 0.0),
            (Scenario::C, Group::Two, 0.0),
            (Scenario::D, Group::One, 0.0),
            (Scenario::D, Group::Two, 0.0),
        ];
        for (scenario, group, beta) in cases {
            for t in [0.5, 1.0, 2.0, 4.0] {
                let analytic = interest_cif(scenario, group, 0.7, beta, t);
                let empirical =
                    empirical_interest_cif(scenario, group, 0.7, beta, t, 100_000);
                assert!(
                    (analytic - empirical).abs() < 0.01,
                    "{scenario} group {} t={t}: analytic {analytic}, empirical {empirical}",
                    group.code()
                );
            }
        }
    }

    #[test]
    fn piecewise_designs_agree_at_the_break() {
        // (2/2)^A = 1 for every shape, so the incidence at t = 2 is
        // p1(1 - e^-1) in all four piecewise arms.
        let expected = 0.7 * (1.0 - (-1.0f64).exp());
        for scenario in [Scenario::C, Scenario::D] {
            for group in Group::BOTH {
                let v = interest_cif(scenario, group, 0.7, 0.0, 2.0);
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_beta_collapses_group_two_to_group_one() {
        // q = 1 makes both incidence formulas reduce to the null design;
        // compare the analytic curves and a two-sample KS distance.
        for t in [0.3, 1.0, 2.5] {
            let g1 = interest_cif(Scenario::B, Group::One, 0.7, 0.0, t);
            let g2 = interest_cif(Scenario::B, Group::Two, 0.7, 0.0, t);
            assert!((g1 - g2).abs() < 1e-12);
        }
        let n = 10_000;
        let mut rng = stream_rng(11, &[2]);
        let mut a: Vec<f64> = (0..n)
            .map(|_| draw_event(Scenario::B, Group::One, 0.7, 1.0, &mut rng).0)
            .collect();
        let mut b: Vec<f64> = (0..n)
            .map(|_| draw_event(Scenario::B, Group::Two, 0.7, 1.0, &mut rng).0)
            .collect();
        a.sort_unstable_by(f64::total_cmp);
        b.sort_unstable_by(f64::total_cmp);
        // Two-sample KS statistic by merge walk.
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / n as f64 - j as f64 / n as f64).abs());
        }
        // 1% critical value c(alpha)*sqrt(2/n) with c(0.01) = 1.628.
        let crit = 1.628 * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS distance {d} exceeds {crit}");
    }

    #[test]
    fn competing_and_interest_masses_are_complementary() {
        for (scenario, beta) in
            [(Scenario::A, 0.0), (Scenario::B, 0.7), (Scenario::C, 0.0), (Scenario::D, 0.0)]
        {
            for group in Group::BOTH {
                // Far out enough that even the shape-0.1 piece, whose tail
                // decays like exp(-(t/2)^0.1), has exhausted its mass.
                let total = interest_cif(scenario, group, 0.7, beta, 1e15)
                    + competing_cif(scenario, group, 0.7, beta, 1e15);
                assert!((total - 1.0).abs() < 1e-9, "{scenario}: {total}");
            }
        }
    }

    #[test]
    fn scenario_parsing_round_trips() {
        for s in [Scenario::A, Scenario::B, Scenario::C, Scenario::D] {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert!("E".parse::<Scenario>().is_err());
        assert_eq!("b".parse::<Scenario>().unwrap(), Scenario::B);
    }
}
