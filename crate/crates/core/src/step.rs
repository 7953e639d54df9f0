//! Right-continuous step functions and their exact integrals.
//!
//! Survival curves and cumulative incidence functions are step functions, so
//! every integral this crate needs (restricted means, their variance
//! moments) has a closed form: a sum over constant pieces. No quadrature is
//! used anywhere.

use crate::error::{Error, Result};

/// A right-continuous step function on `[0, ∞)`.
///
/// The function equals `value_at_zero` on `[0, knots[0])` and `values[i]` on
/// `[knots[i], knots[i+1])`, with the last value extending to infinity.
/// Knots are strictly increasing and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    value_at_zero: f64,
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(value_at_zero: f64, knots: Vec<f64>, values: Vec<f64>) -> Result<StepFunction> {
        if knots.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "step function has {} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if !value_at_zero.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("step function values must be finite".into()));
        }
        if knots.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidInput("step function knots must be positive".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("step function knots must be strictly increasing".into()));
        }
        Ok(StepFunction { value_at_zero, knots, values })
    }

    /// The constant function `value` on `[0, ∞)`.
    pub fn constant(value: f64) -> StepFunction {
        StepFunction { value_at_zero: value, knots: Vec::new(), values: Vec::new() }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on the final piece.
    pub fn last_value(&self) -> f64 {
        *self.values.last().unwrap_or(&self.value_at_zero)
    }

    /// `f(t)` (right-continuous evaluation).
    pub fn value_at(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k <= t) {
            0 => self.value_at_zero,
            i => self.values[i - 1],
        }
    }

    /// `f(t-)`, the left limit.
    pub fn left_limit(&self, t: f64) -> f64 {
        match self.knots.partition_point(|&k| k < t) {
            0 => self.value_at_zero,
            i => self.values[i - 1],
        }
    }

    /// `∫_0^tau f(t) dt`, exact.
    pub fn integral_to(&self, tau: f64) -> f64 {
        self.piece_sum(tau, |a, b, v| v * (b - a))
    }

    /// `∫_0^tau t·f(t) dt`, exact.
    pub fn moment_integral_to(&self, tau: f64) -> f64 {
        self.piece_sum(tau, |a, b, v| v * (b * b - a * a) / 2.0)
    }

    fn piece_sum(&self, tau: f64, piece: impl Fn(f64, f64, f64) -> f64) -> f64 {
        debug_assert!(tau.is_finite() && tau >= 0.0);
        let mut acc = 0.0;
        let mut start = 0.0;
        let mut value = self.value_at_zero;
        for (i, &t) in self.knots.iter().enumerate() {
            if t >= tau {
                break;
            }
            acc += piece(start, t, value);
            start = t;
            value = self.values[i];
        }
        if tau > start {
            acc += piece(start, tau, value);
        }
        acc
    }

    /// Pointwise sum of two step functions (knot union).
    pub fn sum(&self, other: &StepFunction) -> StepFunction {
        let mut knots = Vec::with_capacity(self.knots.len() + other.knots.len());
        let (mut i, mut j) = (0, 0);
        while i < self.knots.len() || j < other.knots.len() {
            let t = match (self.knots.get(i), other.knots.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            knots.push(t);
        }
        let values = knots.iter().map(|&t| self.value_at(t) + other.value_at(t)).collect();
        StepFunction {
            value_at_zero: self.value_at_zero + other.value_at_zero,
            knots,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_pieces_and_limits() {
        let f = StepFunction::new(1.0, vec![1.0, 3.0], vec![0.75, 0.25]).unwrap();
        assert_eq!(f.value_at(0.0), 1.0);
        assert_eq!(f.value_at(1.0), 0.75);
        assert_eq!(f.left_limit(1.0), 1.0);
        assert_eq!(f.value_at(2.9), 0.75);
        assert_eq!(f.value_at(3.0), 0.25);
        assert_eq!(f.left_limit(3.0), 0.75);
        assert_eq!(f.value_at(100.0), 0.25);
        assert_eq!(f.last_value(), 0.25);
    }

    #[test]
    fn integrates_exactly() {
        // 0 on [0,1), 1 on [1,∞): ∫_0^3 = 2, ∫_0^3 t f = (9-1)/2 = 4.
        let f = StepFunction::new(0.0, vec![1.0], vec![1.0]).unwrap();
        assert_eq!(f.integral_to(3.0), 2.0);
        assert_eq!(f.moment_integral_to(3.0), 4.0);
        // Truncation before, at, and after the knot.
        assert_eq!(f.integral_to(0.5), 0.0);
        assert_eq!(f.integral_to(1.0), 0.0);
        assert_eq!(f.integral_to(1.5), 0.5);
    }

    #[test]
    fn sums_with_merged_knots() {
        let f = StepFunction::new(0.0, vec![1.0, 4.0], vec![0.25, 0.5]).unwrap();
        let g = StepFunction::new(0.0, vec![2.0, 4.0], vec![0.5, 0.75]).unwrap();
        let s = f.sum(&g);
        assert_eq!(s.knots(), &[1.0, 2.0, 4.0]);
        assert_eq!(s.value_at(0.5), 0.0);
        assert_eq!(s.value_at(1.5), 0.25);
        assert_eq!(s.value_at(2.5), 0.75);
        assert_eq!(s.value_at(5.0), 1.25);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(StepFunction::new(1.0, vec![1.0, 1.0], vec![0.5, 0.25]).is_err());
        assert!(StepFunction::new(1.0, vec![0.0], vec![0.5]).is_err());
        assert!(StepFunction::new(1.0, vec![1.0], vec![]).is_err());
    }
}
