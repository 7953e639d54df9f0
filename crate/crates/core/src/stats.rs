//! Reference-distribution helpers shared by the tests.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

/// Two-sided P-value of a standard-normal statistic.
pub(crate) fn two_sided_normal_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub(crate) fn chi_square_1_upper(x: f64) -> f64 {
    // X = Z^2 for standard normal Z: P(X > x) = erfc(sqrt(x/2)).
    erfc((x / 2.0).sqrt())
}

/// Standard-normal quantile.
pub(crate) fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_tail_matches_known_values() {
        assert!((two_sided_normal_p(0.0) - 1.0).abs() < 1e-15);
        assert!((two_sided_normal_p(1.959963984540054) - 0.05).abs() < 1e-9);
        assert!((two_sided_normal_p(-1.959963984540054) - 0.05).abs() < 1e-9);
    }

    #[test]
    fn chi_square_matches_squared_normal() {
        for z in [0.3, 1.0, 2.2, 3.4] {
            assert!((chi_square_1_upper(z * z) - two_sided_normal_p(z)).abs() < 1e-14);
        }
    }

    #[test]
    fn quantile_inverts_the_tail() {
        let q = normal_quantile(0.975);
        assert!((q - 1.959963984540054).abs() < 1e-9);
    }
}
