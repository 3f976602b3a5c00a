//! Chi-square goodness-of-fit against exact reference distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Outcome of a chi-square test of observed counts against the uniform
/// distribution on `counts.len()` cells.
#[derive(Debug, Clone)]
pub struct GofTest {
    pub statistic: f64,
    pub critical: f64,
    pub dof: u64,
    pub significance: f64,
    pub rejected: bool,
}

/// Tests uniformity of `counts` at the given significance level.
pub fn chi_square_uniform(counts: &[u64], significance: f64) -> GofTest {
    let cells = counts.len();
    assert!(cells >= 2, "need at least two cells");
    let trials: u64 = counts.iter().sum();
    let expected = trials as f64 / cells as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum();
    let dof = (cells - 1) as u64;
    let critical = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - significance);
    GofTest {
        statistic,
        critical,
        dof,
        significance,
        rejected: statistic > critical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts_pass() {
        let counts = vec![1000u64; 8];
        let t = chi_square_uniform(&counts, 1e-3);
        assert!(!t.rejected);
        assert_eq!(t.dof, 7);
    }

    #[test]
    fn skewed_counts_fail() {
        let mut counts = vec![1000u64; 8];
        counts[0] = 2000;
        let t = chi_square_uniform(&counts, 1e-3);
        assert!(t.rejected);
    }
}
