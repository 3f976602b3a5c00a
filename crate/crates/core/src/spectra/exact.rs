//! Exact rational arithmetic for proportions, indices and expectations.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Arbitrary-precision rational in reduced form with positive denominator.
pub type ExactFraction = BigRational;

/// `num/den` as an exact fraction.
pub fn frac(num: u64, den: u64) -> ExactFraction {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Ratio of two arbitrary-precision counts.
pub fn frac_of_counts(num: &BigUint, den: &BigUint) -> ExactFraction {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// Canonical `num/den` string (denominator always present, reduced form).
pub fn frac_string(x: &ExactFraction) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Nearest f64, for display next to exact values.
pub fn frac_to_f64(x: &ExactFraction) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact mean of a list of counts.
pub fn mean_of_counts(values: &[u64]) -> ExactFraction {
    if values.is_empty() {
        return BigRational::zero();
    }
    let sum: u128 = values.iter().map(|&v| v as u128).sum();
    BigRational::new(BigInt::from(sum), BigInt::from(values.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_reduce() {
        assert_eq!(frac(2, 8), frac(1, 4));
        assert_eq!(frac_string(&frac(2, 8)), "1/4");
        assert_eq!(frac_string(&frac(3, 1)), "3/1");
    }

    #[test]
    fn means() {
        assert_eq!(mean_of_counts(&[1, 2, 3]), frac(2, 1));
        assert_eq!(mean_of_counts(&[1, 2]), frac(3, 2));
        assert!(mean_of_counts(&[]).is_zero());
    }
}
