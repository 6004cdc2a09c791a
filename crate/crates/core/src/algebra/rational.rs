//! Exact rational scalars.

use num_bigint::BigInt;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `1/n` for a nonzero integer.
pub fn recip(n: i64) -> Rational {
    ratio(1, n)
}
