//! Exact rational helpers shared by the certificates.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `(−1)^k` as a rational.
pub fn alternating(k: u32) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn binomial_q(n: u32, k: u32) -> Rational {
    Rational::from_integer(binomial(n, k))
}

/// `(2n)!! / (2n+1)!!`.
pub fn even_over_odd_double_factorial(n: u32) -> Rational {
    let mut acc = Rational::one();
    for k in 1..=n {
        acc *= frac(2 * k as i64, 2 * k as i64 + 1);
    }
    acc
}

/// `(2n)!! / (2n−1)!!`.
pub fn even_over_lower_odd_double_factorial(n: u32) -> Rational {
    let mut acc = Rational::one();
    for k in 1..=n {
        acc *= frac(2 * k as i64, 2 * k as i64 - 1);
    }
    acc
}

/// Correctly rounded conversion to `f64`.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Horner evaluation of `Σ coeffs[i] zⁱ`.
pub fn eval_poly(coeffs: &[Rational], z: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn lcm_of_denominators(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Multiplies two dense polynomials with integer coefficients.
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The exact value of a finite float; `None` for NaN and infinities.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}
