//! Exact rational arithmetic helpers and the elementary number theory the
//! divisibility lemmas rest on: p-adic valuations, radicals, integer
//! logarithms and root brackets.
//!
//! The rational scalar itself is [`num_rational::BigRational`], which keeps
//! every value reduced with a positive denominator.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// A p-adic valuation; `Infinity` is reserved for the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorisation by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Multiplicity of `p` in a nonzero unsigned integer. `p` must be at least 2.
///
/// Divides by repeated squares of `p` so large multiplicities cost
/// O(log v) big divisions.
pub(crate) fn multiplicity(p: &BigUint, n: &BigUint) -> u64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut total = 0u64;
    // powers[i] = p^(2^i)
    let mut powers = vec![p.clone()];
    loop {
        let last = powers.last().unwrap();
        let (q, r) = n.div_rem(last);
        if !r.is_zero() {
            break;
        }
        n = q;
        total += 1u64 << (powers.len() - 1);
        let sq = last * last;
        if sq.bits() > n.bits() {
            break;
        }
        powers.push(sq);
    }
    for (i, pw) in powers.iter().enumerate().rev() {
        loop {
            let (q, r) = n.div_rem(pw);
            if !r.is_zero() {
                break;
            }
            n = q;
            total += 1u64 << i;
        }
    }
    total
}

/// Valuation of an integer at a prime the caller vouches for.
pub(crate) fn vp_int_trusted(p: u64, n: &BigInt) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinity;
    }
    let v = multiplicity(&BigUint::from(p), n.magnitude());
    Valuation::Finite(v as i64)
}

/// Valuation of a rational at a prime the caller vouches for.
pub(crate) fn vp_trusted(p: u64, x: &Rational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let pb = BigUint::from(p);
    let num = multiplicity(&pb, x.numer().magnitude()) as i64;
    let den = multiplicity(&pb, x.denom().magnitude()) as i64;
    Valuation::Finite(num - den)
}

/// The p-adic valuation `v_p(x)`: negative when `p` divides the denominator,
/// `Infinity` exactly for `x = 0`.
pub fn vp(p: u64, x: &Rational) -> Result<Valuation, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::InvalidPrime(p));
    }
    Ok(vp_trusted(p, x))
}

/// `v_p(e1 + e2)`, computed directly. When the two valuations differ it
/// equals their minimum.
pub fn vp_sum_rule(p: u64, e1: &Rational, e2: &Rational) -> Result<Valuation, ArithError> {
    vp(p, &(e1 + e2))
}

/// Product of the distinct prime divisors of `n`; `radical(1) = 1`.
pub fn radical(n: i64) -> Result<u64, ArithError> {
    if n <= 0 {
        return Err(ArithError::InvalidArgument(format!(
            "radical needs a positive integer, got {n}"
        )));
    }
    Ok(prime_divisors(n as u64).into_iter().product())
}

/// Largest prime multiplicity in `n` (0 for `n = 1`).
pub fn max_multiplicity(n: u64) -> u32 {
    factorize(n).into_iter().map(|(_, e)| e).max().unwrap_or(0)
}

pub fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int_ratio(n: BigInt) -> Rational {
    BigRational::from_integer(n)
}

pub fn pow_u(base: u64, exp: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Does `d` divide `n`? (`d` nonzero)
pub fn divides(d: &BigInt, n: &BigInt) -> bool {
    n.is_multiple_of(d)
}

/// `b^e` as a rational, for any integer exponent.
pub fn pow_rational(base: u64, exp: i64) -> Rational {
    let p = pow_u(base, exp.unsigned_abs());
    if exp >= 0 {
        int_ratio(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Largest integer `e` with `base^e <= x`, for `x > 0` and `base >= 2`.
pub fn floor_log(base: u64, x: &Rational) -> Result<i64, ArithError> {
    if base < 2 {
        return Err(ArithError::InvalidArgument(format!("log base {base} < 2")));
    }
    if !x.is_positive() {
        return Err(ArithError::InvalidArgument("log of a nonpositive value".into()));
    }
    let le = |e: i64| -> bool {
        // base^e <= n/d
        let (n, d) = (x.numer(), x.denom());
        if e >= 0 {
            pow_u(base, e as u64) * d <= *n
        } else {
            d.clone() <= n * pow_u(base, e.unsigned_abs())
        }
    };
    let approx = (x.numer().bits() as f64 - x.denom().bits() as f64) / (base as f64).log2();
    let mut e = approx.floor() as i64;
    while !le(e) {
        e -= 1;
    }
    while le(e + 1) {
        e += 1;
    }
    Ok(e)
}

/// Certified bracket `[lo, hi]` of `x^(1/m)` for a nonnegative integer `x`,
/// with `hi - lo = 2^-frac_bits`.
pub fn root_bracket(x: &BigUint, m: u32, frac_bits: u32) -> (Rational, Rational) {
    let scaled = x << (frac_bits as usize * m as usize);
    let r = scaled.nth_root(m);
    let exact = num_traits::pow(r.clone(), m as usize) == scaled;
    let den = BigInt::one() << frac_bits as usize;
    let lo = BigRational::new(BigInt::from(r.clone()), den.clone());
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(BigInt::from(r + 1u32), den)
    };
    (lo, hi)
}

/// Floor of a rational.
pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Ceiling of a rational.
pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Lower and upper bounds on `log2(x)` for positive `x`, as `f64`.
///
/// Uses the top 64 bits of numerator and denominator; the result is widened
/// by a relative margin far above the rounding error of `f64::log2`.
pub fn log2_bounds(x: &Rational) -> (f64, f64) {
    assert!(x.is_positive(), "log2 of a nonpositive value");
    let (n_lo, n_hi) = log2_int_bounds(x.numer().magnitude());
    let (d_lo, d_hi) = log2_int_bounds(x.denom().magnitude());
    (n_lo - d_hi, n_hi - d_lo)
}

fn log2_int_bounds(n: &BigUint) -> (f64, f64) {
    let bits = n.bits();
    const MARGIN: f64 = 1e-12;
    if bits <= 64 {
        let v = n.to_u64().unwrap() as f64;
        let l = v.log2();
        return (l - MARGIN * (1.0 + l.abs()), l + MARGIN * (1.0 + l.abs()));
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift as usize;
    let top = top.to_u64().unwrap();
    // n lies in [top, top + 1) * 2^shift
    let lo = (top as f64).log2() + shift as f64;
    let hi = ((top as f64) + 1.0).log2() + shift as f64;
    (lo - MARGIN * lo.abs(), hi + MARGIN * hi.abs())
}

/// Natural-log midpoint estimate, for advisory float renderings.
pub fn ln_estimate(x: &Rational) -> f64 {
    let (lo, hi) = log2_bounds(x);
    0.5 * (lo + hi) * std::f64::consts::LN_2
}

/// `x` as a decimal string with `digits` fractional digits, truncated toward
/// zero. Used for advisory renderings only.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let neg = x.is_negative();
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = (x.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let mut s = String::new();
    if neg && !(int.is_zero() && frac.is_zero()) {
        s.push('-');
    }
    s.push_str(&int.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", frac.to_string(), width = digits));
    }
    s
}

/// Exact rational from an `f64` (finite values only).
pub fn from_f64(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn vp_examples() {
        assert_eq!(vp(2, &r(8, 1)).unwrap(), Valuation::Finite(3));
        assert_eq!(vp(3, &r(2, 9)).unwrap(), Valuation::Finite(-2));
        assert_eq!(vp(5, &r(0, 1)).unwrap(), Valuation::Infinity);
    }

    #[test]
    fn vp_rejects_composite() {
        assert_eq!(vp(6, &r(1, 1)), Err(ArithError::InvalidPrime(6)));
        assert_eq!(vp(1, &r(1, 1)), Err(ArithError::InvalidPrime(1)));
    }

    #[test]
    fn vp_large_multiplicity() {
        let x = int_ratio(pow_u(3, 12_345) * BigInt::from(7));
        assert_eq!(vp(3, &x).unwrap(), Valuation::Finite(12_345));
        let y = BigRational::new(BigInt::from(5), pow_u(2, 1000));
        assert_eq!(vp(2, &y).unwrap(), Valuation::Finite(-1000));
    }

    #[test]
    fn radical_examples() {
        assert_eq!(radical(12).unwrap(), 6);
        assert_eq!(radical(1).unwrap(), 1);
        assert_eq!(radical(360).unwrap(), 30);
        assert!(radical(0).is_err());
        assert!(radical(-4).is_err());
    }

    #[test]
    fn sum_rule_examples() {
        assert_eq!(vp_sum_rule(3, &r(1, 3), &r(1, 9)).unwrap(), Valuation::Finite(-2));
        assert_eq!(vp_sum_rule(2, &r(1, 2), &r(1, 2)).unwrap(), Valuation::Finite(0));
        assert_eq!(vp_sum_rule(5, &r(2, 5), &r(3, 5)).unwrap(), Valuation::Finite(0));
    }

    #[test]
    fn valuation_order() {
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinity);
        assert_eq!(
            Valuation::Finite(-3).min(Valuation::Finite(2)),
            Valuation::Finite(-3)
        );
    }

    #[test]
    fn floor_log_exact_and_negative() {
        assert_eq!(floor_log(3, &r(81, 1)).unwrap(), 4);
        assert_eq!(floor_log(3, &r(80, 1)).unwrap(), 3);
        assert_eq!(floor_log(3, &r(1, 9)).unwrap(), -2);
        assert_eq!(floor_log(3, &r(1, 10)).unwrap(), -3);
        // 3^19 / 1000 lies in [3^12, 3^13)
        let x = BigRational::new(pow_u(3, 19), BigInt::from(1000));
        assert_eq!(floor_log(3, &x).unwrap(), 12);
        assert!(floor_log(1, &r(2, 1)).is_err());
        assert!(floor_log(2, &r(0, 1)).is_err());
    }

    #[test]
    fn root_bracket_contains_root() {
        let (lo, hi) = root_bracket(&BigUint::from(27u32), 3, 16);
        assert_eq!(lo, r(3, 1));
        assert_eq!(hi, r(3, 1));
        let (lo, hi) = root_bracket(&BigUint::from(10u32), 3, 20);
        assert!(&lo * &lo * &lo <= r(10, 1));
        assert!(&hi * &hi * &hi > r(10, 1));
    }

    #[test]
    fn floor_ceil() {
        assert_eq!(floor(&r(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&r(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil(&r(7, 2)), BigInt::from(4));
        assert_eq!(floor(&r(6, 2)), BigInt::from(3));
    }

    #[test]
    fn log2_bounds_bracket() {
        let x = BigRational::new(BigInt::one(), pow_u(3, 4000));
        let (lo, hi) = log2_bounds(&x);
        let exact = -4000.0 * 3f64.log2();
        assert!(lo <= exact && exact <= hi);
        assert!(hi - lo < 1e-6);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&r(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&r(-5, 2), 2), "-2.50");
    }
}
