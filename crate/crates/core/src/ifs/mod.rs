//! Two-map affine IFS on the line, digit words, and their exact evaluation.

mod enclosure;
mod eval;
mod word;

pub use enclosure::{AddressPoint, AddressSource, Enclosure, EnclosureSource, InsufficientDepth};
pub use eval::SymbolicForm;
pub use word::{Letter, ParseWordError, TailWord, Word};

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IfsError {
    #[error("contraction rate {num}/{den} must satisfy 0 < num < den with gcd(num, den) = 1")]
    InvalidRate { num: u64, den: u64 },
    #[error("a tail word needs a nonempty period")]
    EmptyPeriod,
}

/// `x -> (num/den) x + shift` with `0 < num < den` coprime.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap<T> {
    rate_num: u64,
    rate_den: u64,
    shift: T,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(rate_num: u64, rate_den: u64, shift: T) -> Result<Self, IfsError> {
        if rate_num == 0 || rate_num >= rate_den || rate_num.gcd(&rate_den) != 1 {
            return Err(IfsError::InvalidRate {
                num: rate_num,
                den: rate_den,
            });
        }
        Ok(AffineMap {
            rate_num,
            rate_den,
            shift,
        })
    }

    /// `x/b + shift`.
    pub fn reciprocal(b: u64, shift: T) -> Result<Self, IfsError> {
        Self::new(1, b, shift)
    }

    pub fn rate_num(&self) -> u64 {
        self.rate_num
    }

    pub fn rate_den(&self) -> u64 {
        self.rate_den
    }

    pub fn shift(&self) -> &T {
        &self.shift
    }

    pub fn rate(&self) -> T {
        T::from_ratio(self.rate_num, self.rate_den)
    }

    pub fn apply(&self, x: &T) -> T {
        self.rate() * x.clone() + self.shift.clone()
    }

    /// `shift / (1 - rate)`.
    pub fn fixed_point(&self) -> T {
        self.shift.clone() * T::from_u64_exact(self.rate_den)
            / T::from_u64_exact(self.rate_den - self.rate_num)
    }

    /// Same map over another scalar type.
    pub fn map_scalar<U: Scalar>(&self, convert: impl Fn(&T) -> U) -> AffineMap<U> {
        AffineMap {
            rate_num: self.rate_num,
            rate_den: self.rate_den,
            shift: convert(&self.shift),
        }
    }
}

impl AffineMap<Rational> {
    /// `(r, s)` with `shift = r/s` reduced.
    pub fn shift_parts(&self) -> (&BigInt, &BigInt) {
        (self.shift.numer(), self.shift.denom())
    }
}

/// Outcome of the non-degeneracy check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    Ok,
    /// Both maps share their fixed point; the attractor is a singleton.
    Degenerate,
}

/// The pair `(f, g)`; digit `F` reads `f`, digit `G` reads `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsPair<T> {
    pub f: AffineMap<T>,
    pub g: AffineMap<T>,
}

impl<T: Scalar> IfsPair<T> {
    pub fn new(f: AffineMap<T>, g: AffineMap<T>) -> Self {
        IfsPair { f, g }
    }

    pub fn map(&self, letter: Letter) -> &AffineMap<T> {
        match letter {
            Letter::F => &self.f,
            Letter::G => &self.g,
        }
    }

    /// Ok iff the two fixed points differ.
    pub fn validate(&self) -> PairStatus {
        if self.f.fixed_point() == self.g.fixed_point() {
            PairStatus::Degenerate
        } else {
            PairStatus::Ok
        }
    }

    pub fn map_scalar<U: Scalar>(&self, convert: impl Fn(&T) -> U + Copy) -> IfsPair<U> {
        IfsPair {
            f: self.f.map_scalar(convert),
            g: self.g.map_scalar(convert),
        }
    }
}

impl IfsPair<Rational> {
    /// `(b1, b2)`, the contraction denominators.
    pub fn bases(&self) -> (u64, u64) {
        (self.f.rate_den, self.g.rate_den)
    }

    /// `(s1, s2)`, the reduced shift denominators.
    pub fn shift_denominators(&self) -> (BigInt, BigInt) {
        (self.f.shift.denom().clone(), self.g.shift.denom().clone())
    }

    /// True when both contraction numerators are 1.
    pub fn is_reciprocal(&self) -> bool {
        self.f.rate_num == 1 && self.g.rate_num == 1
    }

    pub fn to_f64(&self) -> IfsPair<f64> {
        use num_traits::ToPrimitive;
        self.map_scalar(|x: &Rational| x.to_f64().unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    pub(crate) fn cantor() -> IfsPair<Rational> {
        IfsPair::new(
            AffineMap::reciprocal(3, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        )
    }

    #[test]
    fn fixed_points() {
        let c = cantor();
        assert_eq!(c.f.fixed_point(), ratio(0, 1));
        assert_eq!(c.g.fixed_point(), ratio(1, 1));
        let h = AffineMap::reciprocal(2, ratio(1, 4)).unwrap();
        assert_eq!(h.fixed_point(), ratio(1, 2));
    }

    #[test]
    fn validate_examples() {
        assert_eq!(cantor().validate(), PairStatus::Ok);
        let degenerate = IfsPair::new(
            AffineMap::reciprocal(2, ratio(1, 2)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        );
        assert_eq!(degenerate.validate(), PairStatus::Degenerate);
        let ok = IfsPair::new(
            AffineMap::reciprocal(2, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(1, 4)).unwrap(),
        );
        assert_eq!(ok.validate(), PairStatus::Ok);
        assert_eq!(ok.g.fixed_point(), ratio(3, 8));
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(AffineMap::new(0, 3, ratio(0, 1)).is_err());
        assert!(AffineMap::new(3, 3, ratio(0, 1)).is_err());
        assert!(AffineMap::new(2, 4, ratio(0, 1)).is_err());
        assert!(AffineMap::new(2, 5, ratio(0, 1)).is_ok());
    }

    #[test]
    fn float_pair_agrees_on_fixed_points() {
        let c = cantor().to_f64();
        assert_eq!(c.g.fixed_point(), 1.0);
        assert_eq!(c.validate(), PairStatus::Ok);
    }
}
