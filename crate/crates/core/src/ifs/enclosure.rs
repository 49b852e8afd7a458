use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{IfsPair, Word};
use crate::arith::{big, to_decimal};
use crate::{Ifs, Rational, Scalar};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Enclosure<T> {
    /// `None` if `lo > hi`.
    pub fn new(lo: T, hi: T) -> Option<Self> {
        (lo <= hi).then_some(Enclosure { lo, hi })
    }

    pub fn point(x: T) -> Self {
        Enclosure {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn around(center: T, half_width: T) -> Self {
        let h = half_width.abs();
        Enclosure {
            lo: center.clone() - h.clone(),
            hi: center + h,
        }
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + self.hi.clone()) / T::from_u64_exact(2)
    }

    pub fn contains(&self, x: &T) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        Enclosure::new(lo.clone(), hi.clone())
    }
}

impl Enclosure<Rational> {
    pub fn scale(&self, q: u64) -> Self {
        let q = Rational::from_integer(big(q));
        Enclosure {
            lo: &self.lo * &q,
            hi: &self.hi * &q,
        }
    }

    pub fn display(&self, digits: usize) -> String {
        format!("[{}, {}]", to_decimal(&self.lo, digits), to_decimal(&self.hi, digits))
    }
}

impl<T: Scalar> IfsPair<T> {
    /// Interval holding `prefix · (any tail)`, centred on `prefix(fix g)`.
    ///
    /// Certified only for exact scalars; with floats it is a preview.
    pub fn prefix_hull(&self, prefix: &Word) -> Enclosure<T> {
        let center = self.compose(prefix, &self.g.fixed_point());
        Enclosure::around(center, self.contraction_factor(prefix) * self.diameter_bound())
    }
}

impl IfsPair<Rational> {
    /// Certified enclosure of every point whose address starts with `prefix`.
    pub fn enclose_prefix(&self, prefix: &Word) -> Enclosure<Rational> {
        let center = self.apply_word(prefix, &self.g.fixed_point());
        Enclosure::around(center, self.prefix_half_width(prefix))
    }

    /// Half-width of `enclose_prefix(prefix)` without evaluating the word.
    pub fn prefix_half_width(&self, prefix: &Word) -> Rational {
        self.contraction_exact(prefix) * self.diameter_bound()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("enclosure of width {target} not reachable (best available width {best})")]
pub struct InsufficientDepth {
    pub target: Rational,
    pub best: Rational,
}

/// Anything that can hand out certified enclosures of a real number.
pub trait EnclosureSource: Send + Sync {
    /// An enclosure of width at most `target_width`.
    fn enclose(&self, target_width: &Rational) -> Result<Enclosure<Rational>, InsufficientDepth>;

    /// The exact value, when the source is a known rational.
    fn exact_value(&self) -> Option<Rational> {
        None
    }
}

impl EnclosureSource for Rational {
    fn enclose(&self, _target_width: &Rational) -> Result<Enclosure<Rational>, InsufficientDepth> {
        Ok(Enclosure::point(self.clone()))
    }

    fn exact_value(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl<S: EnclosureSource + ?Sized> EnclosureSource for Box<S> {
    fn enclose(&self, target_width: &Rational) -> Result<Enclosure<Rational>, InsufficientDepth> {
        (**self).enclose(target_width)
    }

    fn exact_value(&self) -> Option<Rational> {
        (**self).exact_value()
    }
}

/// Growing prefixes of an address: `prefix(i)` extends `prefix(i - 1)`.
pub trait AddressSource: Send + Sync {
    /// `None` once the source has no deeper data.
    fn prefix(&self, level: usize) -> Option<Word>;
}

/// A point of the attractor given by its address.
#[derive(Debug, Clone)]
pub struct AddressPoint<A> {
    pub ifs: Ifs,
    pub address: A,
}

/// Guard against sources that never run dry but also never contract.
const MAX_LEVELS: usize = 1 << 16;

impl<A: AddressSource> AddressPoint<A> {
    pub fn new(ifs: Ifs, address: A) -> Self {
        AddressPoint { ifs, address }
    }

    /// Shallowest level whose prefix meets `target_width`.
    pub fn level_for(&self, target_width: &Rational) -> Result<(usize, Word), InsufficientDepth> {
        let mut best = None;
        for level in 0..MAX_LEVELS {
            let Some(w) = self.address.prefix(level) else {
                break;
            };
            let width = self.ifs.prefix_half_width(&w) * Rational::from_integer(big(2));
            if width <= *target_width {
                return Ok((level, w));
            }
            best = Some(width);
        }
        Err(InsufficientDepth {
            target: target_width.clone(),
            best: best.unwrap_or_else(|| self.ifs.diameter_bound() * Rational::from_integer(big(2))),
        })
    }
}

impl<A: AddressSource> EnclosureSource for AddressPoint<A> {
    fn enclose(&self, target_width: &Rational) -> Result<Enclosure<Rational>, InsufficientDepth> {
        if !target_width.is_positive() && !target_width.is_zero() {
            return Err(InsufficientDepth {
                target: target_width.clone(),
                best: Rational::zero(),
            });
        }
        let (_, w) = self.level_for(target_width)?;
        Ok(self.ifs.enclose_prefix(&w))
    }
}
