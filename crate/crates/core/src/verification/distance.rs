use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::VerifyError;
use crate::arith::{floor, root_bracket};
use crate::ifs::{Enclosure, EnclosureSource};
use crate::Rational;

/// Bracket of `‖y‖` for every `y` in `[a, b]`.
fn interval_dist(a: &Rational, b: &Rational) -> (Rational, Rational) {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let dist = |y: &Rational| {
        let frac = y - Rational::from_integer(floor(y));
        if frac > half {
            Rational::one() - frac
        } else {
            frac
        }
    };
    let (da, db) = (dist(a), dist(b));
    let contains_integer = floor(b) > floor(a) || dist(a).is_zero();
    let shifted_a = a - &half;
    let shifted_b = b - &half;
    let contains_half = floor(&shifted_b) > floor(&shifted_a) || dist(&shifted_a).is_zero();
    let lo = if contains_integer {
        Rational::zero()
    } else if da < db {
        da.clone()
    } else {
        db.clone()
    };
    let hi = if contains_half {
        half
    } else if da > db {
        da
    } else {
        db
    };
    (lo, hi)
}

/// Certified bracket of `max_j ‖q ξ_j‖`; needs `q · width < 1/4` per coordinate.
pub fn dist_to_integers(
    q: &BigInt,
    encs: &[Enclosure<Rational>],
) -> Result<(Rational, Rational), VerifyError> {
    if !q.is_positive() {
        return Err(VerifyError::InvalidArgument(format!("q = {q} must be positive")));
    }
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    let qr = Rational::from_integer(q.clone());
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for e in encs {
        if e.width() * &qr >= quarter {
            return Err(VerifyError::TooWide { q: q.clone() });
        }
        let (l, h) = interval_dist(&(e.lo() * &qr), &(e.hi() * &qr));
        if l > lo {
            lo = l;
        }
        if h > hi {
            hi = h;
        }
    }
    Ok((lo, hi))
}

/// Enclosure of width at most `target`, or the finest one the source has.
pub fn enclose_best<S: EnclosureSource + ?Sized>(
    source: &S,
    target: &Rational,
) -> Result<Enclosure<Rational>, VerifyError> {
    match source.enclose(target) {
        Ok(e) => Ok(e),
        Err(depth) => source.enclose(&depth.best).map_err(VerifyError::from),
    }
}

/// `‖q ξ‖` bracketed to relative precision about `2^-rel_bits`, refining
/// enclosures as far as the sources allow.
pub fn certify_distance<S: EnclosureSource>(
    q: &BigInt,
    sources: &[S],
    rel_bits: u32,
) -> Result<(Rational, Rational), VerifyError> {
    let qr = Rational::from_integer(q.clone());
    let mut target = Rational::new(BigInt::one(), BigInt::from(16)) / &qr;
    let mut best: Option<(Rational, Rational)> = None;
    for _ in 0..4 {
        let encs = sources
            .iter()
            .map(|s| enclose_best(s, &target))
            .collect::<Result<Vec<_>, _>>()?;
        let (lo, hi) = dist_to_integers(q, &encs)?;
        let slack = &hi - &lo;
        let done = hi.is_zero() || slack * Rational::from_integer(BigInt::one() << rel_bits) <= hi;
        let next = &hi / (&qr * Rational::from_integer(BigInt::one() << (rel_bits + 2)));
        best = Some((lo, hi));
        if done || next >= target {
            break;
        }
        target = next;
    }
    Ok(best.expect("at least one pass"))
}

/// Outer bracket of `x · Q^{1/m}` for `x` in `[lo, hi]`.
pub fn theta_bracket(q_max: &BigInt, m: usize, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let (r_lo, r_hi) = root_bracket(q_max.magnitude(), m as u32, 64);
    (lo * r_lo, hi * r_hi)
}

/// `‖x‖` for an exact rational.
pub fn dist_exact(x: &Rational) -> Rational {
    let (n, d) = (x.numer(), x.denom());
    let r = n.mod_floor(d);
    let s = d - &r;
    Rational::new(r.min(s), d.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn pt(n: i64, d: i64) -> Enclosure<Rational> {
        Enclosure::point(ratio(n, d))
    }

    #[test]
    fn exact_points() {
        let q = BigInt::from(3);
        let r = dist_to_integers(&q, &[pt(1, 3), pt(2, 3)]).unwrap();
        assert_eq!(r, (ratio(0, 1), ratio(0, 1)));
        let r = dist_to_integers(&BigInt::one(), &[pt(1, 2)]).unwrap();
        assert_eq!(r, (ratio(1, 2), ratio(1, 2)));
    }

    #[test]
    fn narrow_interval_near_quarter() {
        let w = ratio(1, 1_000_000_000);
        let e = Enclosure::new(ratio(1, 4) - &w / ratio(2, 1), ratio(1, 4) + &w / ratio(2, 1)).unwrap();
        let (lo, hi) = dist_to_integers(&BigInt::one(), &[e]).unwrap();
        assert!(hi - lo <= ratio(2, 1_000_000_000));
    }

    #[test]
    fn straddling_integer_and_half() {
        let e = Enclosure::new(ratio(-1, 100), ratio(1, 100)).unwrap();
        assert_eq!(dist_to_integers(&BigInt::one(), &[e]).unwrap(), (ratio(0, 1), ratio(1, 100)));
        let e = Enclosure::new(ratio(49, 100), ratio(51, 100)).unwrap();
        assert_eq!(dist_to_integers(&BigInt::one(), &[e]).unwrap(), (ratio(49, 100), ratio(1, 2)));
    }

    #[test]
    fn too_wide_rejected() {
        let e = Enclosure::new(ratio(0, 1), ratio(1, 10)).unwrap();
        assert!(matches!(
            dist_to_integers(&BigInt::from(3), &[e]),
            Err(VerifyError::TooWide { .. })
        ));
    }

    #[test]
    fn exact_distance() {
        assert_eq!(dist_exact(&ratio(7, 3)), ratio(1, 3));
        assert_eq!(dist_exact(&ratio(-7, 4)), ratio(1, 4));
        assert_eq!(dist_exact(&ratio(5, 1)), ratio(0, 1));
    }
}
