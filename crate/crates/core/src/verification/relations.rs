//! Small integer relations and the diagonal demo.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::distance::enclose_best;
use super::scan::{scan_exhaustive, ScanConfig};
use super::VerifyError;
use crate::arith::{ceil, floor, ratio};
use crate::ifs::{AddressPoint, AddressSource, AffineMap, Enclosure, EnclosureSource, Letter, Word};
use crate::{Ifs, Rational};

fn height(a: &[i64]) -> i64 {
    a.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// Smallest-height `(a0, a1, …, am)` with `a0 + Σ a_j ξ_j = 0` consistent with
/// the enclosures, `0 < max |a_i| ≤ H`, and first nonzero `a_j` (`j ≥ 1`)
/// positive. `None` rules out relations of height at most `H` only.
pub fn relation_search<S: EnclosureSource>(sources: &[S], h_max: u64) -> Result<Option<Vec<i64>>, VerifyError> {
    if h_max == 0 {
        return Err(VerifyError::InvalidArgument("height bound H must be at least 1".into()));
    }
    let h = h_max as i64;
    let m = sources.len();
    let target = Rational::new(BigInt::one(), BigInt::from(h_max * h_max) << 40u32);
    let encs: Vec<Enclosure<Rational>> = sources
        .iter()
        .map(|s| enclose_best(s, &target))
        .collect::<Result<_, _>>()?;
    if let Some(e) = encs.iter().find(|e| e.width() * ratio(h * h, 1) >= ratio(1, 1)) {
        return Err(VerifyError::InsufficientPrecision {
            need: ratio(1, h * h),
            got: e.width(),
        });
    }
    let mut best: Option<Vec<i64>> = None;
    let mut a = vec![-h; m];
    loop {
        let lead = a.iter().find(|x| **x != 0).copied().unwrap_or(0);
        if lead > 0 {
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for (aj, e) in a.iter().zip(&encs) {
                let c = ratio(*aj, 1);
                let (x, y) = (e.lo() * &c, e.hi() * &c);
                if x <= y {
                    lo += x;
                    hi += y;
                } else {
                    lo += y;
                    hi += x;
                }
            }
            // a0 with −a0 in [lo, hi] and |a0| ≤ H
            let first = ceil(&lo).max(BigInt::from(-h));
            let last = floor(&hi).min(BigInt::from(h));
            if first <= last {
                let cand_a0 = if first.is_positive() {
                    first
                } else if last.is_negative() {
                    last
                } else {
                    BigInt::zero()
                };
                let a0: i64 = (-cand_a0).try_into().expect("bounded by H");
                let mut v = vec![a0];
                v.extend_from_slice(&a);
                let better = match &best {
                    None => true,
                    Some(b) => (height(&v), &v[1..]) < (height(b), &b[1..]),
                };
                if better {
                    best = Some(v);
                }
            }
        }
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            if a[i] < h {
                a[i] += 1;
                break;
            }
            a[i] = -h;
        }
    }
}

/// The IFS `x/2`, `x/3 + 1/4`, whose two images are disjoint.
pub fn diagonal_ifs() -> Ifs {
    Ifs::new(
        AffineMap::reciprocal(2, ratio(0, 1)).expect("valid map"),
        AffineMap::reciprocal(3, ratio(1, 4)).expect("valid map"),
    )
}

/// Address `f g f g² f g³ ⋯`; level `n` is `f g ⋯ f g^n`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiagonalAddress;

impl AddressSource for DiagonalAddress {
    fn prefix(&self, level: usize) -> Option<Word> {
        let mut w = Word::empty();
        for i in 1..=level as u64 {
            w.push(Letter::F, 1);
            w.push(Letter::G, i);
        }
        Some(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSample {
    pub q_max: u64,
    pub best_q: BigInt,
    pub dist_lo: Rational,
    pub dist_hi: Rational,
    /// Certified `‖qξ‖ ≤ 1/Q`.
    pub ok: bool,
}

/// For `ξ = (x, …, x)` with `x` on the diagonal IFS attractor, a certified
/// `q ≤ Q` with `‖qξ‖ ≤ 1/Q` at every `Q` of the grid.
pub fn diagonal_demo(m: usize, grid: &[u64], cfg: &ScanConfig) -> Result<Vec<DiagonalSample>, VerifyError> {
    if m < 2 {
        return Err(VerifyError::InvalidArgument(format!("diagonal demo needs m >= 2, got {m}")));
    }
    let point = AddressPoint::new(diagonal_ifs(), DiagonalAddress);
    let sources = vec![point; m];
    grid.iter()
        .map(|&q| {
            if q < 2 {
                return Err(VerifyError::InvalidArgument(format!("Q = {q} must exceed 1")));
            }
            let r = scan_exhaustive(&sources, q, cfg)?;
            let ok = r.dist_hi <= ratio(1, q as i64);
            Ok(DiagonalSample {
                q_max: q,
                best_q: r.best_q,
                dist_lo: r.dist_lo,
                dist_hi: r.dist_hi,
                ok,
            })
        })
        .collect()
}
