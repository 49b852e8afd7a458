use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::distance::{enclose_best, theta_bracket};
use super::lattice::scan_lattice;
use super::VerifyError;
use crate::arith::floor;
use crate::ifs::{Enclosure, EnclosureSource};
use crate::Rational;

/// Budgets shared by the scanning routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    /// Largest `Q` scanned exhaustively; beyond it the lattice route is used.
    pub scan_cap: u64,
    /// Enclosure refinement budget, in halvings below `1/(4Q)`.
    pub refine_doublings: u32,
    /// Node budget for lattice enumeration.
    pub enum_cap: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            scan_cap: 10_000_000,
            refine_doublings: 64,
            enum_cap: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    Exhaustive,
    Lattice,
}

/// Certified bracket of `min_{1 ≤ q ≤ Q} ‖q ξ‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub q_max: BigInt,
    pub best_q: BigInt,
    pub dist_lo: Rational,
    pub dist_hi: Rational,
    pub theta_lo: Rational,
    pub theta_hi: Rational,
    pub method: ScanMethod,
}

impl ScanResult {
    pub(crate) fn new(
        q_max: BigInt,
        m: usize,
        best_q: BigInt,
        dist_lo: Rational,
        dist_hi: Rational,
        method: ScanMethod,
    ) -> Self {
        let (theta_lo, theta_hi) = theta_bracket(&q_max, m, &dist_lo, &dist_hi);
        ScanResult {
            q_max,
            best_q,
            dist_lo,
            dist_hi,
            theta_lo,
            theta_hi,
            method,
        }
    }
}

/// Enclosures of every coordinate, of width at most `target` if possible
/// and never wider than `limit`.
pub(crate) fn enclosures_within<S: EnclosureSource>(
    sources: &[S],
    target: &Rational,
    limit: &Rational,
) -> Result<Vec<Enclosure<Rational>>, VerifyError> {
    sources
        .iter()
        .map(|s| {
            let e = enclose_best(s, target)?;
            if e.width() > *limit {
                return Err(VerifyError::InsufficientPrecision {
                    need: limit.clone(),
                    got: e.width(),
                });
            }
            Ok(e)
        })
        .collect()
}

const FRAC_BITS: u32 = 128;

/// A coordinate as `a / 2^128 (mod 1)` with error at most `err / 2^128`.
#[derive(Debug, Clone, Copy)]
struct Fixed {
    a: u128,
    err: u128,
}

fn to_fixed(e: &Enclosure<Rational>) -> Option<Fixed> {
    let scale = Rational::from_integer(BigInt::one() << FRAC_BITS);
    let mid = e.midpoint();
    let frac = &mid - Rational::from_integer(floor(&mid));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let scaled = floor(&(&frac * &scale + &half));
    let modulus = BigInt::one() << FRAC_BITS;
    let a = (scaled % &modulus).to_u128()?;
    // rounding contributes at most one half unit
    let err = floor(&(e.width() * &half * &scale)) + BigInt::from(2);
    Some(Fixed { a, err: err.to_u128()? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Partial {
    lo: u128,
    hi: u128,
    q: u64,
}

fn merge(x: Partial, y: Partial) -> Partial {
    let lo = x.lo.min(y.lo);
    let (hi, q) = if (y.hi, y.q) < (x.hi, x.q) { (y.hi, y.q) } else { (x.hi, x.q) };
    Partial { lo, hi, q }
}

fn eval_q(fixed: &[Fixed], q: u64) -> Partial {
    let half = 1u128 << 127;
    let mut lo = 0u128;
    let mut hi = 0u128;
    for f in fixed {
        let t = f.a.wrapping_mul(q as u128);
        let d = t.min(t.wrapping_neg());
        let e = f.err * q as u128;
        lo = lo.max(d.saturating_sub(e));
        hi = hi.max((d + e).min(half));
    }
    Partial { lo, hi, q }
}

fn fixed_coords<S: EnclosureSource>(
    sources: &[S],
    q_max: u64,
    cfg: &ScanConfig,
) -> Result<Vec<Fixed>, VerifyError> {
    let qr = Rational::from_integer(BigInt::from(q_max));
    let limit = Rational::new(BigInt::one(), BigInt::from(64)) / &qr;
    let target = &limit / Rational::from_integer(BigInt::one() << cfg.refine_doublings);
    let encs = enclosures_within(sources, &target, &limit)?;
    encs.iter()
        .map(to_fixed)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| VerifyError::TooWide { q: BigInt::from(q_max) })
}

/// Exhaustive scan over `q = 1..=q_max` in 128-bit fixed point.
pub fn scan_exhaustive<S: EnclosureSource>(
    sources: &[S],
    q_max: u64,
    cfg: &ScanConfig,
) -> Result<ScanResult, VerifyError> {
    if q_max == 0 {
        return Err(VerifyError::InvalidArgument("Q must be at least 1".into()));
    }
    let fixed = fixed_coords(sources, q_max, cfg)?;
    const CHUNK: u64 = 1 << 14;
    let best = (0..q_max.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(q_max);
            (c * CHUNK + 1..=end)
                .map(|q| eval_q(&fixed, q))
                .reduce(merge)
                .expect("nonempty chunk")
        })
        .reduce_with(merge)
        .expect("nonempty range");
    let lo = Rational::new(BigInt::from(best.lo), BigInt::one() << FRAC_BITS);
    let hi = Rational::new(BigInt::from(best.hi), BigInt::one() << FRAC_BITS);
    Ok(ScanResult::new(
        BigInt::from(q_max),
        sources.len(),
        BigInt::from(best.q),
        lo,
        hi,
        ScanMethod::Exhaustive,
    ))
}

/// `min_{q ≤ Q} ‖q ξ‖`: exhaustive up to the scan cap, lattice beyond.
///
/// `hints` are denominators known to approximate well; they only speed up
/// the lattice route.
pub fn scan_min<S: EnclosureSource>(
    sources: &[S],
    q_max: &BigInt,
    hints: &[BigInt],
    cfg: &ScanConfig,
) -> Result<ScanResult, VerifyError> {
    if let Some(exact) = exact_denominator(sources) {
        if exact <= *q_max {
            return Ok(ScanResult::new(
                q_max.clone(),
                sources.len(),
                exact,
                Rational::zero(),
                Rational::zero(),
                ScanMethod::Exhaustive,
            ));
        }
    }
    match q_max.to_u64() {
        Some(q) if q <= cfg.scan_cap => scan_exhaustive(sources, q, cfg),
        _ => scan_lattice(sources, q_max, hints, cfg),
    }
}

/// Common denominator when every coordinate is a known rational.
fn exact_denominator<S: EnclosureSource>(sources: &[S]) -> Option<BigInt> {
    let mut l = BigInt::one();
    for s in sources {
        let x = s.exact_value()?;
        l = num_integer::Integer::lcm(&l, x.denom());
    }
    Some(l)
}
