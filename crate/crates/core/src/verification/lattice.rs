//! `min_{q ≤ Q} ‖q ξ‖` for `Q` far beyond exhaustive reach.
//!
//! Every `q ≤ Q` with `max_j ‖q ξ_j‖ ≤ δ` is a point of the box
//! `|q| ≤ Q, |q x̃_j − p_j| ≤ δ_j` in an integer lattice. The box sits
//! inside a ball, whose lattice points are listed by Fincke–Pohst
//! enumeration on an LLL-reduced basis. Taking `δ` at least the distance
//! of some known `q ≤ Q` puts the minimiser among the listed points, and
//! each candidate is then certified exactly.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::distance::{dist_to_integers, enclose_best};
use super::scan::{ScanConfig, ScanMethod, ScanResult};
use super::VerifyError;
use crate::arith::{ceil, floor};
use crate::ifs::{Enclosure, EnclosureSource};
use crate::Rational;

type Row = Vec<BigInt>;

/// Gram–Schmidt coefficients `mu[i][j]` and squared norms `B[i]`.
fn gso(b: &[Row]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let n = b.len();
    let d = b[0].len();
    let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut norms: Vec<Rational> = Vec::with_capacity(n);
    for i in 0..n {
        let bi: Vec<Rational> = b[i].iter().map(|x| Rational::from_integer(x.clone())).collect();
        let mut v = bi.clone();
        for j in 0..i {
            let num: Rational = bi.iter().zip(&star[j]).map(|(x, y)| x * y).sum();
            mu[i][j] = num / &norms[j];
            for t in 0..d {
                let delta = &mu[i][j] * &star[j][t];
                v[t] -= delta;
            }
        }
        norms.push(v.iter().map(|x| x * x).sum());
        star.push(v);
    }
    (mu, norms)
}

fn round_half_up(x: &Rational) -> BigInt {
    floor(&(x + Rational::new(BigInt::one(), BigInt::from(2))))
}

/// LLL reduction with parameter `3/4`.
pub fn lll(b: &mut [Row]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let delta = Rational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(b);
            let r = round_half_up(&mu[k][j]);
            if !r.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
            }
        }
        let (mu, norms) = gso(b);
        let lovasz = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if norms[k] >= lovasz {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Upper bound on `sqrt(x)` for `x ≥ 0`.
fn sqrt_upper(x: &Rational) -> Rational {
    if !x.is_positive() {
        return Rational::zero();
    }
    let (n, d) = (x.numer().magnitude(), x.denom().magnitude());
    let s: BigUint = (n * d).sqrt() + 1u32;
    Rational::new(BigInt::from(s), BigInt::from(d.clone()))
}

/// Coefficient vectors of all nonzero lattice points with `‖v‖² ≤ r2`.
pub fn enumerate(b: &[Row], r2: &Rational, cap: u64) -> Result<Vec<Row>, VerifyError> {
    let n = b.len();
    let (mu, norms) = gso(b);
    let mut x = vec![BigInt::zero(); n];
    let mut out = Vec::new();
    let mut nodes = 0u64;
    descend(n - 1, &mu, &norms, r2, &Rational::zero(), &mut x, &mut out, &mut nodes, cap)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    i: usize,
    mu: &[Vec<Rational>],
    norms: &[Rational],
    r2: &Rational,
    partial: &Rational,
    x: &mut Vec<BigInt>,
    out: &mut Vec<Row>,
    nodes: &mut u64,
    cap: u64,
) -> Result<(), VerifyError> {
    let n = x.len();
    let mut c = Rational::zero();
    for t in i + 1..n {
        c -= Rational::from_integer(x[t].clone()) * &mu[t][i];
    }
    let rem = r2 - partial;
    let radius = sqrt_upper(&(rem / &norms[i]));
    let lo = ceil(&(&c - &radius));
    let hi = floor(&(&c + &radius));
    let mut xi = lo;
    while xi <= hi {
        *nodes += 1;
        if *nodes > cap {
            return Err(VerifyError::BudgetExceeded {
                what: "lattice enumeration".into(),
                verified: cap,
            });
        }
        let y = Rational::from_integer(xi.clone()) - &c;
        let next = partial + &norms[i] * &y * &y;
        if next <= *r2 {
            x[i] = xi.clone();
            if i == 0 {
                if x.iter().any(|v| !v.is_zero()) {
                    out.push(x.clone());
                }
            } else {
                descend(i - 1, mu, norms, r2, &next, x, out, nodes, cap)?;
            }
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}

/// `2^-e ≥ Q^{-1/m}`, the Minkowski radius.
fn minkowski_delta(q_max: &BigInt, m: usize) -> Rational {
    let e = (q_max.bits() - 1) / m as u64;
    Rational::new(BigInt::one(), BigInt::one() << e)
}

/// Scaled integer basis for the box `|q| ≤ Q`, `|q x̃_j − p_j| ≤ δ_j`,
/// with every box point inside the ball of squared radius `(m+1) T²`.
struct Scaled {
    basis: Vec<Row>,
    w0: BigInt,
    r2: Rational,
}

fn scaled_basis(encs: &[Enclosure<Rational>], q_max: &BigInt, delta: &Rational) -> Scaled {
    let m = encs.len();
    let qr = Rational::from_integer(q_max.clone());
    // dyadic centers, fine enough that rounding is far below delta / Q
    let delta_bits = delta.denom().bits() as i64 - delta.numer().bits() as i64 + 1;
    let bits = (q_max.bits() as i64 + delta_bits.max(0) + 48) as usize;
    let scale = Rational::from_integer(BigInt::one() << bits);
    let unit = Rational::new(BigInt::one(), BigInt::one() << bits);
    let mut centers = Vec::with_capacity(m);
    let mut deltas = Vec::with_capacity(m);
    for e in encs {
        let x = floor(&(e.midpoint() * &scale));
        let eps = e.width() / Rational::from_integer(BigInt::from(2)) + &unit;
        deltas.push(delta + &qr * eps);
        centers.push(x);
    }
    // common target size T for every box half-side
    let mut t_bits = q_max.bits() + 20;
    for d in &deltas {
        let side = d * &scale;
        let b = side.numer().bits().saturating_sub(side.denom().bits()) + 2;
        t_bits = t_bits.max(b + 20);
    }
    let t = BigInt::one() << t_bits;
    let tr = Rational::from_integer(t.clone());
    let w0 = floor(&(&tr / &qr)).max(BigInt::one());
    let weights: Vec<BigInt> = deltas
        .iter()
        .map(|d| floor(&(&tr / (d * &scale))).max(BigInt::one()))
        .collect();
    let two_b = BigInt::one() << bits;
    let mut basis = Vec::with_capacity(m + 1);
    let mut b0 = vec![w0.clone()];
    for j in 0..m {
        b0.push(&centers[j] * &weights[j]);
    }
    basis.push(b0);
    for j in 0..m {
        let mut row = vec![BigInt::zero(); m + 1];
        row[j + 1] = -(&two_b * &weights[j]);
        basis.push(row);
    }
    let r2 = Rational::from_integer(BigInt::from(m as u64 + 1) * &t * &t);
    Scaled { basis, w0, r2 }
}

fn q_of(v: &[BigInt], w0: &BigInt) -> BigInt {
    (&v[0] / w0).abs()
}

fn enclosures<S: EnclosureSource>(
    sources: &[S],
    target: &Rational,
) -> Result<Vec<Enclosure<Rational>>, VerifyError> {
    sources.iter().map(|s| enclose_best(s, target)).collect()
}

/// Certified `min_{q ≤ Q} ‖q ξ‖` by LLL plus enumeration.
pub fn scan_lattice<S: EnclosureSource>(
    sources: &[S],
    q_max: &BigInt,
    hints: &[BigInt],
    cfg: &ScanConfig,
) -> Result<ScanResult, VerifyError> {
    if !q_max.is_positive() {
        return Err(VerifyError::InvalidArgument("Q must be at least 1".into()));
    }
    let m = sources.len();
    let qr = Rational::from_integer(q_max.clone());
    let margin = Rational::from_integer(BigInt::one() << 40u32);
    let delta_m = minkowski_delta(q_max, m);

    let encs = enclosures(sources, &(&delta_m / (&qr * &margin)))?;
    let mut candidates: BTreeSet<BigInt> = hints
        .iter()
        .filter(|q| q.is_positive() && *q <= q_max)
        .cloned()
        .collect();
    let mut first = scaled_basis(&encs, q_max, &delta_m);
    lll(&mut first.basis);
    for v in &first.basis {
        let q = q_of(v, &first.w0);
        if q.is_positive() && q <= *q_max {
            candidates.insert(q);
        }
    }
    let mut delta = delta_m.clone();
    for q in &candidates {
        if let Ok((_, hi)) = dist_to_integers(q, &encs) {
            if hi < delta {
                delta = hi;
            }
        }
    }

    let encs = if delta < delta_m {
        enclosures(sources, &(&delta / (&qr * &margin)))?
    } else {
        encs
    };
    let mut scaled = scaled_basis(&encs, q_max, &delta);
    lll(&mut scaled.basis);
    for coeffs in enumerate(&scaled.basis, &scaled.r2, cfg.enum_cap)? {
        let v: Row = (0..=m)
            .map(|t| {
                coeffs
                    .iter()
                    .zip(&scaled.basis)
                    .map(|(c, row)| c * &row[t])
                    .sum()
            })
            .collect();
        debug_assert!(v[0].is_multiple_of(&scaled.w0));
        let q = q_of(&v, &scaled.w0);
        if q.is_positive() && q <= *q_max {
            candidates.insert(q);
        }
    }

    let mut best: Option<(Rational, Rational, BigInt)> = None;
    for q in &candidates {
        let (lo, hi) = dist_to_integers(q, &encs)?;
        best = Some(match best {
            None => (lo, hi, q.clone()),
            Some((blo, bhi, bq)) => {
                let lo = if lo < blo { lo } else { blo };
                if hi < bhi {
                    (lo, hi, q.clone())
                } else {
                    (lo, bhi, bq)
                }
            }
        });
    }
    let (lo, hi, q) = best.ok_or_else(|| {
        VerifyError::InvalidArgument("lattice route found no candidate; Minkowski bound violated".into())
    })?;
    Ok(ScanResult::new(q_max.clone(), m, q, lo, hi, ScanMethod::Lattice))
}
