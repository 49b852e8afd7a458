//! Witness-based upper bounds, the desk-scale lower bound scan, and
//! Liouville witnesses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::distance::{certify_distance, theta_bracket};
use super::scan::{scan_exhaustive, ScanConfig, ScanResult};
use super::VerifyError;
use crate::arith::{from_f64, log2_bounds};
use crate::construction::Construction;
use crate::Rational;

/// Full scan of `q < P*_k` plus the exact structural step.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    pub k: usize,
    pub scan: ScanResult,
    /// Certified bracket of `c′ = min ‖qξ‖ · P_k`.
    pub c_prime_lo: Rational,
    pub c_prime_hi: Rational,
    pub structural_cases: u64,
    /// First `q` violating the structural inequality, if any.
    pub structural_failure: Option<BigInt>,
    /// Largest `h` met over the range.
    pub max_h: usize,
}

impl LowerBoundReport {
    pub fn passed(&self) -> bool {
        self.scan.dist_lo > Rational::zero() && self.structural_failure.is_none()
    }
}

/// For `q = 1 … P*_k − 1`: certifies `min ‖qξ‖ ≥ c′ / P_k` and checks
/// `‖q p_{h+1,k}/q_{h+1,k}‖ ≥ P_{h,k} / q_{h+1,k}` exactly, with `h` the
/// largest index such that `P_{h,k} | q` (`P_{0,k} = 1`).
pub fn lower_bound_scan(
    c: &Construction,
    k: usize,
    cfg: &ScanConfig,
) -> Result<LowerBoundReport, VerifyError> {
    if k == 0 || k > c.kmax() {
        return Err(VerifyError::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            c.kmax()
        )));
    }
    let sched = &c.schedule;
    let m = c.m();
    let q_top = sched.p_star(k) - 1u32;
    let q_max = match q_top.to_u64() {
        Some(q) if q <= cfg.scan_cap => q,
        _ => {
            return Err(VerifyError::BudgetExceeded {
                what: format!("lower bound scan up to P*_{k} - 1 = {q_top}"),
                verified: 0,
            })
        }
    };
    let sources = c.xi_sources();
    let scan = scan_exhaustive(&sources, q_max, cfg)?;

    let p_levels: Vec<BigInt> = (0..=m)
        .map(|h| if h == 0 { BigInt::one() } else { sched.p_jk(h, k) })
        .collect();
    let rows: Vec<(BigInt, BigInt)> = (1..=m)
        .map(|j| {
            let r = c.row(j, k);
            (r.p.clone(), r.q.clone())
        })
        .collect();
    let step = |q: u64| -> (usize, bool) {
        let qb = BigInt::from(q);
        let mut h = 0;
        while h < m && qb.is_multiple_of(&p_levels[h + 1]) {
            h += 1;
        }
        if h == m {
            return (h, false);
        }
        let (p, den) = &rows[h];
        let r = (&qb * p).mod_floor(den);
        let dist = std::cmp::min(r.clone(), den - &r);
        (h, dist >= p_levels[h])
    };
    let (max_h, failure) = (1..q_max + 1)
        .into_par_iter()
        .map(|q| {
            let (h, ok) = step(q);
            (h, if ok { None } else { Some(q) })
        })
        .reduce(
            || (0, None),
            |a, b| {
                let fail = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, None) => x,
                    (None, y) => y,
                };
                (a.0.max(b.0), fail)
            },
        );
    let pk = Rational::from_integer(sched.p_k(k));
    Ok(LowerBoundReport {
        k,
        c_prime_lo: &scan.dist_lo * &pk,
        c_prime_hi: &scan.dist_hi * &pk,
        scan,
        structural_cases: q_max,
        structural_failure: failure.map(BigInt::from),
        max_h,
    })
}

/// One sampled `Q` with its witness.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperSample {
    pub q_max: BigInt,
    /// 1 when `Q < S P*_k`, else 2.
    pub case: u8,
    pub witness: BigInt,
    pub dist_lo: Rational,
    pub dist_hi: Rational,
    /// `‖qξ‖ Q^{1/m} / c`, outer-rounded.
    pub ratio_lo: Rational,
    pub ratio_hi: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBoundReport {
    pub k: usize,
    pub samples: Vec<UpperSample>,
    /// `q p_{1,k}/q_{1,k}` and `q p_{j,k−1}/q_{j,k−1}` integral for `q = S P_k`;
    /// `None` outside the reciprocal regime.
    pub case1_integral: Option<bool>,
}

impl UpperBoundReport {
    /// Largest upper end of the ratio over all samples.
    pub fn max_ratio(&self) -> Rational {
        self.samples
            .iter()
            .map(|s| s.ratio_hi.clone())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// `Q` values in `[S P_k, S P_{k+1})`: `count` points spread over the range
/// in powers of `b2`, plus both sides of the case boundary.
pub fn upper_samples(c: &Construction, k: usize, count: usize) -> Vec<BigInt> {
    let sched = &c.schedule;
    let s = c.s_const();
    let lo = &s * sched.p_k(k);
    let hi = &s * sched.p_k(k + 1);
    let star = &s * sched.p_star(k);
    let b2 = BigInt::from(sched.b2);
    let mut span = 0u64;
    let mut x = lo.clone();
    while &x * &b2 < hi {
        x *= &b2;
        span += 1;
    }
    let mut out: Vec<BigInt> = (0..count.max(1))
        .map(|i| {
            let e = if count > 1 { span * i as u64 / (count as u64 - 1) } else { 0 };
            &lo * num_traits::pow(b2.clone(), e as usize)
        })
        .collect();
    out.push(&star - 1u32);
    out.push(star);
    out.push(&hi - 1u32);
    out.retain(|q| *q >= lo && *q < hi);
    out.sort();
    out.dedup();
    out
}

/// The witness `q` used for `Q`: `S P_k` below `S P*_k`, else `S P*_k`.
pub fn upper_witness(c: &Construction, k: usize, q_max: &BigInt) -> (u8, BigInt) {
    let s = c.s_const();
    let star = &s * c.schedule.p_star(k);
    if *q_max < star {
        (1, s * c.schedule.p_k(k))
    } else {
        (2, star)
    }
}

fn case1_integral(c: &Construction, k: usize) -> Option<bool> {
    if !c.is_reciprocal() || k == 0 {
        return None;
    }
    let q = c.s_const() * c.schedule.p_k(k);
    let first = c.row(1, k);
    let mut ok = (&q * &first.p).is_multiple_of(&first.q);
    for j in 2..=c.m() {
        let r = c.row(j, k - 1);
        ok &= (&q * &r.p).is_multiple_of(&r.q);
    }
    Some(ok)
}

/// Certifies the witness distance and the scaled ratio at every sampled `Q`.
pub fn upper_bound_check(
    c: &Construction,
    k: usize,
    q_samples: &[BigInt],
) -> Result<UpperBoundReport, VerifyError> {
    if k + 1 > c.kmax() {
        return Err(VerifyError::InvalidArgument(format!(
            "upper bound at k = {k} needs rows through k + 1 <= {}",
            c.kmax()
        )));
    }
    let sources = c.xi_sources();
    let m = c.m();
    let cinv = Rational::one() / &c.params.c;
    let mut samples = Vec::with_capacity(q_samples.len());
    for q_max in q_samples {
        let (case, witness) = upper_witness(c, k, q_max);
        let (lo, hi) = certify_distance(&witness, &sources, 24)?;
        let (t_lo, t_hi) = theta_bracket(q_max, m, &lo, &hi);
        samples.push(UpperSample {
            q_max: q_max.clone(),
            case,
            witness,
            dist_lo: lo,
            dist_hi: hi,
            ratio_lo: &t_lo * &cinv,
            ratio_hi: &t_hi * &cinv,
        });
    }
    Ok(UpperBoundReport {
        k,
        samples,
        case1_integral: case1_integral(c, k),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleWitness {
    pub k: usize,
    pub q: BigInt,
    pub dist_lo: Rational,
    pub dist_hi: Rational,
    /// Certified lower bound on `−log dist / log q`.
    pub exponent_lo: Rational,
    /// `dist_hi · P_{k+1} / (S P*_k)`.
    pub scaled: Rational,
}

/// Lower bound on `log(1/d) / log q`, from outward-rounded `log2` brackets.
pub fn exponent_lower_bound(q: &BigInt, d_hi: &Rational) -> Rational {
    let (inv_lo, _) = log2_bounds(&(Rational::one() / d_hi));
    let (_, q_hi) = log2_bounds(&Rational::from_integer(q.clone()));
    let raw = inv_lo / q_hi;
    from_f64(raw - raw.abs() * 1e-12)
}

/// Witness `q = S P*_k` for `k = 1 … kmax − 1`.
pub fn liouville_witnesses(c: &Construction) -> Result<Vec<LiouvilleWitness>, VerifyError> {
    let sources = c.xi_sources();
    let s = c.s_const();
    (1..c.kmax())
        .map(|k| {
            let q = &s * c.schedule.p_star(k);
            let (lo, hi) = certify_distance(&q, &sources, 24)?;
            if hi.is_zero() {
                return Err(VerifyError::ExactRationalPoint { q });
            }
            let exponent_lo = exponent_lower_bound(&q, &hi);
            let scaled = &hi * Rational::new(c.schedule.p_k(k + 1), q.clone());
            Ok(LiouvilleWitness {
                k,
                q,
                dist_lo: lo,
                dist_hi: hi,
                exponent_lo,
                scaled,
            })
        })
        .collect()
}

/// Denominators `S P_{j,k}` that approximate the constructed point well.
pub fn witness_hints(c: &Construction) -> Vec<BigInt> {
    let s = c.s_const();
    let mut out: Vec<BigInt> = (0..=c.kmax())
        .flat_map(|k| (1..=c.m()).map(move |j| (j, k)))
        .map(|(j, k)| &s * c.schedule.p_jk(j, k))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::construction::ConstructionParams;
    use crate::ifs::AffineMap;
    use crate::Ifs;

    fn cantor() -> Ifs {
        Ifs::new(
            AffineMap::reciprocal(3, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        )
    }

    fn small() -> Construction {
        let params = ConstructionParams::new(cantor(), 3, ratio(1, 4), vec![3, 9, 31]);
        Construction::build(params, 3).unwrap()
    }

    #[test]
    fn lower_bound_small_instance() {
        let c = small();
        let r = lower_bound_scan(&c, 1, &ScanConfig::default()).unwrap();
        assert!(r.passed());
        assert!(r.max_h < 3);
        assert_eq!(BigInt::from(r.structural_cases), c.schedule.p_star(1) - 1u32);
    }

    #[test]
    fn lower_bound_budget() {
        let c = small();
        let cfg = ScanConfig {
            scan_cap: 10,
            ..ScanConfig::default()
        };
        assert!(matches!(
            lower_bound_scan(&c, 1, &cfg),
            Err(VerifyError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn upper_witnesses_are_integral() {
        let c = small();
        let qs = upper_samples(&c, 1, 8);
        assert!(qs.len() >= 8);
        let r = upper_bound_check(&c, 1, &qs).unwrap();
        assert_eq!(r.case1_integral, Some(true));
        assert!(r.samples.iter().any(|s| s.case == 1));
        assert!(r.samples.iter().any(|s| s.case == 2));
        for s in &r.samples {
            assert!(s.dist_lo <= s.dist_hi && s.ratio_lo <= s.ratio_hi);
        }
    }

    #[test]
    fn liouville_exponents_grow() {
        let params = ConstructionParams::new(cantor(), 3, ratio(1, 4), vec![4, 40, 4000]);
        let c = Construction::build(params, 3).unwrap();
        let w = liouville_witnesses(&c).unwrap();
        assert_eq!(w.len(), 2);
        assert!(w[0].exponent_lo < w[1].exponent_lo);
        assert!(w.iter().all(|x| x.dist_hi < ratio(1, 2)));
    }

    #[test]
    fn exponent_bound_is_below_truth() {
        let q = BigInt::from(1000);
        let d = ratio(1, 1_000_000);
        let e = exponent_lower_bound(&q, &d);
        assert!(e < ratio(2, 1) && e > ratio(1999, 1000));
    }
}
