//! Slope of `log D(Q)` against `log Q`, with `D(Q) = min_{q ≤ Q} ‖qξ‖`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scan::{scan_min, ScanConfig, ScanResult};
use super::VerifyError;
use crate::arith::{from_f64, log2_bounds};
use crate::construction::Construction;
use crate::ifs::EnclosureSource;
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaFit {
    pub samples: Vec<ScanResult>,
    /// Least-squares slope over all choices of `log D` inside the brackets.
    pub slope_lo: f64,
    pub slope_hi: f64,
    /// Slope through the bracket midpoints (advisory).
    pub slope_mid: f64,
}

impl OmegaFit {
    /// Outer rational bracket of the slope.
    pub fn slope_bracket(&self) -> (Rational, Rational) {
        let pad = 1e-9 * (1.0 + self.slope_lo.abs().max(self.slope_hi.abs()));
        (from_f64(self.slope_lo - pad), from_f64(self.slope_hi + pad))
    }
}

/// Fits the slope over `grid`, which needs at least 5 values spanning at
/// least three orders of magnitude.
pub fn omega_hat_fit<S: EnclosureSource>(
    sources: &[S],
    grid: &[BigInt],
    hints: &[BigInt],
    cfg: &ScanConfig,
) -> Result<OmegaFit, VerifyError> {
    if grid.len() < 5 {
        return Err(VerifyError::InvalidArgument(format!(
            "slope fit needs at least 5 grid points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|q| *q < BigInt::one()) {
        return Err(VerifyError::InvalidArgument("grid values must be positive".into()));
    }
    let lo = grid.iter().min().expect("nonempty");
    let hi = grid.iter().max().expect("nonempty");
    if *hi < lo * 1000u32 {
        return Err(VerifyError::InvalidArgument(
            "grid must span at least three orders of magnitude".into(),
        ));
    }
    let mut samples = Vec::with_capacity(grid.len());
    for q in grid {
        let r = scan_min(sources, q, hints, cfg)?;
        if r.dist_hi.is_zero() {
            return Err(VerifyError::ExactRationalPoint { q: r.best_q });
        }
        if r.dist_lo.is_zero() {
            return Err(VerifyError::InsufficientPrecision {
                need: r.dist_hi.clone(),
                got: r.dist_hi,
            });
        }
        samples.push(r);
    }
    let x: Vec<f64> = samples
        .iter()
        .map(|r| {
            let (a, b) = log2_bounds(&Rational::from_integer(r.q_max.clone()));
            0.5 * (a + b)
        })
        .collect();
    let y: Vec<(f64, f64)> = samples
        .iter()
        .map(|r| (log2_bounds(&r.dist_lo).0, log2_bounds(&r.dist_hi).1))
        .collect();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let mut slope_lo = 0.0;
    let mut slope_hi = 0.0;
    let mut slope_mid = 0.0;
    for (xi, (ylo, yhi)) in x.iter().zip(&y) {
        let w = (xi - mean) / sxx;
        if w >= 0.0 {
            slope_lo += w * ylo;
            slope_hi += w * yhi;
        } else {
            slope_lo += w * yhi;
            slope_hi += w * ylo;
        }
        slope_mid += w * 0.5 * (ylo + yhi);
    }
    Ok(OmegaFit {
        samples,
        slope_lo,
        slope_hi,
        slope_mid,
    })
}

/// `Q = S P*_k − 1` for `k = 1 … kmax`, each with `Q / b2^i` for
/// `i = 1 … extra` while staying at least `S P_k`.
pub fn critical_grid(c: &Construction, kmax: usize, extra: u32) -> Vec<BigInt> {
    let s = c.s_const();
    let b2 = BigInt::from(c.schedule.b2);
    let mut out = Vec::new();
    for k in 1..=kmax.min(c.kmax()) {
        let floor_q = &s * c.schedule.p_k(k);
        let top = &s * c.schedule.p_star(k) - 1u32;
        let mut q = top.clone();
        out.push(top);
        for _ in 0..extra {
            q = &q / &b2;
            if q < floor_q {
                break;
            }
            out.push(q.clone());
        }
    }
    out.sort();
    out.dedup();
    out
}
