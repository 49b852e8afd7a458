use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{ConstructionError, ConstructionParams};
use crate::arith::{floor_log, int_ratio, pow_rational, pow_u};
use crate::Rational;

/// The integer sequences `𝔣_k`, `𝔤_{j,k}` for `0 ≤ k ≤ kmax`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub m: usize,
    pub n: u64,
    pub ell: u64,
    pub b1: u64,
    pub b2: u64,
    f: Vec<u64>,
    /// `g[j - 1][k]`.
    g: Vec<Vec<u64>>,
}

impl Schedule {
    pub fn kmax(&self) -> usize {
        self.f.len() - 1
    }

    pub fn fk(&self, k: usize) -> u64 {
        self.f[k]
    }

    pub fn gjk(&self, j: usize, k: usize) -> u64 {
        self.g[j - 1][k]
    }

    /// `η_{j,k} = 𝔤_{j,k} − 𝔤_{j,k−1}` for `k ≥ 1`.
    pub fn eta(&self, j: usize, k: usize) -> i64 {
        assert!(k >= 1, "eta is defined for k >= 1");
        self.gjk(j, k) as i64 - self.gjk(j, k - 1) as i64
    }

    /// `P_{j,k} = b1^{𝔣_k} b2^{𝔤_{j,k}}`.
    pub fn p_jk(&self, j: usize, k: usize) -> BigInt {
        pow_u(self.b1, self.fk(k)) * pow_u(self.b2, self.gjk(j, k))
    }

    /// `P_k = P_{1,k}`.
    pub fn p_k(&self, k: usize) -> BigInt {
        self.p_jk(1, k)
    }

    /// `P*_k = P_{m,k}`.
    pub fn p_star(&self, k: usize) -> BigInt {
        self.p_jk(self.m, k)
    }

    /// `ln M_{i+1} / ln M_i` for consecutive terms with `M_i > 1`.
    pub fn lacunarity_ratios(&self) -> Vec<f64> {
        (1..self.kmax())
            .filter(|&k| self.gjk(1, k) > 1)
            .map(|k| (self.gjk(1, k + 1) as f64).ln() / (self.gjk(1, k) as f64).ln())
            .collect()
    }
}

/// Builds the schedule for `k = 0..=kmax`.
pub fn build_schedule(
    params: &ConstructionParams,
    n: u64,
    ell: u64,
    kmax: usize,
) -> Result<Schedule, ConstructionError> {
    params.validate()?;
    if kmax > params.big_m.len() {
        return Err(ConstructionError::InvalidParams(format!(
            "kmax = {kmax} exceeds the {} given terms of M",
            params.big_m.len()
        )));
    }
    let m = params.m;
    let (b1, b2) = params.ifs.bases();
    let mut f = vec![0u64];
    let mut g = vec![vec![0u64]; m];
    for k in 1..=kmax {
        let fk = n * k as u64;
        let g1 = params.big_m[k - 1];
        f.push(fk);
        g[0].push(g1);
        for j in 2..=m {
            let e = g_entry(params, b1, b2, n, fk, g1, j, k)?;
            if e < 0 {
                return Err(ConstructionError::ScheduleInfeasible { j, k });
            }
            g[j - 1].push(e as u64);
        }
    }
    let sched = Schedule {
        m,
        n,
        ell,
        b1,
        b2,
        f,
        g,
    };
    check_feasible(&sched)?;
    Ok(sched)
}

#[allow(clippy::too_many_arguments)]
fn g_entry(
    params: &ConstructionParams,
    b1: u64,
    b2: u64,
    n: u64,
    fk: u64,
    g1: u64,
    j: usize,
    k: usize,
) -> Result<i64, ConstructionError> {
    let m = params.m;
    let ju = j as u64;
    let log = |x: &Rational| floor_log(b2, x).map_err(|e| ConstructionError::InvalidParams(e.to_string()));
    if j < m {
        let x = int_ratio(pow_u(b1, (ju - 1) * fk) * pow_u(b2, ju * g1));
        return log(&x);
    }
    if let Some(omega) = &params.omega {
        // largest g with b2^{a g} <= b1^{(b - a) f} b2^{b g1}
        let a = omega.numer().to_u64().expect("small omega numerator");
        let b = omega.denom().to_u64().expect("small omega denominator");
        let y = int_ratio(pow_u(b1, (b - a) * fk) * pow_u(b2, b * g1));
        let mut e = Integer::div_floor(&log(&y)?, &(a as i64));
        let twist = Rational::new(BigInt::one(), BigInt::from(m - 1));
        if *omega == twist {
            e += k as i64;
        }
        return Ok(e);
    }
    let x = if m == 2 {
        let c2 = Rational::one() / (&params.c * &params.c);
        c2 * pow_rational(b1, (k as i64 - 2) * n as i64) * int_ratio(pow_u(b2, 2 * g1))
    } else {
        num_traits::pow(params.c.clone(), m)
            * int_ratio(pow_u(b1, (m as u64 - 1) * fk) * pow_u(b2, m as u64 * g1))
    };
    log(&x)
}

/// `η_{j,k} > 0` and `𝔤_{1,k} ≤ … ≤ 𝔤_{m,k} ≤ 𝔤_{1,k+1}`.
fn check_feasible(s: &Schedule) -> Result<(), ConstructionError> {
    for k in 1..=s.kmax() {
        for j in 1..=s.m {
            if s.eta(j, k) <= 0 {
                return Err(ConstructionError::ScheduleInfeasible { j, k });
            }
        }
        for j in 2..=s.m {
            if s.gjk(j, k) < s.gjk(j - 1, k) {
                return Err(ConstructionError::ScheduleInfeasible { j, k });
            }
        }
        if k < s.kmax() && s.gjk(s.m, k) > s.gjk(1, k + 1) {
            return Err(ConstructionError::ScheduleInfeasible { j: 1, k: k + 1 });
        }
    }
    Ok(())
}
