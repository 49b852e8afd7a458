//! The vector ξ: parameter choice, schedules, words and the approximant table.

mod address;
mod rows;
mod schedule;

pub use address::{feasible_m, omega1_builder, Omega1Address, XiAddress};
pub use rows::{build_words, ApproximantRow, Construction, RowWords};
pub use schedule::{build_schedule, Schedule};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{factorize, floor, int_ratio, pow_u, vp_trusted, Valuation};
use crate::ifs::{InsufficientDepth, Letter, PairStatus, TailWord, Word};
use crate::{Ifs, Rational};

/// Default cap on the search for `N`.
pub const N_SEARCH_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("the two maps share a fixed point")]
    Degenerate,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no N <= {cap} gives a denominator divisible by (b1 b2)^{ell}")]
    SearchExhausted { cap: u64, ell: u64 },
    #[error("schedule infeasible at (j, k) = ({j}, {k}): M grows too slowly")]
    ScheduleInfeasible { j: usize, k: usize },
    #[error("word infeasible at (j, k) = ({j}, {k}): eta = {eta} < N = {n}")]
    WordInfeasible { j: usize, k: usize, eta: i64, n: u64 },
    #[error("lemma violation at (j, k) = ({j}, {k}): {detail}")]
    LemmaViolation { j: usize, k: usize, detail: String },
    #[error("need more schedule depth: {0}")]
    NeedMoreDepth(#[from] InsufficientDepth),
    #[error("invalid perturbation at coordinate {j}, block {i}: exponent {exponent}")]
    InvalidPerturbation { j: usize, i: usize, exponent: i64 },
}

/// User-level inputs of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionParams {
    pub ifs: Ifs,
    pub m: usize,
    pub c: Rational,
    /// `M_1 < M_2 < …`, indexed from `k = 1`.
    pub big_m: Vec<u64>,
    pub omega: Option<Rational>,
    pub n_override: Option<u64>,
    pub ell_override: Option<u64>,
}

impl ConstructionParams {
    pub fn new(ifs: Ifs, m: usize, c: Rational, big_m: Vec<u64>) -> Self {
        ConstructionParams {
            ifs,
            m,
            c,
            big_m,
            omega: None,
            n_override: None,
            ell_override: None,
        }
    }

    pub fn with_omega(mut self, omega: Rational) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        if self.ifs.validate() == PairStatus::Degenerate {
            return Err(ConstructionError::Degenerate);
        }
        if self.m < 2 {
            return Err(ConstructionError::InvalidParams(format!("m = {} < 2", self.m)));
        }
        if !self.c.is_positive() || self.c >= Rational::one() {
            return Err(ConstructionError::InvalidParams(format!("c = {} not in (0, 1)", self.c)));
        }
        if self.big_m.first() == Some(&0) || self.big_m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConstructionError::InvalidParams(
                "M must be positive and strictly increasing".into(),
            ));
        }
        if let Some(omega) = &self.omega {
            let lo = Rational::new(BigInt::one(), BigInt::from(self.m));
            let hi = Rational::new(BigInt::one(), BigInt::from(self.m - 1));
            if omega.is_one() {
                return Err(ConstructionError::InvalidParams(
                    "omega = 1 has its own builder (omega1_builder)".into(),
                ));
            }
            if *omega < lo || *omega > hi {
                return Err(ConstructionError::InvalidParams(format!(
                    "omega = {omega} outside [1/m, 1/(m-1)]"
                )));
            }
        }
        Ok(())
    }
}

/// Smallest `ℓ` exceeding `max{v_p(s1), v_p(s2)} / v_p(b_i)` over primes `p | b_i`.
pub fn choose_ell(ifs: &Ifs) -> u64 {
    let (b1, b2) = ifs.bases();
    let (s1, s2) = ifs.shift_denominators();
    let s1 = int_ratio(s1);
    let s2 = int_ratio(s2);
    let mut worst = Rational::zero();
    for b in [b1, b2] {
        for (p, e) in factorize(b) {
            let v = [&s1, &s2]
                .iter()
                .map(|s| match vp_trusted(p, s) {
                    Valuation::Finite(v) => v,
                    Valuation::Infinity => 0,
                })
                .max()
                .unwrap_or(0);
            let r = Rational::new(BigInt::from(v), BigInt::from(e));
            if r > worst {
                worst = r;
            }
        }
    }
    let ell = floor(&worst) + BigInt::one();
    u64::try_from(ell).expect("small ell")
}

/// `𝐪 = g^N f^N g^∞` as a tail word.
pub fn q_word(n: u64) -> TailWord {
    let mut pre = Word::power(Letter::G, n);
    pre.push(Letter::F, n);
    TailWord::new(pre, Word::power(Letter::G, 1)).expect("nonempty period")
}

/// `𝐩 = f^N g^∞` as a tail word.
pub fn p_word(n: u64) -> TailWord {
    TailWord::new(Word::power(Letter::F, n), Word::power(Letter::G, 1)).expect("nonempty period")
}

/// Smallest `N ≥ 1` with `(b1 b2)^ℓ` dividing the denominator of `𝐪(0)`.
pub fn find_n(ifs: &Ifs, ell: u64, cap: u64) -> Result<(u64, Rational), ConstructionError> {
    if ifs.validate() == PairStatus::Degenerate {
        return Err(ConstructionError::Degenerate);
    }
    let (b1, b2) = ifs.bases();
    let target = pow_u(b1, ell) * pow_u(b2, ell);
    for n in 1..=cap {
        let x = ifs.eval_tail(&q_word(n));
        if x.denom().is_multiple_of(&target) {
            return Ok((n, x));
        }
    }
    Err(ConstructionError::SearchExhausted { cap, ell })
}
