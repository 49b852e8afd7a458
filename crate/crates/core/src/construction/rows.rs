use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use super::{
    build_schedule, choose_ell, find_n, p_word, q_word, ConstructionError, ConstructionParams,
    Schedule, XiAddress, N_SEARCH_CAP,
};
use crate::ifs::{AddressPoint, Enclosure, EnclosureSource, Letter, TailWord, Word};
use crate::{Ifs, Rational};

/// The words `t_{j,k}`, `v_{j,k}` and `w_{j,k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowWords {
    pub t: Word,
    pub v: Word,
    pub w: TailWord,
}

/// `v_{j,k} = g^N f^N g^{η_{j,1}} ⋯ f^N g^{η_{j,k}}`, with `v_{j,0} = g^N`.
pub fn v_word(sched: &Schedule, j: usize, k: usize) -> Word {
    let n = sched.n;
    let mut v = Word::power(Letter::G, n);
    for i in 1..=k {
        v.push(Letter::F, n);
        v.push(Letter::G, sched.eta(j, i) as u64);
    }
    v
}

pub fn build_words(sched: &Schedule, j: usize, k: usize) -> Result<RowWords, ConstructionError> {
    assert!((1..=sched.m).contains(&j) && k <= sched.kmax(), "row index out of range");
    let n = sched.n;
    let v = v_word(sched, j, k);
    let t = if k == 0 {
        Word::empty()
    } else {
        let eta = sched.eta(j, k);
        if eta < n as i64 {
            return Err(ConstructionError::WordInfeasible { j, k, eta, n });
        }
        v.drop_last(n).expect("v is longer than N")
    };
    let from_t = q_word(n).prepend(&t);
    let from_v = p_word(n).prepend(&v);
    if from_t != from_v {
        return Err(ConstructionError::LemmaViolation {
            j,
            k,
            detail: "t·q and v·p disagree".into(),
        });
    }
    Ok(RowWords { t, v, w: from_v })
}

/// One row of the approximant table.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximantRow {
    pub j: usize,
    pub k: usize,
    pub fk: u64,
    pub gjk: u64,
    /// `None` at `k = 0`.
    pub eta: Option<i64>,
    pub words: RowWords,
    pub p: BigInt,
    pub q: BigInt,
    pub big_p: BigInt,
    pub s: BigInt,
}

impl ApproximantRow {
    pub fn value(&self) -> Rational {
        Rational::new(self.p.clone(), self.q.clone())
    }
}

/// Evaluates row `(j, k)` and checks `q = S·P` with integral `S`.
pub fn approximant(sched: &Schedule, ifs: &Ifs, j: usize, k: usize) -> Result<ApproximantRow, ConstructionError> {
    let words = build_words(sched, j, k)?;
    let x = ifs.eval_tail(&words.w);
    let big_p = if k == 0 { BigInt::one() } else { sched.p_jk(j, k) };
    let (s, rem) = x.denom().div_rem(&big_p);
    if rem != BigInt::from(0) {
        return Err(ConstructionError::LemmaViolation {
            j,
            k,
            detail: format!("P does not divide q = {}", x.denom()),
        });
    }
    Ok(ApproximantRow {
        j,
        k,
        fk: sched.fk(k),
        gjk: sched.gjk(j, k),
        eta: (k > 0).then(|| sched.eta(j, k)),
        words,
        p: x.numer().clone(),
        q: x.denom().clone(),
        big_p,
        s,
    })
}

/// A fully built instance: parameters, `N`, `ℓ`, schedule and rows.
#[derive(Debug, Clone)]
pub struct Construction {
    pub params: ConstructionParams,
    pub n: u64,
    pub ell: u64,
    /// `𝐪(0) = r/s`.
    pub q0: Rational,
    pub schedule: Schedule,
    /// Ordered by `k`, then `j`.
    pub rows: Vec<ApproximantRow>,
}

impl Construction {
    pub fn build(params: ConstructionParams, kmax: usize) -> Result<Self, ConstructionError> {
        params.validate()?;
        let ell = params.ell_override.unwrap_or_else(|| choose_ell(&params.ifs));
        let (n, q0) = match params.n_override {
            Some(n) => (n, params.ifs.eval_tail(&q_word(n))),
            None => find_n(&params.ifs, ell, N_SEARCH_CAP)?,
        };
        let schedule = build_schedule(&params, n, ell, kmax)?;
        let m = params.m;
        let index: Vec<(usize, usize)> = (0..=kmax)
            .flat_map(|k| (1..=m).map(move |j| (j, k)))
            .collect();
        let rows = index
            .par_iter()
            .map(|&(j, k)| approximant(&schedule, &params.ifs, j, k))
            .collect::<Result<Vec<_>, _>>()?;
        let built = Construction {
            params,
            n,
            ell,
            q0,
            schedule,
            rows,
        };
        built.check_corollary()?;
        Ok(built)
    }

    pub fn ifs(&self) -> &Ifs {
        &self.params.ifs
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn kmax(&self) -> usize {
        self.schedule.kmax()
    }

    pub fn row(&self, j: usize, k: usize) -> &ApproximantRow {
        &self.rows[k * self.m() + (j - 1)]
    }

    /// `s·s1·s2`, the bound on every `S_{j,k}`.
    pub fn s_const(&self) -> BigInt {
        let (s1, s2) = self.ifs().shift_denominators();
        self.q0.denom() * s1 * s2
    }

    /// True when both maps are of the form `x/b + r/s`.
    pub fn is_reciprocal(&self) -> bool {
        self.ifs().is_reciprocal()
    }

    fn check_corollary(&self) -> Result<(), ConstructionError> {
        if !self.is_reciprocal() {
            return Ok(());
        }
        let bound = self.s_const();
        for r in &self.rows {
            if !bound.is_multiple_of(&r.s) {
                return Err(ConstructionError::LemmaViolation {
                    j: r.j,
                    k: r.k,
                    detail: format!("S = {} does not divide s s1 s2 = {bound}", r.s),
                });
            }
        }
        Ok(())
    }

    /// Address prefixes of `ξ_j` available from the schedule.
    pub fn xi_address(&self, j: usize) -> XiAddress {
        XiAddress::new(&self.schedule, j)
    }

    /// `ξ_j` as an enclosure source.
    pub fn xi_point(&self, j: usize) -> AddressPoint<XiAddress> {
        AddressPoint::new(self.ifs().clone(), self.xi_address(j))
    }

    /// All coordinates as boxed enclosure sources.
    pub fn xi_sources(&self) -> Vec<Box<dyn EnclosureSource>> {
        (1..=self.m())
            .map(|j| Box::new(self.xi_point(j)) as Box<dyn EnclosureSource>)
            .collect()
    }

    /// Enclosure of `ξ_j` of width at most `target`, using levels up to `max_k`.
    pub fn xi_enclosure(&self, j: usize, max_k: usize, target: &Rational) -> Result<Enclosure<Rational>, ConstructionError> {
        let addr = XiAddress::new(&self.schedule, j).truncated(max_k);
        let point = AddressPoint::new(self.ifs().clone(), addr);
        Ok(point.enclose(target)?)
    }
}
