use super::{build_schedule, build_words, ConstructionError, ConstructionParams, Schedule};
use crate::ifs::{AddressSource, Letter, Word};
use crate::{Ifs, Rational};

/// Known prefixes of the limit address `𝐰_j`: level `K` is `v_{j,K}·f^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiAddress {
    levels: Vec<Word>,
}

impl XiAddress {
    pub fn new(sched: &Schedule, j: usize) -> Self {
        let n = sched.n;
        let mut v = Word::power(Letter::G, n);
        let mut levels = Vec::with_capacity(sched.kmax() + 1);
        for k in 0..=sched.kmax() {
            if k > 0 {
                v.push(Letter::F, n);
                v.push(Letter::G, sched.eta(j, k) as u64);
            }
            let mut level = v.clone();
            level.push(Letter::F, n);
            levels.push(level);
        }
        XiAddress { levels }
    }

    /// Keeps levels `0..=max_k`.
    pub fn truncated(mut self, max_k: usize) -> Self {
        self.levels.truncate(max_k + 1);
        self
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

impl AddressSource for XiAddress {
    fn prefix(&self, level: usize) -> Option<Word> {
        self.levels.get(level).cloned()
    }
}

/// Address `g^{a_1} f g^{a_2} f ⋯` with fixed exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Omega1Address {
    exponents: Vec<u64>,
}

impl Omega1Address {
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `g^{a_1} f ⋯ g^{a_n} f`.
    pub fn block_prefix(&self, n: usize) -> Word {
        let mut w = Word::empty();
        for &a in &self.exponents[..n] {
            w.push(Letter::G, a);
            w.push(Letter::F, 1);
        }
        w
    }
}

impl AddressSource for Omega1Address {
    fn prefix(&self, level: usize) -> Option<Word> {
        (level <= self.exponents.len()).then(|| self.block_prefix(level))
    }
}

/// One address per row of `perturb`, with exponents `a_i + perturb[j][i]`.
pub fn omega1_builder(
    a: &[u64],
    perturb: &[Vec<i64>],
) -> Result<Vec<Omega1Address>, ConstructionError> {
    perturb
        .iter()
        .enumerate()
        .map(|(j, row)| {
            if row.len() != a.len() {
                return Err(ConstructionError::InvalidParams(format!(
                    "perturbation row {} has length {}, expected {}",
                    j + 1,
                    row.len(),
                    a.len()
                )));
            }
            let exponents = a
                .iter()
                .zip(row)
                .enumerate()
                .map(|(i, (&ai, &vi))| {
                    let e = ai as i64 + vi;
                    if e < 1 {
                        Err(ConstructionError::InvalidPerturbation {
                            j: j + 1,
                            i: i + 1,
                            exponent: e,
                        })
                    } else {
                        Ok(e as u64)
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Omega1Address { exponents })
        })
        .collect()
}

/// Greedy smallest `M` through `kmax` whose schedule and words are feasible.
pub fn feasible_m(
    ifs: &Ifs,
    m: usize,
    c: &Rational,
    omega: Option<&Rational>,
    n: u64,
    kmax: usize,
    start: u64,
) -> Result<Vec<u64>, ConstructionError> {
    const TRIES: u64 = 100_000;
    let mut big_m: Vec<u64> = Vec::with_capacity(kmax);
    let mut lo = start.max(n);
    for k in 1..=kmax {
        let mut found = None;
        for cand in lo..lo + TRIES {
            let mut trial = big_m.clone();
            trial.push(cand);
            let mut params = ConstructionParams::new(ifs.clone(), m, c.clone(), trial.clone());
            params.omega = omega.cloned();
            let Ok(sched) = build_schedule(&params, n, 0, k) else {
                continue;
            };
            if (1..=m).all(|j| build_words(&sched, j, k).is_ok()) {
                found = Some((cand, sched));
                break;
            }
        }
        let Some((mk, sched)) = found else {
            return Err(ConstructionError::ScheduleInfeasible { j: 1, k });
        };
        big_m.push(mk);
        lo = (mk + 1).max(sched.gjk(m, k) + n);
    }
    Ok(big_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::ifs::AffineMap;

    fn cantor() -> Ifs {
        Ifs::new(
            AffineMap::reciprocal(3, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        )
    }

    #[test]
    fn omega1_zero_perturbation_shares_pattern() {
        let a = [2, 5, 30];
        let addrs = omega1_builder(&a, &[vec![0; 3], vec![0; 3]]).unwrap();
        assert_eq!(addrs[0], addrs[1]);
        for n in 0..=3 {
            let (f_count, _) = addrs[0].prefix(n).unwrap().counts();
            assert_eq!(f_count, n as u64);
        }
        assert!(addrs[0].prefix(4).is_none());
    }

    #[test]
    fn omega1_rejects_nonpositive() {
        let err = omega1_builder(&[2, 5], &[vec![0, 0], vec![-2, 0]]).unwrap_err();
        assert_eq!(
            err,
            ConstructionError::InvalidPerturbation {
                j: 2,
                i: 1,
                exponent: 0
            }
        );
    }

    #[test]
    fn feasible_m_builds() {
        let c = ratio(1, 4);
        let big_m = feasible_m(&cantor(), 3, &c, None, 2, 4, 2).unwrap();
        assert_eq!(big_m.len(), 4);
        let params = ConstructionParams::new(cantor(), 3, c, big_m);
        let sched = build_schedule(&params, 2, 2, 4).unwrap();
        for k in 0..=4 {
            for j in 1..=3 {
                build_words(&sched, j, k).unwrap();
            }
        }
    }

    #[test]
    fn xi_levels_are_nested() {
        let params = ConstructionParams::new(cantor(), 3, ratio(1, 4), vec![3, 9, 31]);
        let sched = build_schedule(&params, 2, 2, 3).unwrap();
        let addr = XiAddress::new(&sched, 2);
        assert_eq!(addr.depth(), 4);
        for k in 0..3 {
            assert!(addr.prefix(k).unwrap().is_prefix_of(&addr.prefix(k + 1).unwrap()));
        }
        assert_eq!(addr.clone().truncated(1).depth(), 2);
    }
}
