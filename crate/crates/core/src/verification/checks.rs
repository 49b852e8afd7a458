//! Exact, zero-tolerance checks of the arithmetic lemmas on a built instance.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{factorize, pow_u, prime_divisors, vp_int_trusted, Valuation};
use crate::construction::{q_word, ApproximantRow, Construction};
use crate::ifs::{AffineMap, Letter, Word};
use crate::{Ifs, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    pub counterexample: Option<String>,
}

struct Tally {
    name: &'static str,
    cases: u64,
    counterexample: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            cases: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(what());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.counterexample.is_none(),
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

/// `q = S P` on every row, and `S | s s1 s2` when both rates are `1/b`.
pub fn check_roc(c: &Construction) -> CheckResult {
    let mut t = Tally::new("roc");
    let bound = c.s_const();
    for r in &c.rows {
        let exact = r.q == &r.s * &r.big_p && r.big_p == c.schedule.p_jk(r.j, r.k);
        let divides = !c.is_reciprocal() || bound.is_multiple_of(&r.s);
        t.record(exact && divides, || {
            format!("j={} k={}: q={} S={} P={} bound={bound}", r.j, r.k, r.q, r.s, r.big_p)
        });
    }
    t.finish()
}

/// `P_{1,k} | P_{2,k} | … | P_{m,k} | P_{1,k+1}`.
pub fn check_ap_chain(c: &Construction) -> CheckResult {
    let mut t = Tally::new("ap_chain");
    let s = &c.schedule;
    let m = c.m();
    for k in 0..=c.kmax() {
        let mut chain: Vec<(usize, usize)> = (1..=m).map(|j| (j, k)).collect();
        if k < c.kmax() {
            chain.push((1, k + 1));
        }
        for w in chain.windows(2) {
            let (a, b) = (s.p_jk(w[0].0, w[0].1), s.p_jk(w[1].0, w[1].1));
            t.record(b.is_multiple_of(&a), || {
                format!("P_{{{},{}}} = {a} does not divide P_{{{},{}}} = {b}", w[0].0, w[0].1, w[1].0, w[1].1)
            });
        }
    }
    t.finish()
}

/// `t_{j,k}` has `𝔣_k` letters `F` and `𝔤_{j,k}` letters `G`; `|v| = |t| + N`.
pub fn check_ab1(c: &Construction) -> CheckResult {
    let mut t = Tally::new("ab1");
    for r in &c.rows {
        let (h1, h2) = r.words.t.counts();
        let ok = h1 == r.fk && h2 == r.gjk && r.words.v.len() == r.words.t.len() + c.n;
        t.record(ok, || {
            format!("j={} k={}: counts ({h1}, {h2}) vs ({}, {})", r.j, r.k, r.fk, r.gjk)
        });
    }
    t.finish()
}

/// `b1^{h1} b2^{h2}` and `s' b1^{h1} b2^{h2}` divide `q_{j,k}`, with `(h1, h2)`
/// the letter counts of `t_{j,k}` and `s'` the part of `s` supported on primes
/// of `b1 b2`. Primes of `s` outside `b1 b2` can cancel against `s1, s2`.
pub fn check_wicht(c: &Construction) -> CheckResult {
    let mut t = Tally::new("wicht");
    let (b1, b2) = c.ifs().bases();
    let s = &b_part(c.q0.denom(), b1 * b2);
    for r in &c.rows {
        let (h1, h2) = r.words.t.counts();
        let base = pow_u(b1, h1) * pow_u(b2, h2);
        let strong = s * &base;
        let ok = r.q.is_multiple_of(&base) && r.q.is_multiple_of(&strong);
        t.record(ok, || format!("j={} k={}: q={} vs s b1^{h1} b2^{h2}={strong}", r.j, r.k, r.q));
    }
    t.finish()
}

/// Largest divisor of `n` whose primes all divide `b`.
fn b_part(n: &BigInt, b: u64) -> BigInt {
    let mut rest = n.clone();
    let mut out = BigInt::one();
    for p in prime_divisors(b) {
        let p = BigInt::from(p);
        while !rest.is_zero() && rest.is_multiple_of(&p) {
            rest /= &p;
            out *= &p;
        }
    }
    out
}

/// `|p_{j,k}/q_{j,k} − p_{j,k+1}/q_{j,k+1}|` equals the contraction of
/// `v_{j,k+1}` times `|g^∞(0) − f^N g^∞(0)|`; for rates `1/b` that is
/// `b1^{−𝔣_{k+1}} b2^{−𝔤_{j,k+1}−N} |σ − ν|`.
pub fn check_jo(c: &Construction) -> CheckResult {
    let mut t = Tally::new("jo_exact");
    let ifs = c.ifs();
    let gap = (ifs.sigma() - ifs.nu(c.n)).abs();
    let (b1, b2) = ifs.bases();
    for k in 0..c.kmax() {
        for j in 1..=c.m() {
            let (a, b) = (c.row(j, k), c.row(j, k + 1));
            let delta = (a.value() - b.value()).abs();
            let mut ok = delta == ifs.contraction_exact(&b.words.v) * &gap;
            if c.is_reciprocal() {
                let scale = pow_u(b1, b.fk) * pow_u(b2, b.gjk + c.n);
                ok &= &delta * Rational::from_integer(scale) == gap;
            }
            t.record(ok, || format!("j={j} k={k}: |Δ| = {delta}, |σ − ν| = {gap}"));
        }
    }
    t.finish()
}

/// The row's fraction is the value of its own address, read both as
/// `v·𝐩` and as `t·𝐪`.
pub fn intrinsic_check(c: &Construction, row: &ApproximantRow) -> bool {
    let ifs = c.ifs();
    let value = Rational::new(row.p.clone(), row.q.clone());
    if value.denom() != &row.q {
        return false;
    }
    let via_v = ifs.eval_tail(&row.words.w);
    let via_t = ifs.eval_tail(&q_word(c.n).prepend(&row.words.t));
    via_v == value && via_t == value
}

pub fn check_intrinsic(c: &Construction) -> CheckResult {
    let mut t = Tally::new("intrinsic");
    for r in &c.rows {
        t.record(intrinsic_check(c, r), || format!("j={} k={}: {}/{}", r.j, r.k, r.p, r.q));
    }
    t.finish()
}

/// Reduced denominator of `h(u/v)` divides `b1^{h1} b2^{h2} s1 s2 v`, on
/// `cases` seeded random words and inputs.
pub fn check_ppp(ifs: &Ifs, cases: u64, seed: u64) -> CheckResult {
    let mut t = Tally::new("ppp");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (b1, b2) = ifs.bases();
    let (s1, s2) = ifs.shift_denominators();
    for _ in 0..cases {
        let len = rng.random_range(0..=40);
        let word = Word::from_letters((0..len).map(|_| if rng.random_bool(0.5) { Letter::F } else { Letter::G }));
        let u: i64 = rng.random_range(-50..=50);
        let v: i64 = rng.random_range(1..=50);
        let x = Rational::new(BigInt::from(u), BigInt::from(v));
        let y = ifs.apply_word(&word, &x);
        let (h1, h2) = word.counts();
        let bound = pow_u(b1, h1) * pow_u(b2, h2) * &s1 * &s2 * BigInt::from(v);
        t.record(bound.is_multiple_of(y.denom()), || {
            format!("word {word} at {u}/{v}: denominator {} does not divide {bound}", y.denom())
        });
    }
    t.finish()
}

fn pro_cases(map: &AffineMap<Rational>, letter: Letter, ifs: &Ifs, tmax: u64, t: &mut Tally) {
    let b = BigInt::from(map.rate_den());
    let (r, s) = map.shift_parts();
    let fixed = map.fixed_point();
    let primes: Vec<u64> = factorize(map.rate_den()).into_iter().map(|(p, _)| p).collect();
    for u in -6i64..=6 {
        for v in 1i64..=6 {
            let x = Rational::new(BigInt::from(u), BigInt::from(v));
            if x == fixed || x.denom() != &BigInt::from(v) {
                continue;
            }
            let (u, v) = (BigInt::from(u), BigInt::from(v));
            let constant = &u * s * (&b - 1) - r * &b * &v;
            let z = primes
                .iter()
                .map(|&p| match vp_int_trusted(p, &constant) {
                    Valuation::Finite(e) => e as u64,
                    Valuation::Infinity => u64::MAX,
                })
                .max()
                .unwrap_or(0);
            for tt in 1..=tmax {
                if z >= tt {
                    continue;
                }
                let n = 2 * tt;
                let y = ifs.apply_word(&Word::power(letter, n), &x);
                let bn = num_traits::pow(b.clone(), n as usize);
                let closed = Rational::new(
                    &u * s * (&b - 1) + r * &b * &v * (&bn - 1),
                    &bn * &v * s * (&b - 1),
                );
                let bt = num_traits::pow(b.clone(), tt as usize);
                let ok = y == closed && y.denom().is_multiple_of(&bt);
                t.record(ok, || format!("{letter:?}^{n}({x}): denominator {} vs b^{tt}", y.denom()));
            }
        }
    }
}

/// For each map `x/b + r/s`, `F^{2t}(u/v)` matches the closed form and has
/// `b^t` in its reduced denominator whenever `t > max_p v_p(us(b−1) − rbv)`.
pub fn check_pro(ifs: &Ifs, tmax: u64) -> CheckResult {
    let mut t = Tally::new("pro");
    for letter in [Letter::F, Letter::G] {
        let map = ifs.map(letter);
        if map.rate_num() == 1 {
            pro_cases(map, letter, ifs, tmax, &mut t);
        }
    }
    t.finish()
}

/// `(b1 b2)^ℓ` divides the denominator of `𝐪(0)` at the chosen `N`.
pub fn check_lemur(c: &Construction) -> CheckResult {
    let mut t = Tally::new("lemur");
    let (b1, b2) = c.ifs().bases();
    let target = pow_u(b1, c.ell) * pow_u(b2, c.ell);
    let fresh = c.ifs().eval_tail(&q_word(c.n));
    let ok = fresh == c.q0 && c.q0.denom().is_multiple_of(&target);
    t.record(ok, || format!("N={} ell={}: s={} vs {target}", c.n, c.ell, c.q0.denom()));
    t.finish()
}

pub const PPP_CASES: u64 = 1000;
pub const PPP_SEED: u64 = 0x5eed;
pub const PRO_TMAX: u64 = 6;

/// Every exact check, in a fixed order.
pub fn run_exact_checks(c: &Construction) -> Vec<CheckResult> {
    vec![
        check_roc(c),
        check_ap_chain(c),
        check_ab1(c),
        check_wicht(c),
        check_jo(c),
        check_intrinsic(c),
        check_ppp(c.ifs(), PPP_CASES, PPP_SEED),
        check_pro(c.ifs(), PRO_TMAX),
        check_lemur(c),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::construction::ConstructionParams;

    fn cantor_instance() -> Construction {
        let ifs = Ifs::new(
            AffineMap::reciprocal(3, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        );
        Construction::build(ConstructionParams::new(ifs, 3, ratio(1, 4), vec![3, 9, 31]), 3).unwrap()
    }

    #[test]
    fn all_pass_on_cantor() {
        let c = cantor_instance();
        for r in run_exact_checks(&c) {
            assert!(r.passed, "{r:?}");
            assert!(r.cases > 0, "{}", r.name);
        }
    }

    #[test]
    fn corrupted_row_fails_intrinsic() {
        let c = cantor_instance();
        let mut row = c.row(2, 2).clone();
        row.p += 1;
        assert!(!intrinsic_check(&c, &row));
        assert!(intrinsic_check(&c, c.row(2, 2)));
    }

    #[test]
    fn ppp_is_seeded() {
        let ifs = cantor_instance().ifs().clone();
        assert_eq!(check_ppp(&ifs, 50, 7), check_ppp(&ifs, 50, 7));
    }

    #[test]
    fn b_part_keeps_base_primes() {
        assert_eq!(b_part(&BigInt::from(7560), 12), BigInt::from(216));
        assert_eq!(b_part(&BigInt::from(35), 6), BigInt::one());
    }
}
