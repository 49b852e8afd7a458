use num_bigint::BigInt;
use num_traits::Zero;

use super::{IfsPair, Letter, TailWord, Word};
use crate::arith::{big, pow_u};
use crate::{Rational, Scalar};

/// Unreduced normal form `word(x) = (a·x + m) / d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicForm {
    pub a: BigInt,
    pub m: BigInt,
    pub d: BigInt,
}

impl SymbolicForm {
    pub fn apply(&self, x: &Rational) -> Rational {
        let (u, v) = (x.numer(), x.denom());
        Rational::new(&self.a * u + &self.m * v, &self.d * v)
    }

    /// The unique fixed point `m / (d - a)`.
    pub fn fixed_point(&self) -> Rational {
        Rational::new(self.m.clone(), &self.d - &self.a)
    }
}

impl<T: Scalar> IfsPair<T> {
    /// Letter-by-letter composition `w1 ∘ w2 ∘ … ∘ wn (x)`.
    pub fn compose(&self, word: &Word, x: &T) -> T {
        let mut y = x.clone();
        for &(l, n) in word.runs().iter().rev() {
            let map = self.map(l);
            for _ in 0..n {
                y = map.apply(&y);
            }
        }
        y
    }

    /// Product of the contraction rates along `word`.
    pub fn contraction_factor(&self, word: &Word) -> T {
        let (h1, h2) = word.counts();
        num_traits::pow(self.f.rate(), h1 as usize) * num_traits::pow(self.g.rate(), h2 as usize)
    }

    /// `preamble · period^∞ (0)` via the fixed point of the period block.
    pub fn tail_value(&self, tw: &TailWord) -> T {
        let a = self.contraction_factor(tw.period());
        let b = self.compose(tw.period(), &T::zero());
        let fixed = b / (T::one() - a);
        self.compose(tw.preamble(), &fixed)
    }

    /// `|fix f − fix g| / (1 − max rate)`, an upper bound on the attractor's diameter.
    pub fn diameter_bound(&self) -> T {
        let gap = (self.f.fixed_point() - self.g.fixed_point()).abs();
        let (rf, rg) = (self.f.rate(), self.g.rate());
        let cmax = if rf > rg { rf } else { rg };
        gap / (T::one() - cmax)
    }
}

impl IfsPair<Rational> {
    /// Normal form with `d = b1^h1 · b2^h2 · s1 · s2` and `a = s1 s2 u1^h1 u2^h2`.
    pub fn symbolic_form(&self, word: &Word) -> SymbolicForm {
        let (s1, s2) = self.shift_denominators();
        let base = &s1 * &s2;
        let mut a = base.clone();
        let mut m = BigInt::zero();
        let mut d = base;
        for &(l, n) in word.runs().iter().rev() {
            let map = self.map(l);
            let (u, b) = (map.rate_num(), map.rate_den());
            let (r, s) = map.shift_parts();
            let un = pow_u(u, n);
            let bn = pow_u(b, n);
            let geometric = (&bn - &un) / big(b - u);
            m = &un * &m + r * big(b) * geometric * (&d / s);
            a *= &un;
            d *= &bn;
        }
        SymbolicForm { a, m, d }
    }

    /// Exact `word(x)`, reduced once at the end.
    pub fn apply_word(&self, word: &Word, x: &Rational) -> Rational {
        if word.is_empty() {
            return x.clone();
        }
        self.symbolic_form(word).apply(x)
    }

    /// Exact value of `preamble · period^∞ (0)`.
    pub fn eval_tail(&self, tw: &TailWord) -> Rational {
        let fixed = self.symbolic_form(tw.period()).fixed_point();
        self.apply_word(tw.preamble(), &fixed)
    }

    /// Exact product of contraction rates along `word`.
    pub fn contraction_exact(&self, word: &Word) -> Rational {
        let (h1, h2) = word.counts();
        Rational::new(
            pow_u(self.f.rate_num(), h1) * pow_u(self.g.rate_num(), h2),
            pow_u(self.f.rate_den(), h1) * pow_u(self.g.rate_den(), h2),
        )
    }

    /// `g^∞(0)`.
    pub fn sigma(&self) -> Rational {
        self.g.fixed_point()
    }

    /// `f^n g^∞(0)`.
    pub fn nu(&self, n: u64) -> Rational {
        self.apply_word(&Word::power(Letter::F, n), &self.g.fixed_point())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::ifs::AffineMap;

    fn cantor() -> IfsPair<Rational> {
        IfsPair::new(
            AffineMap::reciprocal(3, ratio(0, 1)).unwrap(),
            AffineMap::reciprocal(3, ratio(2, 3)).unwrap(),
        )
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn apply_word_examples() {
        let c = cantor();
        assert_eq!(c.apply_word(&w("FG"), &ratio(0, 1)), ratio(2, 9));
        assert_eq!(c.apply_word(&Word::empty(), &ratio(5, 7)), ratio(5, 7));
        assert_eq!(c.apply_word(&w("GG"), &ratio(0, 1)), ratio(8, 9));
    }

    #[test]
    fn symbolic_form_examples() {
        let c = cantor();
        let sf = c.symbolic_form(&w("FG"));
        assert_eq!(sf.d, big(27));
        assert_eq!(sf.apply(&ratio(0, 1)), ratio(2, 9));
        let id = c.symbolic_form(&Word::empty());
        assert_eq!(id.a, id.d);
        assert!(id.m.is_zero());

        let p = IfsPair::new(
            AffineMap::reciprocal(3, ratio(1, 1)).unwrap(),
            AffineMap::reciprocal(2, ratio(0, 1)).unwrap(),
        );
        let sf = p.symbolic_form(&w("F"));
        assert_eq!(sf.d, big(3));
        assert_eq!(sf.apply(&ratio(0, 1)), ratio(1, 1));
    }

    #[test]
    fn eval_tail_examples() {
        let c = cantor();
        let g_inf = TailWord::new(Word::empty(), w("G")).unwrap();
        let f_inf = TailWord::new(Word::empty(), w("F")).unwrap();
        let q = TailWord::new(w("GGFF"), w("G")).unwrap();
        assert_eq!(c.eval_tail(&g_inf), ratio(1, 1));
        assert_eq!(c.eval_tail(&f_inf), ratio(0, 1));
        assert_eq!(c.eval_tail(&q), ratio(73, 81));
    }

    #[test]
    fn symbolic_agrees_with_compose_u1_pair() {
        let p = IfsPair::new(
            AffineMap::new(2, 5, ratio(1, 5)).unwrap(),
            AffineMap::reciprocal(3, ratio(1, 2)).unwrap(),
        );
        let word = w("FFGFGGGF");
        for x in [ratio(0, 1), ratio(3, 7), ratio(-2, 9)] {
            assert_eq!(p.apply_word(&word, &x), p.compose(&word, &x));
        }
        let tw = TailWord::new(w("GF"), w("FG")).unwrap();
        assert_eq!(p.eval_tail(&tw), p.tail_value(&tw));
    }

    #[test]
    fn float_compose_tracks_exact() {
        let c = cantor();
        let cf = c.to_f64();
        let word = w("GGFFGFG");
        let exact = c.apply_word(&word, &ratio(0, 1));
        let approx = cf.compose(&word, &0.0);
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        approx::assert_abs_diff_eq!(approx, exact, epsilon = 1e-15);
    }

    #[test]
    fn diameter_bound_cantor() {
        assert_eq!(cantor().diameter_bound(), ratio(3, 2));
    }
}
