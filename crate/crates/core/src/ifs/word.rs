use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::IfsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    F,
    G,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::F => 'F',
            Letter::G => 'G',
        }
    }
}

/// A finite word over `{F, G}`, stored as maximal runs.
///
/// Addresses in the construction are long blocks of one digit, so the
/// run-length form keeps words of millions of letters cheap.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    runs: Vec<(Letter, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unexpected character {0:?} in word (expected F or G)")]
pub struct ParseWordError(char);

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn power(letter: Letter, n: u64) -> Self {
        let mut w = Word::empty();
        w.push(letter, n);
        w
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l, 1);
        }
        w
    }

    /// Appends `letter^n`.
    pub fn push(&mut self, letter: Letter, n: u64) -> &mut Self {
        if n == 0 {
            return self;
        }
        match self.runs.last_mut() {
            Some((l, c)) if *l == letter => *c += n,
            _ => self.runs.push((letter, n)),
        }
        self
    }

    pub fn extend(&mut self, other: &Word) -> &mut Self {
        for &(l, n) in &other.runs {
            self.push(l, n);
        }
        self
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend(other);
        w
    }

    pub fn runs(&self) -> &[(Letter, u64)] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(_, n)| n).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// `(h1, h2)`: the number of `F` and of `G` digits.
    pub fn counts(&self) -> (u64, u64) {
        self.runs.iter().fold((0, 0), |(f, g), &(l, n)| match l {
            Letter::F => (f + n, g),
            Letter::G => (f, g + n),
        })
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs
            .iter()
            .flat_map(|&(l, n)| std::iter::repeat_n(l, n as usize))
    }

    /// The first `len` letters (the whole word if shorter).
    pub fn prefix(&self, len: u64) -> Word {
        let mut out = Word::empty();
        let mut left = len;
        for &(l, n) in &self.runs {
            if left == 0 {
                break;
            }
            let take = n.min(left);
            out.push(l, take);
            left -= take;
        }
        out
    }

    /// Drops the last `n` letters; `None` if the word is shorter than `n`.
    pub fn drop_last(&self, n: u64) -> Option<Word> {
        let len = self.len();
        (n <= len).then(|| self.prefix(len - n))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        let len = self.len();
        len <= other.len() && other.prefix(len) == *self
    }

    /// SHA-256 of the plain letter string, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let chunk_f = [b'F'; 4096];
        let chunk_g = [b'G'; 4096];
        for &(l, n) in &self.runs {
            let chunk = if l == Letter::F { &chunk_f } else { &chunk_g };
            let mut left = n;
            while left > 0 {
                let take = left.min(chunk.len() as u64) as usize;
                h.update(&chunk[..take]);
                left -= take as u64;
            }
        }
        hex::encode(h.finalize())
    }

    /// Compact run notation such as `G^2 F^2 G^5`.
    pub fn run_notation(&self) -> String {
        if self.is_empty() {
            return "()".into();
        }
        self.runs
            .iter()
            .map(|&(l, n)| {
                if n == 1 {
                    l.as_char().to_string()
                } else {
                    format!("{}^{}", l.as_char(), n)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 64 {
            for l in self.letters() {
                write!(f, "{}", l.as_char())?;
            }
            Ok(())
        } else {
            f.write_str(&self.run_notation())
        }
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = Word::empty();
        for ch in s.chars() {
            match ch {
                'F' | 'f' => w.push(Letter::F, 1),
                'G' | 'g' => w.push(Letter::G, 1),
                c if c.is_whitespace() => continue,
                c => return Err(ParseWordError(c)),
            };
        }
        Ok(w)
    }
}

/// The ultimately periodic word `preamble · period^∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailWord {
    preamble: Word,
    period: Word,
}

impl TailWord {
    pub fn new(preamble: Word, period: Word) -> Result<Self, IfsError> {
        if period.is_empty() {
            return Err(IfsError::EmptyPeriod);
        }
        Ok(TailWord { preamble, period })
    }

    pub fn preamble(&self) -> &Word {
        &self.preamble
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// The first `len` letters of the infinite expansion.
    pub fn expansion_prefix(&self, len: u64) -> Word {
        let mut w = self.preamble.prefix(len);
        let plen = self.period.len();
        while w.len() < len {
            let need = len - w.len();
            if need >= plen {
                w.extend(&self.period);
            } else {
                w.extend(&self.period.prefix(need));
            }
        }
        w
    }

    /// `w · self`.
    pub fn prepend(&self, w: &Word) -> TailWord {
        TailWord {
            preamble: w.concat(&self.preamble),
            period: self.period.clone(),
        }
    }
}
