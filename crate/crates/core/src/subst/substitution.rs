use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::matrix::IntMatrix;
use crate::fusion::{FusionRule, Patch, Side, DEFAULT_TILE_BUDGET};
use crate::{Error, Result};

/// Letters are indices into the alphabet.
pub type Letter = u8;

/// Default cap on the length of an expanded word.
pub const DEFAULT_WORD_BUDGET: u64 = 100_000_000;

/// A one-dimensional substitution on single-character letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Vec<char>,
    images: Vec<Vec<Letter>>,
}

impl Substitution {
    pub fn new(alphabet: Vec<char>, images: Vec<Vec<Letter>>) -> Result<Self> {
        if alphabet.is_empty() || alphabet.len() != images.len() || alphabet.len() > 255 {
            return Err(Error::Substitution("alphabet and images must match in size".into()));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::Substitution(format!("letter `{a}` declared twice")));
            }
        }
        for (a, img) in alphabet.iter().zip(&images) {
            if img.is_empty() {
                return Err(Error::Substitution(format!("image of `{a}` is empty")));
            }
            if img.iter().any(|&l| l as usize >= alphabet.len()) {
                return Err(Error::Substitution(format!("image of `{a}` uses an unknown letter")));
            }
        }
        Ok(Self { alphabet, images })
    }

    /// Parses lines of the form `a -> ddbc`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules: Vec<(char, &str)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Substitution(format!("line {}: expected `x -> word`", no + 1));
            let (lhs, rhs) = line.split_once("->").ok_or_else(bad)?;
            let mut lhs = lhs.trim().chars();
            let (Some(letter), None) = (lhs.next(), lhs.next()) else { return Err(bad()) };
            let rhs = rhs.trim();
            if rhs.is_empty() || rhs.chars().any(char::is_whitespace) {
                return Err(bad());
            }
            rules.push((letter, rhs));
        }
        let alphabet: Vec<char> = rules.iter().map(|r| r.0).collect();
        let images = rules
            .iter()
            .map(|(_, rhs)| {
                rhs.chars()
                    .map(|c| {
                        alphabet.iter().position(|&a| a == c).map(|i| i as Letter).ok_or_else(|| {
                            Error::Substitution(format!("unknown letter `{c}` in image"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    /// Reads `t ↦ boundary word of P_{n+1}(t) at level n` from a fusion rule.
    pub fn from_boundary(rule: &FusionRule, side: Side, n: u32) -> Result<Self> {
        let alphabet = rule
            .labels
            .iter()
            .map(|l| {
                let mut cs = l.0.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Ok(c),
                    _ => Err(Error::Substitution(format!("label `{l}` is not a single character"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let rule = std::sync::Arc::new(rule.clone());
        let images = (0..alphabet.len())
            .map(|t| {
                let patch = Patch::lazy(rule.clone(), t, n + 1, DEFAULT_TILE_BUDGET)?;
                Ok(patch.boundary_word(side, n)?.into_iter().map(|(l, _)| l as Letter).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn image(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize]
    }

    pub fn letter(&self, c: char) -> Result<Letter> {
        self.alphabet
            .iter()
            .position(|&a| a == c)
            .map(|i| i as Letter)
            .ok_or_else(|| Error::Substitution(format!("unknown letter `{c}`")))
    }

    pub fn word(&self, text: &str) -> Result<Vec<Letter>> {
        text.chars().map(|c| self.letter(c)).collect()
    }

    pub fn render(&self, word: &[Letter]) -> String {
        word.iter().map(|&l| self.alphabet[l as usize]).collect()
    }

    /// Exact length of `σ^k(word)`.
    pub fn iterate_len(&self, word: &[Letter], k: u32) -> BigInt {
        let mut counts = vec![BigInt::zero(); self.len()];
        for &l in word {
            counts[l as usize] += 1;
        }
        let a = self.abelianization().pow(k);
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| a.get(i, j) * &counts[j]).sum::<BigInt>())
            .sum()
    }

    /// `σ^k(word)`, refusing results longer than `budget` letters.
    pub fn iterate_with_budget(&self, word: &[Letter], k: u32, budget: u64) -> Result<Vec<Letter>> {
        let len = self.iterate_len(word, k);
        if len.to_u64().is_none_or(|l| l > budget) {
            return Err(Error::Budget { what: format!("word of length {len}"), budget });
        }
        let mut w = word.to_vec();
        for _ in 0..k {
            w = w.iter().flat_map(|&l| self.images[l as usize].iter().copied()).collect();
        }
        Ok(w)
    }

    pub fn iterate(&self, word: &[Letter], k: u32) -> Result<Vec<Letter>> {
        self.iterate_with_budget(word, k, DEFAULT_WORD_BUDGET)
    }

    /// Calls `f` on each letter of `σ^k(word)` in order without storing it.
    pub fn for_each_letter(&self, word: &[Letter], k: u32, f: &mut impl FnMut(Letter)) {
        fn go(s: &Substitution, l: Letter, k: u32, f: &mut impl FnMut(Letter)) {
            if k == 0 {
                f(l);
            } else {
                for &c in &s.images[l as usize] {
                    go(s, c, k - 1, f);
                }
            }
        }
        for &l in word {
            go(self, l, k, f);
        }
    }

    /// Entry `(i, j)` counts occurrences of letter `i` in `σ(j)`.
    pub fn abelianization(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n);
        for (j, img) in self.images.iter().enumerate() {
            for &i in img {
                let v = m.get(i as usize, j) + 1;
                m.set(i as usize, j, v);
            }
        }
        m
    }

    /// `σ^p` as a substitution.
    pub fn power(&self, p: u32) -> Result<Self> {
        let images = (0..self.len())
            .map(|l| self.iterate(&[l as Letter], p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.alphabet.clone(), images)
    }

    /// Letters reachable from `seed` (including itself) under the substitution.
    pub fn reachable(&self, seed: Letter) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![seed];
        seen[seed as usize] = true;
        while let Some(l) = stack.pop() {
            for &c in &self.images[l as usize] {
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    stack.push(c);
                }
            }
        }
        seen
    }

    pub fn first(&self, l: Letter) -> Letter {
        self.images[l as usize][0]
    }

    pub fn last(&self, l: Letter) -> Letter {
        *self.images[l as usize].last().expect("images are nonempty")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, img) in self.alphabet.iter().zip(&self.images) {
            writeln!(f, "{a} -> {}", self.render(img))?;
        }
        Ok(())
    }
}
