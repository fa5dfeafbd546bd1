//! Reduced words, cyclic words and conjugacy in a free group of finite rank.
//!
//! Generators are numbered from 1. The letter order used everywhere
//! (canonical rotations, enumeration, witness selection) is
//! `a1 < a1^-1 < a2 < a2^-1 < ...`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A generator or inverse generator. Stored as `+g` or `-g` with `g >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Letter {
        assert!(generator >= 1, "generator index starts at 1");
        let g = generator as i32;
        Letter(if inverse { -g } else { g })
    }

    pub fn gen(generator: usize) -> Letter {
        Letter::new(generator, false)
    }

    pub fn from_signed(value: i32) -> Letter {
        assert!(value != 0, "zero is not a letter");
        Letter(value)
    }

    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position in the fixed letter order, in `0..2N`.
    pub fn key(self) -> usize {
        2 * (self.generator() - 1) + self.is_inverse() as usize
    }

    pub fn from_key(key: usize) -> Letter {
        Letter::new(key / 2 + 1, key % 2 == 1)
    }

    /// All `2N` letters of rank `rank`, in letter order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..2 * rank).map(Letter::from_key)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

/// Freely reduces a sequence of letters.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out = Vec::new();
    for x in raw {
        push_reduced(&mut out, x);
    }
    Word(out)
}

#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, x: Letter) {
    if stack.last() == Some(&x.inverse()) {
        stack.pop();
    } else {
        stack.push(x);
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        reduce(letters)
    }

    /// Parses from signed generator indices, e.g. `[1, 2, -1]` for `abA`.
    pub fn from_signed(values: &[i32]) -> Word {
        reduce(values.iter().map(|&v| Letter::from_signed(v)))
    }

    pub fn gen(generator: usize) -> Word {
        Word(vec![Letter::gen(generator)])
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|x| x.generator()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| x.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &x in &other.0 {
            push_reduced(&mut out, x);
        }
        Word(out)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            for &x in &base.0 {
                push_reduced(&mut out, x);
            }
        }
        Word(out)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => self.0.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `w = p c p^-1` with `c` cyclically reduced; returns `(p, c)`.
    pub fn cyclic_core(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.0[i] == self.0[n - 1 - i].inverse() {
            i += 1;
        }
        (
            Word(self.0[..i].to_vec()),
            Word(self.0[i..n - i].to_vec()),
        )
    }

    /// Length of the cyclic reduction.
    pub fn cyclic_len(&self) -> usize {
        self.cyclic_core().1.len()
    }

    /// Renders using dotted `x1.X2` tokens regardless of rank.
    pub fn to_dotted(&self) -> String {
        self.0
            .iter()
            .map(|x| {
                let c = if x.is_inverse() { 'X' } else { 'x' };
                format!("{c}{}", x.generator())
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.max_generator() > 26 {
            return f.write_str(&self.to_dotted());
        }
        for x in &self.0 {
            let base = if x.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + (x.generator() - 1) as u8) as char)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// `a..z` are generators 1..26 and `A..Z` their inverses; `x12.X3` tokens
    /// cover larger ranks. The empty string and `1` denote the identity.
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let bad = |reason: &str| Error::Parse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let dotted = s.contains('.')
            || (s.len() > 1
                && (s.starts_with('x') || s.starts_with('X'))
                && s[1..].chars().all(|c| c.is_ascii_digit()));
        let mut letters = Vec::new();
        if dotted {
            for tok in s.split('.') {
                let inverse = match tok.chars().next() {
                    Some('x') => false,
                    Some('X') => true,
                    _ => return Err(bad("dotted tokens must look like x3 or X3")),
                };
                let g: usize = tok[1..]
                    .parse()
                    .map_err(|_| bad("dotted token needs a generator number"))?;
                if g == 0 {
                    return Err(bad("generator numbers start at 1"));
                }
                letters.push(Letter::new(g, inverse));
            }
        } else {
            for c in s.chars() {
                match c {
                    'a'..='z' => letters.push(Letter::new((c as u8 - b'a') as usize + 1, false)),
                    'A'..='Z' => letters.push(Letter::new((c as u8 - b'A') as usize + 1, true)),
                    _ => return Err(bad("unexpected character")),
                }
            }
        }
        Ok(reduce(letters))
    }
}

/// A cyclically reduced word stored in its least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(w: &Word) -> CyclicWord {
        cyclic_canonical(w).0
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&self.as_word().inverse())
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|x| x.generator()).max().unwrap_or(0)
    }

    /// Wraps letters that are already cyclically reduced and in least rotation.
    pub(crate) fn from_canonical(letters: Vec<Letter>) -> CyclicWord {
        CyclicWord(letters)
    }

    /// Order used for enumeration and witness selection: length, then letters.
    pub fn shortlex_cmp(&self, other: &CyclicWord) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.as_word(), f)
    }
}

/// Index of the least rotation (two-pointer minimal-rotation scan, linear time).
pub(crate) fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        match a.cmp(&b) {
            Ordering::Equal => {
                k += 1;
                continue;
            }
            Ordering::Greater => i += k + 1,
            Ordering::Less => j += k + 1,
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Returns the canonical cyclic word `c` and a conjugator `u` with `w = u c u^-1`.
pub fn cyclic_canonical(w: &Word) -> (CyclicWord, Word) {
    let (prefix, core) = w.cyclic_core();
    let r = least_rotation(core.letters());
    let letters = core.letters();
    let rotated: Vec<Letter> = letters[r..].iter().chain(&letters[..r]).copied().collect();
    // core = u v and c = v u, so core = u c u^-1.
    let conjugator = prefix.mul(&Word(letters[..r].to_vec()));
    (CyclicWord(rotated), conjugator)
}

pub fn is_conjugate(u: &Word, v: &Word) -> bool {
    CyclicWord::new(u) == CyclicWord::new(v)
}
