//! Enumeration of reduced words and conjugacy classes, in the fixed
//! (length, letter order) ordering.

use crate::word::{least_rotation, CyclicWord, Letter, Word};

/// Calls `f` on every reduced word of length exactly `len`, in letter order.
pub fn for_each_reduced_word<F: FnMut(&[Letter])>(rank: usize, len: usize, mut f: F) {
    if len == 0 {
        f(&[]);
        return;
    }
    let mut buf: Vec<Letter> = Vec::with_capacity(len);
    fn rec<F: FnMut(&[Letter])>(rank: usize, len: usize, buf: &mut Vec<Letter>, f: &mut F) {
        if buf.len() == len {
            f(buf);
            return;
        }
        for x in Letter::all(rank) {
            if buf.last() == Some(&x.inverse()) {
                continue;
            }
            buf.push(x);
            rec(rank, len, buf, f);
            buf.pop();
        }
    }
    rec(rank, len, &mut buf, &mut f);
}

/// Reduced words of length `1..=max_len`, by length then letter order.
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for_each_reduced_word(rank, len, |w| out.push(Word::from_reduced(w.to_vec())));
    }
    out
}

/// Canonical cyclic words (one per conjugacy class) of exactly length `len`.
pub fn canonical_cyclic_words_of_length(rank: usize, len: usize) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    if len == 0 {
        return out;
    }
    for_each_reduced_word(rank, len, |w| {
        if len > 1 && w[0] == w[len - 1].inverse() {
            return;
        }
        if is_least_rotation(w) {
            out.push(CyclicWord::from_canonical(w.to_vec()));
        }
    });
    out
}

// Periodic words have several minimal starting points, so compare contents.
fn is_least_rotation(w: &[Letter]) -> bool {
    let r = least_rotation(w);
    r == 0 || w[r..].iter().chain(&w[..r]).eq(w.iter())
}

/// Canonical cyclic words of length `min_len..=max_len`, by length then letters.
pub fn canonical_cyclic_words(rank: usize, min_len: usize, max_len: usize) -> Vec<CyclicWord> {
    (min_len.max(1)..=max_len)
        .flat_map(|len| canonical_cyclic_words_of_length(rank, len))
        .collect()
}

/// Dense indexing of reduced words of length `1..=max_len`, consistent with
/// the enumeration order of [`reduced_words`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordIndexer {
    rank: usize,
    max_len: usize,
    offsets: Vec<usize>,
}

impl WordIndexer {
    pub fn new(rank: usize, max_len: usize) -> WordIndexer {
        let mut offsets = vec![0usize; max_len + 2];
        let mut count = 2 * rank;
        for len in 1..=max_len {
            offsets[len + 1] = offsets[len] + count;
            count *= 2 * rank - 1;
        }
        WordIndexer {
            rank,
            max_len,
            offsets,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.offsets[self.max_len + 1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of the words of length `len`.
    pub fn range_of_length(&self, len: usize) -> std::ops::Range<usize> {
        self.offsets[len]..self.offsets[len + 1]
    }

    #[inline]
    pub(crate) fn step(prev: Option<Letter>, next: Letter) -> usize {
        match prev {
            None => next.key(),
            Some(p) => {
                let k = next.key();
                let skip = p.inverse().key();
                debug_assert_ne!(k, skip);
                if k > skip {
                    k - 1
                } else {
                    k
                }
            }
        }
    }

    /// Index of a reduced word of length `1..=max_len`.
    pub fn index(&self, w: &[Letter]) -> usize {
        assert!(!w.is_empty() && w.len() <= self.max_len);
        let mut within = 0usize;
        let mut prev = None;
        for (i, &x) in w.iter().enumerate() {
            let base = if i == 0 { 2 * self.rank } else { 2 * self.rank - 1 };
            within = within * base + Self::step(prev, x);
            prev = Some(x);
        }
        self.offsets[w.len()] + within
    }

    /// Offset of the length-`len` block, exposed for incremental indexing.
    pub(crate) fn offset(&self, len: usize) -> usize {
        self.offsets[len]
    }
}

/// Number of cyclically reduced words of length `len`:
/// `(2N-1)^len + N + (N-1)(-1)^len`.
pub fn cyclically_reduced_count(rank: usize, len: usize) -> u128 {
    let n = rank as i128;
    let v = (2 * n - 1).pow(len as u32) + n + (n - 1) * if len % 2 == 0 { 1 } else { -1 };
    v as u128
}

/// Number of conjugacy classes of cyclic length `len`, by Burnside's lemma
/// over rotations: `(1/len) Σ_{d | len} totient(len/d) · CR(d)`.
pub fn conjugacy_class_count(rank: usize, len: usize) -> u128 {
    if len == 0 {
        return 0;
    }
    let mut total = 0u128;
    for d in 1..=len {
        if len % d == 0 {
            total += totient((len / d) as u64) as u128 * cyclically_reduced_count(rank, d);
        }
    }
    total / len as u128
}

fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn reduced_word_counts() {
        let ws = reduced_words(2, 3);
        assert_eq!(ws.len(), 4 + 12 + 36);
        assert_eq!(WordIndexer::new(2, 3).len(), ws.len());
        for (i, w) in ws.iter().enumerate() {
            assert_eq!(WordIndexer::new(2, 3).index(w.letters()), i);
        }
    }

    #[test]
    fn class_counts_match_brute_force() {
        for rank in 2..=3 {
            for len in 1..=6 {
                let mut classes = HashSet::new();
                for_each_reduced_word(rank, len, |w| {
                    let word = Word::from_reduced(w.to_vec());
                    if word.is_cyclically_reduced() {
                        // naive least rotation as the oracle
                        let least = (0..len)
                            .map(|r| {
                                let mut v = w.to_vec();
                                v.rotate_left(r);
                                v
                            })
                            .min()
                            .unwrap();
                        classes.insert(least);
                    }
                });
                let listed = canonical_cyclic_words_of_length(rank, len);
                assert_eq!(listed.len(), classes.len(), "rank {rank} len {len}");
                assert_eq!(conjugacy_class_count(rank, len), classes.len() as u128);
                assert!(listed.windows(2).all(|p| p[0] < p[1]));
            }
        }
    }

    #[test]
    fn cyclically_reduced_formula() {
        assert_eq!(cyclically_reduced_count(2, 1), 4);
        assert_eq!(cyclically_reduced_count(2, 2), 12);
        let mut n = 0;
        for_each_reduced_word(3, 4, |w| {
            if w[0] != w[3].inverse() {
                n += 1;
            }
        });
        assert_eq!(cyclically_reduced_count(3, 4), n);
    }
}
