use std::fmt;

use crate::error::{Error, Result};
use crate::word::{push_reduced, CyclicWord, Letter, Word};

/// An automorphism of `F_N` given by generator images together with the
/// images of its inverse. Both directions are checked on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    rank: usize,
    images: Vec<Word>,
    inverse_images: Vec<Word>,
}

/// True iff the two image lists define mutually inverse endomorphisms.
pub fn verify_automorphism(images: &[Word], inverse_images: &[Word]) -> bool {
    first_failing_generator(images, inverse_images).is_none()
}

fn first_failing_generator(images: &[Word], inverse_images: &[Word]) -> Option<usize> {
    let n = images.len();
    if inverse_images.len() != n {
        return Some(0);
    }
    let in_range = |ws: &[Word]| ws.iter().all(|w| w.max_generator() <= n);
    if !in_range(images) || !in_range(inverse_images) {
        return Some(0);
    }
    for g in 1..=n {
        let x = Word::gen(g);
        if substitute(images, &substitute(inverse_images, &x)) != x
            || substitute(inverse_images, &substitute(images, &x)) != x
        {
            return Some(g);
        }
    }
    None
}

fn substitute(images: &[Word], w: &Word) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for &x in w.letters() {
        let img = &images[x.generator() - 1];
        if x.is_inverse() {
            for &y in img.letters().iter().rev() {
                push_reduced(&mut out, y.inverse());
            }
        } else {
            for &y in img.letters() {
                push_reduced(&mut out, y);
            }
        }
    }
    Word::from_reduced(out)
}

impl Automorphism {
    pub fn new(images: Vec<Word>, inverse_images: Vec<Word>) -> Result<Automorphism> {
        let rank = images.len();
        if rank < 2 {
            return Err(Error::RankTooSmall(rank));
        }
        if inverse_images.len() != rank {
            return Err(Error::WrongImageCount {
                expected: rank,
                found: inverse_images.len(),
            });
        }
        for w in images.iter().chain(&inverse_images) {
            if w.max_generator() > rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: w.max_generator(),
                });
            }
        }
        if let Some(generator) = first_failing_generator(&images, &inverse_images) {
            return Err(Error::NotInverse { generator });
        }
        Ok(Automorphism {
            rank,
            images,
            inverse_images,
        })
    }

    /// Parses image literals such as `["ab", "a"]` / `["b", "Ba"]`.
    pub fn parse(images: &[&str], inverse_images: &[&str]) -> Result<Automorphism> {
        let parse_all = |v: &[&str]| v.iter().map(|s| s.parse()).collect::<Result<Vec<Word>>>();
        Automorphism::new(parse_all(images)?, parse_all(inverse_images)?)
    }

    pub fn identity(rank: usize) -> Automorphism {
        let images: Vec<Word> = (1..=rank).map(Word::gen).collect();
        Automorphism {
            rank,
            inverse_images: images.clone(),
            images,
        }
    }

    /// Sends generator `i` to `perm[i]` (0-based), inverting it when `flips[i]`.
    pub fn signed_permutation(perm: &[usize], flips: &[bool]) -> Result<Automorphism> {
        let rank = perm.len();
        let mut seen = vec![false; rank];
        for &p in perm {
            if p >= rank || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
        }
        let images: Vec<Word> = (0..rank)
            .map(|i| Word::from_letters([Letter::new(perm[i] + 1, flips[i])]))
            .collect();
        let mut inverse_images = vec![Word::identity(); rank];
        for i in 0..rank {
            inverse_images[perm[i]] = Word::from_letters([Letter::new(i + 1, flips[i])]);
        }
        Automorphism::new(images, inverse_images)
    }

    /// Nielsen transvection `a_i -> a_i a_j^e` (or `a_j^e a_i` when `left`), 1-based.
    pub fn transvection(rank: usize, i: usize, j: usize, inverse: bool, left: bool) -> Result<Automorphism> {
        if i == j || i == 0 || j == 0 || i > rank || j > rank {
            return Err(Error::InvalidParameter(format!("bad transvection indices {i}, {j}")));
        }
        let t = Word::from_letters([Letter::new(j, inverse)]);
        let ai = Word::gen(i);
        let mut images: Vec<Word> = (1..=rank).map(Word::gen).collect();
        let mut inverse_images = images.clone();
        if left {
            images[i - 1] = t.mul(&ai);
            inverse_images[i - 1] = t.inverse().mul(&ai);
        } else {
            images[i - 1] = ai.mul(&t);
            inverse_images[i - 1] = ai.mul(&t.inverse());
        }
        Automorphism::new(images, inverse_images)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn inverse_images(&self) -> &[Word] {
        &self.inverse_images
    }

    pub fn image(&self, generator: usize) -> &Word {
        &self.images[generator - 1]
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            rank: self.rank,
            images: self.inverse_images.clone(),
            inverse_images: self.images.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, w)| *w == Word::gen(i + 1))
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.max_generator() > self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: w.max_generator(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.check_word(w)?;
        Ok(substitute(&self.images, w))
    }

    /// Image of a conjugacy class.
    pub fn apply_cyclic(&self, c: &CyclicWord) -> Result<CyclicWord> {
        Ok(CyclicWord::new(&self.apply(&c.as_word())?))
    }

    /// `compose(φ, ψ)` is `φ ∘ ψ`: first ψ, then φ.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let images = other.images.iter().map(|w| substitute(&self.images, w)).collect();
        let inverse_images = self
            .inverse_images
            .iter()
            .map(|w| substitute(&other.inverse_images, w))
            .collect();
        Ok(Automorphism {
            rank: self.rank,
            images,
            inverse_images,
        })
    }

    /// `k`-th power; negative exponents use the inverse.
    pub fn pow(&self, k: i64) -> Automorphism {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Automorphism::identity(self.rank);
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).expect("equal ranks");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq).expect("equal ranks");
            }
        }
        acc
    }

    /// Iterates on a cyclic word `k` times, keeping it cyclically reduced.
    pub fn iterate_cyclic(&self, c: &CyclicWord, k: usize) -> Result<CyclicWord> {
        let mut cur = c.clone();
        for _ in 0..k {
            cur = self.apply_cyclic(&cur)?;
        }
        Ok(cur)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", Word::gen(i + 1), w))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}
