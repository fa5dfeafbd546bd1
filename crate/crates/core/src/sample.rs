//! Random words, automorphisms, currents and rose points for randomized checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automorphism::Automorphism;
use crate::currents::RationalCurrent;
use crate::metric_trees::TreePoint;
use crate::word::{Letter, Word};
use crate::Rational;

/// A reduced word whose length is uniform in `min_len..=max_len`.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, min_len: usize, max_len: usize) -> Word {
    let len = rng.gen_range(min_len..=max_len);
    let letters: Vec<Letter> = Letter::all(rank).collect();
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let x = *letters.choose(rng).expect("rank >= 1");
        if out.last() != Some(&x.inverse()) {
            out.push(x);
        }
    }
    Word::from_letters(out)
}

/// A random product of `steps` transvections followed by a signed permutation.
pub fn random_automorphism<R: Rng>(rng: &mut R, rank: usize, steps: usize) -> Automorphism {
    let mut phi = Automorphism::identity(rank);
    for _ in 0..steps {
        let i = rng.gen_range(1..=rank);
        let mut j = rng.gen_range(1..rank);
        if j >= i {
            j += 1;
        }
        let t = Automorphism::transvection(rank, i, j, rng.gen(), rng.gen()).expect("distinct indices");
        phi = phi.compose(&t).expect("equal ranks");
    }
    let mut perm: Vec<usize> = (0..rank).collect();
    perm.shuffle(rng);
    let flips: Vec<bool> = (0..rank).map(|_| rng.gen()).collect();
    let sigma = Automorphism::signed_permutation(&perm, &flips).expect("valid permutation");
    phi.compose(&sigma).expect("equal ranks")
}

/// A positive rational `p/q` with `1 <= p, q <= bound`.
pub fn random_positive_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    Rational::new(rng.gen_range(1..=bound).into(), rng.gen_range(1..=bound).into())
}

/// `1..=max_terms` counting currents of nontrivial words of length `<= max_len`
/// with positive rational coefficients.
pub fn random_current<R: Rng>(rng: &mut R, rank: usize, max_terms: usize, max_len: usize) -> RationalCurrent {
    let terms = rng.gen_range(1..=max_terms);
    let parts: Vec<(Rational, Word)> = (0..terms)
        .map(|_| (random_positive_rational(rng, 9), random_word(rng, rank, 1, max_len)))
        .collect();
    RationalCurrent::from_terms(rank, parts).expect("positive coefficients, matching rank")
}

/// A rose point with random rational edge lengths, marking and scale.
pub fn random_tree_point<R: Rng>(rng: &mut R, rank: usize, marking_steps: usize) -> TreePoint {
    let lengths = (0..rank).map(|_| random_positive_rational(rng, 9)).collect();
    let marking = random_automorphism(rng, rank, marking_steps);
    TreePoint::new(lengths, marking, random_positive_rational(rng, 5)).expect("positive data")
}
