//! Whitehead length minimization and primitivity.

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::word::{CyclicWord, Letter, Word};

/// All nontrivial type-II Whitehead automorphisms of rank `rank`.
///
/// For a multiplier letter `m` and each other generator `x` the move picks
/// one of `x`, `x m`, `m^-1 x`, `m^-1 x m`. Type-I moves (signed basis
/// permutations) preserve cyclic length and are not listed.
pub fn whitehead_moves(rank: usize) -> Vec<Automorphism> {
    let mut out = Vec::new();
    for m in Letter::all(rank) {
        let mw = Word::from_letters([m]);
        let others: Vec<usize> = (1..=rank).filter(|&g| g != m.generator()).collect();
        let patterns = 4usize.pow(others.len() as u32);
        for code in 1..patterns {
            let mut images: Vec<Word> = (1..=rank).map(Word::gen).collect();
            let mut inverse_images = images.clone();
            let mut c = code;
            for &g in &others {
                let x = Word::gen(g);
                let (img, inv) = match c % 4 {
                    0 => (x.clone(), x.clone()),
                    1 => (x.mul(&mw), x.mul(&mw.inverse())),
                    2 => (mw.inverse().mul(&x), mw.mul(&x)),
                    _ => (
                        mw.inverse().mul(&x).mul(&mw),
                        mw.mul(&x).mul(&mw.inverse()),
                    ),
                };
                images[g - 1] = img;
                inverse_images[g - 1] = inv;
                c /= 4;
            }
            out.push(Automorphism::new(images, inverse_images).expect("Whitehead move is invertible"));
        }
    }
    out
}

/// Steepest-descent Whitehead reduction of the cyclic length of `w`.
///
/// Returns the minimal cyclic length reached and a cyclically reduced word of
/// that length in the `Aut(F_N)`-orbit of `w`. By peak reduction the greedy
/// descent reaches the orbit minimum, so `w` is primitive iff the result is 1.
pub fn whitehead_minimize(w: &Word, rank: usize) -> Result<(usize, Word)> {
    if w.is_identity() {
        return Err(Error::TrivialWord);
    }
    if w.max_generator() > rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found: w.max_generator(),
        });
    }
    if rank < 2 {
        return Ok((w.cyclic_len(), CyclicWord::new(w).as_word()));
    }
    let moves = whitehead_moves(rank);
    let mut current = CyclicWord::new(w);
    loop {
        let best = moves
            .iter()
            .map(|m| m.apply_cyclic(&current).expect("rank checked"))
            .min_by(|a, b| a.shortlex_cmp(b));
        match best {
            Some(next) if next.len() < current.len() => current = next,
            _ => break,
        }
    }
    Ok((current.len(), current.as_word()))
}

pub fn is_primitive(w: &Word, rank: usize) -> Result<bool> {
    Ok(whitehead_minimize(w, rank)?.0 == 1)
}
