//! Points of the rose orbit in unprojectivized Outer space, given by their
//! translation length functions, and finite-depth approximations of the
//! limit trees of an automorphism.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::word::{CyclicWord, Word};
use crate::Rational;

/// Anything that assigns translation lengths to conjugacy classes.
pub trait LengthFunction {
    type Value;

    fn rank(&self) -> usize;

    fn length_of_class(&self, c: &CyclicWord) -> Self::Value;

    fn translation_length(&self, w: &Word) -> Result<Self::Value> {
        if w.max_generator() > self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: w.max_generator(),
            });
        }
        Ok(self.length_of_class(&CyclicWord::new(w)))
    }
}

/// A metric rose with marking: `||w|| = scale * sum of edge lengths along the
/// cyclic reduction of marking(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePoint {
    edge_lengths: Vec<Rational>,
    marking: Automorphism,
    scale: Rational,
}

impl TreePoint {
    pub fn new(edge_lengths: Vec<Rational>, marking: Automorphism, scale: Rational) -> Result<TreePoint> {
        if edge_lengths.len() != marking.rank() {
            return Err(Error::RankMismatch {
                expected: marking.rank(),
                found: edge_lengths.len(),
            });
        }
        if let Some(bad) = edge_lengths.iter().find(|l| !l.is_positive()) {
            return Err(Error::InvalidParameter(format!("edge length {bad} is not positive")));
        }
        if !scale.is_positive() {
            return Err(Error::InvalidParameter(format!("scale {scale} is not positive")));
        }
        Ok(TreePoint {
            edge_lengths,
            marking,
            scale,
        })
    }

    /// The Cayley tree of the standard basis: all edges of length 1.
    pub fn unit_rose(rank: usize) -> TreePoint {
        TreePoint {
            edge_lengths: vec![Rational::one(); rank],
            marking: Automorphism::identity(rank),
            scale: Rational::one(),
        }
    }

    pub fn rose(edge_lengths: Vec<Rational>) -> Result<TreePoint> {
        let rank = edge_lengths.len();
        TreePoint::new(edge_lengths, Automorphism::identity(rank), Rational::one())
    }

    pub fn edge_lengths(&self) -> &[Rational] {
        &self.edge_lengths
    }

    pub fn marking(&self) -> &Automorphism {
        &self.marking
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// Total edge length of the quotient graph.
    pub fn volume(&self) -> Rational {
        self.edge_lengths.iter().sum::<Rational>() * &self.scale
    }

    /// `cT`.
    pub fn scaled(&self, c: &Rational) -> Result<TreePoint> {
        TreePoint::new(self.edge_lengths.clone(), self.marking.clone(), &self.scale * c)
    }

    /// Right action: `||w||_{Tφ} = ||Φ(w)||_T`.
    pub fn act_right(&self, phi: &Automorphism) -> Result<TreePoint> {
        Ok(TreePoint {
            edge_lengths: self.edge_lengths.clone(),
            marking: self.marking.compose(phi)?,
            scale: self.scale.clone(),
        })
    }

    /// Rescales to covolume one, staying in the same projective class.
    pub fn normalize_covolume(&self) -> TreePoint {
        let vol = self.volume();
        TreePoint {
            edge_lengths: self.edge_lengths.clone(),
            marking: self.marking.clone(),
            scale: &self.scale / vol,
        }
    }

    /// Length of a class already expressed in the rose's own basis.
    pub(crate) fn rose_length(&self, c: &CyclicWord) -> Rational {
        let mut counts = vec![0u64; self.edge_lengths.len()];
        for x in c.letters() {
            counts[x.generator() - 1] += 1;
        }
        let sum: Rational = counts
            .iter()
            .zip(&self.edge_lengths)
            .filter(|(n, _)| **n > 0)
            .map(|(&n, l)| l * Rational::from_integer(n.into()))
            .sum();
        sum * &self.scale
    }
}

impl LengthFunction for TreePoint {
    type Value = Rational;

    fn rank(&self) -> usize {
        self.marking.rank()
    }

    fn length_of_class(&self, c: &CyclicWord) -> Rational {
        if c.is_empty() {
            return Rational::zero();
        }
        let image = self.marking.apply_cyclic(c).expect("rank checked by caller");
        self.rose_length(&image)
    }
}

/// `||w|| = λ̂^-n ||Φ^n(w)||_base`, a depth-`n` approximation of the
/// attracting tree of `Φ`.
#[derive(Debug, Clone)]
pub struct LimitTreeApprox {
    base: TreePoint,
    automorphism: Automorphism,
    depth: usize,
    stretch: f64,
}

impl LimitTreeApprox {
    pub fn new(phi: &Automorphism, base: TreePoint, depth: usize, stretch: f64) -> Result<LimitTreeApprox> {
        if !(stretch > 1.0) {
            return Err(Error::StretchTooSmall(stretch));
        }
        if depth < 1 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        if base.rank() != phi.rank() {
            return Err(Error::RankMismatch {
                expected: phi.rank(),
                found: base.rank(),
            });
        }
        Ok(LimitTreeApprox {
            base,
            automorphism: phi.clone(),
            depth,
            stretch,
        })
    }

    pub fn base(&self) -> &TreePoint {
        &self.base
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.automorphism
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn with_depth(&self, depth: usize) -> Result<LimitTreeApprox> {
        LimitTreeApprox::new(&self.automorphism, self.base.clone(), depth, self.stretch)
    }

    /// Unnormalized base lengths of `Φ^k(c)` for `k = 0..=depth`.
    fn length_sequence(&self, c: &CyclicWord, depth: usize) -> Vec<Rational> {
        let mut cur = c.clone();
        let mut out = vec![self.base.length_of_class(&cur)];
        for _ in 0..depth {
            cur = self.automorphism.apply_cyclic(&cur).expect("rank checked");
            out.push(self.base.length_of_class(&cur));
        }
        out
    }

    /// Projective L1 distance between the depth `n` and `n + 1` length vectors
    /// on `probe`, each normalized to sum 1.
    pub fn residual(&self, probe: &[CyclicWord]) -> f64 {
        let mut here = Vec::with_capacity(probe.len());
        let mut next = Vec::with_capacity(probe.len());
        for c in probe {
            let seq = self.length_sequence(c, self.depth + 1);
            here.push(seq[self.depth].to_f64().unwrap_or(f64::INFINITY));
            next.push(seq[self.depth + 1].to_f64().unwrap_or(f64::INFINITY));
        }
        normalized_l1(&here, &next)
    }
}

impl LengthFunction for LimitTreeApprox {
    type Value = f64;

    fn rank(&self) -> usize {
        self.automorphism.rank()
    }

    fn length_of_class(&self, c: &CyclicWord) -> f64 {
        if c.is_empty() {
            return 0.0;
        }
        let image = self.automorphism.iterate_cyclic(c, self.depth).expect("rank checked");
        let raw = self.base.length_of_class(&image).to_f64().unwrap_or(f64::INFINITY);
        raw / self.stretch.powi(self.depth as i32)
    }
}

pub fn limit_tree_approx(phi: &Automorphism, base: TreePoint, depth: usize, stretch: f64) -> Result<LimitTreeApprox> {
    LimitTreeApprox::new(phi, base, depth, stretch)
}

/// L1 distance after normalizing both vectors to sum 1.
pub(crate) fn normalized_l1(a: &[f64], b: &[f64]) -> f64 {
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    a.iter().zip(b).map(|(x, y)| (x / sa - y / sb).abs()).sum()
}

/// All canonical cyclic words of length `1..=max_len`, ordered by length then
/// letters. This is the default probe set for projective comparisons.
pub fn probe_set(rank: usize, max_len: usize) -> Vec<CyclicWord> {
    crate::enumerate::canonical_cyclic_words(rank, 1, max_len)
}
