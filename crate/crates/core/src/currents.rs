//! Rational geodesic currents and their weights in the simplicial chart of
//! the standard basis.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::automorphism::Automorphism;
use crate::enumerate::{reduced_words, WordIndexer};
use crate::error::{Error, Result};
use crate::word::{CyclicWord, Letter, Word};
use crate::Rational;

/// A finite nonnegative combination `Σ c_i η_{g_i}` of counting currents.
///
/// Classes are keyed by the smaller of the canonical forms of `g` and `g^-1`,
/// since `η_g = η_{g^-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCurrent {
    rank: usize,
    terms: BTreeMap<CyclicWord, Rational>,
}

fn class_key(c: CyclicWord) -> CyclicWord {
    let inv = c.inverse();
    if inv < c {
        inv
    } else {
        c
    }
}

impl RationalCurrent {
    pub fn zero(rank: usize) -> RationalCurrent {
        RationalCurrent {
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// The counting current `η_g`. The identity gives the zero current.
    pub fn counting(rank: usize, g: &Word) -> Result<RationalCurrent> {
        RationalCurrent::from_terms(rank, [(Rational::from_integer(1.into()), g.clone())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Rational, Word)>>(rank: usize, terms: I) -> Result<RationalCurrent> {
        let mut mu = RationalCurrent::zero(rank);
        for (c, g) in terms {
            if c.is_negative() {
                return Err(Error::NegativeCoefficient(c.to_string()));
            }
            if g.max_generator() > rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: g.max_generator(),
                });
            }
            mu.add_term(c, CyclicWord::new(&g));
        }
        Ok(mu)
    }

    fn add_term(&mut self, c: Rational, class: CyclicWord) {
        if c.is_zero() || class.is_empty() {
            return;
        }
        let key = class_key(class);
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += c;
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CyclicWord, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scaled(&self, c: &Rational) -> Result<RationalCurrent> {
        if c.is_negative() {
            return Err(Error::NegativeCoefficient(c.to_string()));
        }
        let mut out = RationalCurrent::zero(self.rank);
        for (class, coeff) in &self.terms {
            out.add_term(coeff * c, class.clone());
        }
        Ok(out)
    }

    /// Total letter count of the longest class, a cost proxy for iteration.
    pub fn max_class_len(&self) -> usize {
        self.terms.keys().map(|c| c.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for RationalCurrent {
    /// One `coefficient word` line per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (class, c) in &self.terms {
            writeln!(f, "{c} {class}")?;
        }
        Ok(())
    }
}

/// Parses the line format `3/2 abAB`; blank lines and `#` comments are skipped.
pub fn parse_current(rank: usize, text: &str) -> Result<RationalCurrent> {
    let mut terms = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coeff = parts.next().unwrap_or("");
        let word = parts.next().unwrap_or("");
        let c: Rational = coeff.parse().map_err(|_| Error::Parse {
            literal: line.to_string(),
            reason: "coefficient must look like 3 or 3/2".into(),
        })?;
        terms.push((c, word.parse()?));
    }
    RationalCurrent::from_terms(rank, terms)
}

/// `Σ c_i μ_i`.
pub fn linear_combine(parts: &[(Rational, RationalCurrent)]) -> Result<RationalCurrent> {
    let rank = parts.first().map(|(_, m)| m.rank).unwrap_or(0);
    let mut out = RationalCurrent::zero(rank);
    for (c, mu) in parts {
        if c.is_negative() {
            return Err(Error::NegativeCoefficient(c.to_string()));
        }
        if mu.rank != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: mu.rank,
            });
        }
        for (class, coeff) in &mu.terms {
            out.add_term(c * coeff, class.clone());
        }
    }
    Ok(out)
}

/// `φ μ`: each class `[g]` goes to `[Φ(g)]`.
pub fn push_forward(phi: &Automorphism, mu: &RationalCurrent) -> Result<RationalCurrent> {
    if phi.rank() != mu.rank {
        return Err(Error::RankMismatch {
            expected: phi.rank(),
            found: mu.rank,
        });
    }
    let mut out = RationalCurrent::zero(mu.rank);
    for (class, c) in &mu.terms {
        out.add_term(c.clone(), phi.apply_cyclic(class)?);
    }
    Ok(out)
}

/// Weights `<v, μ>` for all reduced `v` with `1 <= |v| <= L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    indexer: WordIndexer,
    weights: Vec<Rational>,
}

impl WeightSystem {
    pub fn zero(rank: usize, max_len: usize) -> WeightSystem {
        let indexer = WordIndexer::new(rank, max_len);
        let weights = vec![Rational::zero(); indexer.len()];
        WeightSystem { indexer, weights }
    }

    pub fn rank(&self) -> usize {
        self.indexer.rank()
    }

    pub fn max_len(&self) -> usize {
        self.indexer.max_len()
    }

    pub fn get(&self, v: &Word) -> Rational {
        if v.is_empty() || v.len() > self.max_len() || v.max_generator() > self.rank() {
            return Rational::zero();
        }
        self.weights[self.indexer.index(v.letters())].clone()
    }

    pub fn set(&mut self, v: &Word, value: Rational) -> Result<()> {
        if value.is_negative() {
            return Err(Error::NegativeCoefficient(value.to_string()));
        }
        if v.is_empty() || v.len() > self.max_len() || v.max_generator() > self.rank() {
            return Err(Error::InvalidParameter(format!("word {v} is outside the chart")));
        }
        let i = self.indexer.index(v.letters());
        self.weights[i] = value;
        Ok(())
    }

    /// `(v, <v>)` in index order.
    pub fn entries(&self) -> impl Iterator<Item = (Word, &Rational)> {
        reduced_words(self.rank(), self.max_len()).into_iter().zip(&self.weights)
    }

    pub fn values(&self) -> &[Rational] {
        &self.weights
    }

    /// `Σ_i <a_i>`, one term per generator; equals `<T_A, μ>`.
    pub fn total_length_weight(&self) -> Rational {
        (1..=self.rank())
            .map(|g| self.weights[self.indexer.index(&[Letter::gen(g)])].clone())
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.is_zero())
    }

    /// Floating-point weights scaled so the total length weight is 1.
    pub fn normalized(&self) -> Result<NormalizedWeights> {
        let total = self.total_length_weight();
        if total.is_zero() {
            return Err(Error::ZeroWeights);
        }
        let values = self
            .weights
            .iter()
            .map(|w| (w / &total).to_f64().unwrap_or(f64::NAN))
            .collect();
        Ok(NormalizedWeights {
            rank: self.rank(),
            max_len: self.max_len(),
            values,
        })
    }
}

/// Integer occurrence counts of every `v` and `v^-1` read around the class.
fn occurrence_counts(indexer: &WordIndexer, class: &CyclicWord, counts: &mut [u64]) {
    let forward = class.letters().to_vec();
    let backward: Vec<Letter> = forward.iter().rev().map(|x| x.inverse()).collect();
    let rank = indexer.rank();
    for circle in [&forward, &backward] {
        let m = circle.len();
        for start in 0..m {
            let mut within = 0usize;
            let mut prev = None;
            for len in 1..=indexer.max_len() {
                let x = circle[(start + len - 1) % m];
                let base = if len == 1 { 2 * rank } else { 2 * rank - 1 };
                within = within * base + WordIndexer::step(prev, x);
                prev = Some(x);
                counts[indexer.offset(len) + within] += 1;
            }
        }
    }
}

/// Counting weights `<v, μ>_A` for `|v| <= max_len`.
pub fn counting_weights(mu: &RationalCurrent, max_len: usize) -> Result<WeightSystem> {
    if max_len < 1 {
        return Err(Error::InvalidParameter("truncation length must be at least 1".into()));
    }
    let mut out = WeightSystem::zero(mu.rank, max_len);
    let mut counts = vec![0u64; out.indexer.len()];
    for (class, c) in &mu.terms {
        counts.iter_mut().for_each(|x| *x = 0);
        occurrence_counts(&out.indexer, class, &mut counts);
        for (w, &n) in out.weights.iter_mut().zip(&counts) {
            if n > 0 {
                *w += c * Rational::from_integer(n.into());
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KirchhoffSide {
    /// `<v> = Σ_x <vx>`
    Right,
    /// `<v> = Σ_x <xv>`
    Left,
    /// `<v> = <v^-1>`
    Flip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KirchhoffViolation {
    pub word: Word,
    pub side: KirchhoffSide,
    /// `<v>` minus the other side of the equation.
    pub deficit: Rational,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KirchhoffReport {
    pub violations: Vec<KirchhoffViolation>,
}

impl KirchhoffReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_kirchhoff(ws: &WeightSystem) -> KirchhoffReport {
    let mut violations = Vec::new();
    let rank = ws.rank();
    for (v, value) in ws.entries() {
        let flip = ws.get(&v.inverse());
        if *value != flip {
            violations.push(KirchhoffViolation {
                word: v.clone(),
                side: KirchhoffSide::Flip,
                deficit: value - flip,
            });
        }
        if v.len() >= ws.max_len() {
            continue;
        }
        let first = v.letters()[0];
        let last = *v.letters().last().unwrap();
        let mut right = Rational::zero();
        let mut left = Rational::zero();
        for x in Letter::all(rank) {
            if x != last.inverse() {
                right += ws.get(&v.mul(&Word::from_letters([x])));
            }
            if x != first.inverse() {
                left += ws.get(&Word::from_letters([x]).mul(&v));
            }
        }
        for (side, sum) in [(KirchhoffSide::Right, right), (KirchhoffSide::Left, left)] {
            if *value != sum {
                violations.push(KirchhoffViolation {
                    word: v.clone(),
                    side,
                    deficit: value - sum,
                });
            }
        }
    }
    KirchhoffReport { violations }
}

/// Projectivized, floating-point weight vector (total length weight 1).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedWeights {
    pub rank: usize,
    pub max_len: usize,
    pub values: Vec<f64>,
}

impl NormalizedWeights {
    /// L1 distance over one representative of each pair `{v, v^-1}`.
    ///
    /// Weight vectors are flip-symmetric, so this is half the full L1 sum.
    pub fn distance(&self, other: &NormalizedWeights) -> f64 {
        0.5 * self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

pub fn projective_distance(a: &WeightSystem, b: &WeightSystem) -> Result<f64> {
    if a.max_len() != b.max_len() {
        return Err(Error::TruncationMismatch(a.max_len(), b.max_len()));
    }
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    Ok(a.normalized()?.distance(&b.normalized()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn eta(s: &str) -> RationalCurrent {
        RationalCurrent::counting(w(s).max_generator().max(2), &w(s)).unwrap()
    }

    /// Oracle: count clockwise readings of v and of v^-1 starting at each vertex.
    fn count_oracle(class: &str, v: &str) -> i64 {
        let c = w(class);
        let m = c.len();
        let letters = c.letters();
        let mut total = 0;
        for target in [w(v), w(v).inverse()] {
            for start in 0..m {
                if (0..target.len()).all(|i| letters[(start + i) % m] == target.letters()[i]) {
                    total += 1;
                }
            }
        }
        total
    }

    #[test]
    fn counting_examples() {
        let ws = counting_weights(&eta("abab"), 2).unwrap();
        for (v, n) in [("a", 2), ("b", 2), ("ab", 2), ("ba", 2), ("aa", 0), ("aB", 0)] {
            assert_eq!(ws.get(&w(v)), r(n), "{v}");
            assert_eq!(n, count_oracle("abab", v));
        }
        let ws = counting_weights(&eta("a"), 2).unwrap();
        assert_eq!(ws.get(&w("a")), r(1));
        assert_eq!(ws.get(&w("aa")), r(1));
        assert_eq!(ws.get(&w("ab")), r(0));
        assert_eq!(ws.get(&w("b")), r(0));
        let half_b = eta("b").scaled(&q(1, 2)).unwrap();
        let ws = counting_weights(&half_b, 1).unwrap();
        assert_eq!(ws.get(&w("b")), q(1, 2));
        assert_eq!(ws.get(&w("a")), r(0));
    }

    #[test]
    fn counting_matches_oracle_on_longer_classes() {
        let class = "abAcbbCa";
        let mu = RationalCurrent::counting(3, &w(class)).unwrap();
        let ws = counting_weights(&mu, 3).unwrap();
        let cyc = CyclicWord::new(&w(class)).to_string();
        for (v, value) in ws.entries() {
            assert_eq!(*value, r(count_oracle(&cyc, &v.to_string())), "{v}");
        }
    }

    #[test]
    fn push_forward_examples() {
        let phi = Automorphism::parse(&["ab", "a"], &["b", "Ba"]).unwrap();
        assert_eq!(push_forward(&phi, &eta("b")).unwrap(), eta("a"));
        assert_eq!(push_forward(&phi, &eta("a")).unwrap(), eta("ab"));
        let mu = linear_combine(&[(r(2), eta("aB")), (q(1, 3), eta("abb"))]).unwrap();
        assert_eq!(push_forward(&Automorphism::identity(2), &mu).unwrap(), mu);
        assert!(push_forward(&Automorphism::identity(3), &mu).is_err());
    }

    #[test]
    fn linear_combine_examples() {
        assert_eq!(linear_combine(&[(r(1), eta("a")), (r(1), eta("a"))]).unwrap(), eta("a").scaled(&r(2)).unwrap());
        assert_eq!(linear_combine(&[(r(1), eta("ab")), (r(0), eta("b"))]).unwrap(), eta("ab"));
        let mu = linear_combine(&[(r(2), eta("a")), (r(3), eta("b"))]).unwrap();
        let ws = counting_weights(&mu, 1).unwrap();
        assert_eq!((ws.get(&w("a")), ws.get(&w("b"))), (r(2), r(3)));
        assert!(matches!(linear_combine(&[(r(-1), eta("a"))]), Err(Error::NegativeCoefficient(_))));
    }

    #[test]
    fn inverse_and_conjugate_classes_coincide() {
        assert_eq!(eta("aab"), eta("BAA"));
        assert_eq!(eta("aab"), eta("baa"));
        assert_eq!(eta("cabC"), RationalCurrent::counting(3, &w("ab")).unwrap());
    }

    #[test]
    fn kirchhoff_examples() {
        assert!(validate_kirchhoff(&counting_weights(&eta("abab"), 3).unwrap()).passed());
        let mut ws = WeightSystem::zero(2, 2);
        ws.set(&w("a"), r(1)).unwrap();
        ws.set(&w("A"), r(1)).unwrap();
        let report = validate_kirchhoff(&ws);
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v.word == w("a") && v.side == KirchhoffSide::Right && v.deficit == r(1)));
        assert!(validate_kirchhoff(&WeightSystem::zero(3, 3)).passed());
    }

    #[test]
    fn distance_examples() {
        let ws = counting_weights(&eta("aabAB"), 2).unwrap();
        assert_eq!(projective_distance(&ws, &ws).unwrap(), 0.0);
        let five = counting_weights(&eta("aabAB").scaled(&r(5)).unwrap(), 2).unwrap();
        assert!(projective_distance(&ws, &five).unwrap().abs() < 1e-15);
        let a = counting_weights(&eta("a"), 1).unwrap();
        let b = counting_weights(&eta("b"), 1).unwrap();
        assert_eq!(projective_distance(&a, &b).unwrap(), 2.0);
        assert_eq!(projective_distance(&a, &WeightSystem::zero(2, 1)), Err(Error::ZeroWeights));
        assert!(projective_distance(&a, &ws).is_err());
    }

    #[test]
    fn current_file_format() {
        let mu = parse_current(2, "3/2 abAB\n# comment\n1 a\n").unwrap();
        assert_eq!(parse_current(2, &mu.to_string()).unwrap(), mu);
        assert!(parse_current(2, "x abAB").is_err());
    }
}
