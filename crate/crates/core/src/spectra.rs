//! Transition matrices of rose maps and their Perron-Frobenius data.

use std::collections::HashSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::word::{CyclicWord, Letter, Word};

/// `entry(i, j)` counts occurrences of `a_i^{±1}` in `Φ(a_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn from_rows(entries: Vec<Vec<u64>>) -> Result<TransitionMatrix> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("transition matrix must be square and nonempty".into()));
        }
        Ok(TransitionMatrix { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.n).map(|j| (0..self.n).map(|i| self.entries[i][j]).sum()).collect()
    }

    pub fn mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.n;
        let mut out = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += a * other.entries[k][j];
                }
            }
        }
        TransitionMatrix { n, entries: out }
    }

    /// Strongly connected components of the digraph `i -> j` iff `entry(i, j) > 0`.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.entries[i][j] > 0 {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        comps.sort();
        comps
    }

    pub fn is_irreducible(&self) -> bool {
        self.components().len() == 1
    }

    /// Some power `M^k` with `k <= (n-1)^2 + 1` is entrywise positive (Wielandt).
    pub fn is_primitive(&self) -> bool {
        let n = self.n;
        let base: Vec<Vec<bool>> = self.entries.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
        let mut power = base.clone();
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 1..bound {
            if power.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if power[i][k] {
                        for j in 0..n {
                            next[i][j] |= base[k][j];
                        }
                    }
                }
            }
            power = next;
        }
        power.iter().all(|r| r.iter().all(|&x| x))
    }
}

pub fn transition_matrix(phi: &Automorphism) -> TransitionMatrix {
    let n = phi.rank();
    let mut entries = vec![vec![0u64; n]; n];
    for j in 0..n {
        for x in phi.images()[j].letters() {
            entries[x.generator() - 1][j] += 1;
        }
    }
    TransitionMatrix { n, entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub lambda: f64,
    /// Positive eigenvector normalized to sum 1.
    pub eigvec: Vec<f64>,
    pub iterations: usize,
    /// `||M v - λ v||_1` at the last iterate.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub primitive: bool,
}

pub const DEFAULT_PF_TOL: f64 = 1e-10;
pub const DEFAULT_PF_MAX_ITER: usize = 100_000;

fn residual(m: &TransitionMatrix, v: &[f64], lambda: f64) -> f64 {
    (0..m.n)
        .map(|i| {
            let mv: f64 = (0..m.n).map(|j| m.entries[i][j] as f64 * v[j]).sum();
            (mv - lambda * v[i]).abs()
        })
        .sum()
}

/// Power iteration from the uniform vector.
///
/// Imprimitive irreducible matrices are iterated as `M + I` (same eigenvector,
/// eigenvalue shifted by one), since plain power iteration cycles on them.
pub fn pf_eigen(m: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<SpectralData> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let components = m.components();
    if components.len() != 1 {
        return Err(Error::Reducible { components });
    }
    let n = m.n;
    let primitive = m.is_primitive();
    let shift = if primitive { 0.0 } else { 1.0 };
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda_prev = f64::NAN;
    let mut history = Vec::new();
    for it in 1..=max_iter {
        let mut w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m.entries[i][j] as f64 * v[j]).sum::<f64>() + shift * v[i])
            .collect();
        let rayleigh = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|b| b * b).sum::<f64>();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        v = w;
        let lambda = rayleigh - shift;
        let r = residual(m, &v, lambda);
        history.push(r);
        // The residual guard rules out stopping on a transient plateau of the quotient.
        if (lambda - lambda_prev).abs() < tol && r < tol.sqrt() {
            return Ok(SpectralData {
                lambda,
                eigvec: v,
                iterations: it,
                residual: r,
                residual_history: history,
                primitive,
            });
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Outcome of the rose train-track test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainTrackReport {
    pub train_track: bool,
    /// An illegal turn `{d1, d2}` crossed by the image of `generator`.
    pub illegal_turn: Option<(Letter, Letter, usize)>,
}

fn derivative(phi: &Automorphism, d: Letter) -> Letter {
    let img = phi.image(d.generator());
    if d.is_inverse() {
        img.letters().last().expect("nontrivial image").inverse()
    } else {
        img.letters()[0]
    }
}

fn turn(a: Letter, b: Letter) -> (Letter, Letter) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Whether iterating `Df` on the turn `{a, b}` ever makes it degenerate.
fn is_illegal(phi: &Automorphism, a: Letter, b: Letter) -> bool {
    let mut seen = HashSet::new();
    let mut t = turn(a, b);
    loop {
        if t.0 == t.1 {
            return true;
        }
        if !seen.insert(t) {
            return false;
        }
        t = turn(derivative(phi, t.0), derivative(phi, t.1));
    }
}

/// The rose map of `φ` is a train track iff every turn crossed by a generator
/// image is legal.
pub fn is_train_track_on_rose(phi: &Automorphism) -> Result<TrainTrackReport> {
    if let Some(i) = phi.images().iter().position(|w| w.is_identity()) {
        return Err(Error::TrivialImage { generator: i + 1 });
    }
    for (j, img) in phi.images().iter().enumerate() {
        for pair in img.letters().windows(2) {
            let (d1, d2) = (pair[0].inverse(), pair[1]);
            if is_illegal(phi, d1, d2) {
                let (x, y) = turn(d1, d2);
                return Ok(TrainTrackReport {
                    train_track: false,
                    illegal_turn: Some((x, y, j + 1)),
                });
            }
        }
    }
    Ok(TrainTrackReport {
        train_track: true,
        illegal_turn: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRate {
    /// `r_k = ||Φ^{k+1}(w)|| / ||Φ^k(w)||` for `k < n`.
    pub ratios: Vec<f64>,
    pub estimate: f64,
}

/// Cyclic-length growth ratios of `w` under iteration of `Φ`.
pub fn growth_rate(phi: &Automorphism, w: &Word, n: usize) -> Result<GrowthRate> {
    if w.is_identity() {
        return Err(Error::TrivialWord);
    }
    if n < 2 {
        return Err(Error::InvalidParameter("growth rate needs n >= 2".into()));
    }
    let mut cur = CyclicWord::new(w);
    let mut ratios = Vec::with_capacity(n);
    for _ in 0..n {
        let next = phi.apply_cyclic(&cur)?;
        ratios.push(next.len() as f64 / cur.len() as f64);
        cur = next;
    }
    let estimate = *ratios.last().unwrap();
    Ok(GrowthRate { ratios, estimate })
}

/// Representative-free stretch estimate: growth ratio of the total cyclic
/// length of the generator classes, iterated until the words reach
/// `letter_budget` letters or `max_steps` steps.
pub fn stretch_estimate(phi: &Automorphism, letter_budget: usize, max_steps: usize) -> f64 {
    let mut classes: Vec<CyclicWord> = (1..=phi.rank()).map(|g| CyclicWord::new(&Word::gen(g))).collect();
    let mut total: usize = classes.iter().map(|c| c.len()).sum();
    let mut ratio = 1.0;
    for _ in 0..max_steps {
        classes = classes
            .iter()
            .map(|c| phi.apply_cyclic(c).expect("same rank"))
            .collect();
        let next: usize = classes.iter().map(|c| c.len()).sum();
        ratio = next as f64 / total as f64;
        total = next;
        if total > letter_budget {
            break;
        }
    }
    ratio
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> Automorphism {
        Automorphism::parse(&["ab", "a"], &["b", "Ba"]).unwrap()
    }

    fn tribo() -> Automorphism {
        Automorphism::parse(&["b", "c", "ab"], &["cA", "a", "b"]).unwrap()
    }

    /// Real root of a monic polynomial by bisection on [lo, hi].
    fn bisect(p: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        assert!(p(lo) * p(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(lo) * p(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn transition_matrix_examples() {
        assert_eq!(transition_matrix(&fib()).rows(), &[vec![1, 1], vec![1, 0]]);
        assert_eq!(transition_matrix(&Automorphism::identity(2)).rows(), &[vec![1, 0], vec![0, 1]]);
        let m = transition_matrix(&tribo());
        // columns are images: a->b, b->c, c->ab
        assert_eq!(m.rows(), &[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]);
        assert_eq!(m.column_sums(), vec![1, 1, 2]);
    }

    #[test]
    fn pf_anchors() {
        let golden = bisect(|x| x * x - x - 1.0, 1.0, 2.0);
        let d = pf_eigen(&transition_matrix(&fib()), DEFAULT_PF_TOL, DEFAULT_PF_MAX_ITER).unwrap();
        assert!((d.lambda - golden).abs() < 1e-6);
        assert!(d.eigvec.iter().all(|&x| x > 0.0));
        let plastic = bisect(|x| x * x * x - x - 1.0, 1.0, 2.0);
        let d = pf_eigen(&transition_matrix(&tribo()), DEFAULT_PF_TOL, DEFAULT_PF_MAX_ITER).unwrap();
        assert!((d.lambda - plastic).abs() < 1e-6);
        assert!(d.primitive);
        let err = pf_eigen(&transition_matrix(&Automorphism::identity(2)), 1e-10, 100).unwrap_err();
        assert_eq!(err, Error::Reducible { components: vec![vec![0], vec![1]] });
    }

    #[test]
    fn permutations_have_lambda_one() {
        let swap = Automorphism::parse(&["b", "a"], &["b", "a"]).unwrap();
        let d = pf_eigen(&transition_matrix(&swap), 1e-10, 1000).unwrap();
        assert_eq!(d.lambda, 1.0);
        assert!(!d.primitive);
        let cycle = Automorphism::signed_permutation(&[1, 2, 0], &[false, true, false]).unwrap();
        let d = pf_eigen(&transition_matrix(&cycle), 1e-10, 1000).unwrap();
        assert_eq!(d.lambda, 1.0);
    }

    #[test]
    fn residual_decreases_after_burn_in() {
        let d = pf_eigen(&transition_matrix(&fib()), 1e-12, 10_000).unwrap();
        let h = &d.residual_history[3..];
        assert!(h.windows(2).all(|p| p[1] < p[0]), "{h:?}");
    }

    #[test]
    fn complex_subdominant_pair_breaks_stepwise_monotonicity() {
        // x^3 - x - 1 has a complex pair of modulus about 0.869, so the residual
        // oscillates step to step while its envelope still decays.
        let d = pf_eigen(&transition_matrix(&tribo()), 1e-12, 10_000).unwrap();
        let h = &d.residual_history[3..];
        assert!(h.windows(2).any(|p| p[1] > p[0]));
        let block_max: Vec<f64> = h.chunks(8).map(|c| c.iter().cloned().fold(0.0, f64::max)).collect();
        assert!(block_max.windows(2).all(|p| p[1] < p[0]), "{block_max:?}");
    }

    #[test]
    fn primitivity() {
        assert!(transition_matrix(&fib()).is_primitive());
        assert!(!TransitionMatrix::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap().is_primitive());
    }

    #[test]
    fn train_track_examples() {
        assert!(is_train_track_on_rose(&fib()).unwrap().train_track);
        assert!(is_train_track_on_rose(&tribo()).unwrap().train_track);
        assert!(is_train_track_on_rose(&Automorphism::identity(3)).unwrap().train_track);
    }

    #[test]
    fn illegal_turn_detected() {
        // a -> Ba, b -> a: Df(a) = B, Df(A) = A, Df(b) = a, Df(B) = A.
        // The image Ba crosses {b, a} -> {a, B} -> {B, A} -> {A, A}.
        let phi = Automorphism::parse(&["Ba", "a"], &["b", "bA"]).unwrap();
        let report = is_train_track_on_rose(&phi).unwrap();
        assert!(!report.train_track);
        assert_eq!(report.illegal_turn, Some((Letter::gen(1), Letter::gen(2), 1)));
    }

    #[test]
    fn growth_examples() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let g = growth_rate(&fib(), &"a".parse().unwrap(), 16).unwrap();
        assert_eq!(g.ratios.len(), 16);
        assert!((g.estimate - golden).abs() < 1e-3);
        let g = growth_rate(&Automorphism::identity(2), &"ab".parse().unwrap(), 5).unwrap();
        assert!(g.ratios.iter().all(|&r| r == 1.0));
        let plastic = 1.324717957244746;
        // oracle: Padovan-type recurrence L_{k+3} = L_{k+1} + L_k from (1, 1, 1)
        let mut l = vec![1u64, 1, 1];
        while l.len() < 30 {
            let k = l.len();
            l.push(l[k - 2] + l[k - 3]);
        }
        let g = growth_rate(&tribo(), &"a".parse().unwrap(), 24).unwrap();
        assert_eq!(g.ratios[23], l[24] as f64 / l[23] as f64);
        assert!((g.estimate - plastic).abs() < 1e-3);
        assert_eq!(growth_rate(&fib(), &Word::identity(), 4), Err(Error::TrivialWord));
        assert!(growth_rate(&fib(), &"a".parse().unwrap(), 1).is_err());
    }

    #[test]
    fn squared_matrix_bounds_composition() {
        for phi in [fib(), tribo()] {
            let m = transition_matrix(&phi);
            let sq = transition_matrix(&phi.compose(&phi).unwrap());
            // positive automorphisms: no cancellation, so M(φ²) = M(φ)²
            assert_eq!(sq, m.mul(&m));
        }
        let inv = fib().inverse();
        let m = transition_matrix(&inv);
        let sq = transition_matrix(&inv.compose(&inv).unwrap());
        let bound = m.mul(&m).column_sums();
        assert!(sq.column_sums().iter().zip(&bound).all(|(a, b)| a <= b));
    }
}
