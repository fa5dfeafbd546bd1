//! Power iteration of automorphisms on truncated projective currents and on
//! the rose orbit, with the convergence diagnostics built on top of it.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::automorphism::Automorphism;
use crate::currents::{counting_weights, push_forward, NormalizedWeights, RationalCurrent};
use crate::error::{Error, Result};
use crate::intersection::{height, Height, HeightContext, Intersect};
use crate::metric_trees::{normalized_l1, LengthFunction, TreePoint};
use crate::word::{CyclicWord, Word};
use crate::Rational;

/// Iteration stops early once a class grows beyond this many letters.
pub const MAX_CLASS_LETTERS: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub k: usize,
    pub weights: NormalizedWeights,
    /// `<T_A, φ^k μ> / <T_A, φ^{k-1} μ>`
    pub scale_factor: f64,
    pub distance_to_previous: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub seed: RationalCurrent,
    pub max_len: usize,
    pub initial: NormalizedWeights,
    pub steps: Vec<TraceStep>,
}

impl IterationTrace {
    pub fn last_weights(&self) -> &NormalizedWeights {
        self.steps.last().map(|s| &s.weights).unwrap_or(&self.initial)
    }

    pub fn last_scale_factor(&self) -> Option<f64> {
        self.steps.last().map(|s| s.scale_factor)
    }
}

fn ratio(a: &Rational, b: &Rational) -> f64 {
    (a / b).to_f64().unwrap_or(f64::NAN)
}

/// One exact push-forward step with its truncated, normalized weights.
struct Stepper<'a> {
    phi: &'a Automorphism,
    rose: TreePoint,
    max_len: usize,
    current: RationalCurrent,
    length: Rational,
}

impl<'a> Stepper<'a> {
    fn new(phi: &'a Automorphism, seed: &RationalCurrent, max_len: usize) -> Result<(Stepper<'a>, NormalizedWeights)> {
        if seed.is_zero() {
            return Err(Error::ZeroCurrent);
        }
        if seed.rank() != phi.rank() {
            return Err(Error::RankMismatch {
                expected: phi.rank(),
                found: seed.rank(),
            });
        }
        let rose = TreePoint::unit_rose(phi.rank());
        let length = rose.intersect(seed)?;
        let weights = counting_weights(seed, max_len)?.normalized()?;
        Ok((
            Stepper {
                phi,
                rose,
                max_len,
                current: seed.clone(),
                length,
            },
            weights,
        ))
    }

    fn too_long(&self) -> bool {
        self.current.max_class_len() > MAX_CLASS_LETTERS
    }

    fn advance(&mut self) -> Result<(NormalizedWeights, f64)> {
        self.current = push_forward(self.phi, &self.current)?;
        let length = self.rose.intersect(&self.current)?;
        let scale = ratio(&length, &self.length);
        self.length = length;
        Ok((counting_weights(&self.current, self.max_len)?.normalized()?, scale))
    }
}

/// `n` steps of `μ -> φμ`, each recorded as a truncated projective point.
pub fn iterate_current(phi: &Automorphism, seed: &RationalCurrent, n: usize, max_len: usize) -> Result<IterationTrace> {
    if n < 1 {
        return Err(Error::InvalidParameter("iteration count must be at least 1".into()));
    }
    let (mut stepper, initial) = Stepper::new(phi, seed, max_len)?;
    let mut steps: Vec<TraceStep> = Vec::with_capacity(n);
    for k in 1..=n {
        if stepper.too_long() {
            break;
        }
        let (weights, scale_factor) = stepper.advance()?;
        let previous = steps.last().map(|s| &s.weights).unwrap_or(&initial);
        let distance_to_previous = weights.distance(previous);
        steps.push(TraceStep {
            k,
            weights,
            scale_factor,
            distance_to_previous,
        });
    }
    Ok(IterationTrace {
        seed: seed.clone(),
        max_len,
        initial,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigencurrentApprox {
    pub automorphism: Automorphism,
    pub max_len: usize,
    pub weights: NormalizedWeights,
    pub lambda_estimate: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Set when the trace returned near an earlier point instead of settling.
    pub period: Option<usize>,
    pub distance_history: Vec<f64>,
    pub scale_history: Vec<f64>,
    /// The exact current whose truncation is `weights`.
    pub approximant: RationalCurrent,
}

pub const PERIOD_WINDOW: usize = 4;

/// Iterates from `η_{a_1}` until successive truncations are within `tol`.
pub fn eigencurrent_approx(phi: &Automorphism, max_len: usize, tol: f64, max_iter: usize) -> Result<EigencurrentApprox> {
    eigencurrent_from(phi, &RationalCurrent::counting(phi.rank(), &Word::gen(1))?, max_len, tol, max_iter)
}

pub fn eigencurrent_from(
    phi: &Automorphism,
    seed: &RationalCurrent,
    max_len: usize,
    tol: f64,
    max_iter: usize,
) -> Result<EigencurrentApprox> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (mut stepper, initial) = Stepper::new(phi, seed, max_len)?;
    // history[0] is the most recent point
    let mut history: Vec<NormalizedWeights> = vec![initial];
    let mut distances = Vec::new();
    let mut scales = Vec::new();
    let mut lambda = 1.0;
    let mut converged = false;
    let mut period = None;
    let mut iterations = 0;
    while iterations < max_iter && !stepper.too_long() {
        let (weights, scale) = stepper.advance()?;
        iterations += 1;
        lambda = scale;
        scales.push(scale);
        let d = weights.distance(&history[0]);
        distances.push(d);
        if d < tol {
            converged = true;
        } else {
            period = (2..=PERIOD_WINDOW).find(|&p| history.len() >= p && weights.distance(&history[p - 1]) < tol);
        }
        history.insert(0, weights);
        history.truncate(PERIOD_WINDOW);
        if converged || period.is_some() {
            break;
        }
    }
    Ok(EigencurrentApprox {
        automorphism: phi.clone(),
        max_len,
        weights: history.swap_remove(0),
        lambda_estimate: lambda,
        converged,
        iterations,
        period,
        distance_history: distances,
        scale_history: scales,
        approximant: stepper.current,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightShiftRow {
    pub id: String,
    pub depth: usize,
    pub before: Height,
    pub after: Height,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightShiftReport {
    pub rows: Vec<HeightShiftRow>,
    pub max_residual: f64,
    pub mean_residual: f64,
}

/// Residuals `|f(φμ) - f(μ) - log(λ_+ λ_-)|` over the named test currents.
pub fn height_shift_check(
    ctx: &HeightContext,
    phi: &Automorphism,
    currents: &[(String, RationalCurrent)],
) -> Result<HeightShiftReport> {
    let rows: Vec<HeightShiftRow> = currents
        .par_iter()
        .map(|(id, mu)| {
            let before = height(ctx, mu)?;
            let after = height(ctx, &push_forward(phi, mu)?)?;
            let residual = match (before, after) {
                (Height::Finite(b), Height::Finite(a)) => (a - b - ctx.log_stretch_sum()).abs(),
                _ => f64::INFINITY,
            };
            Ok(HeightShiftRow {
                id: id.clone(),
                depth: ctx.depth(),
                before,
                after,
                residual,
            })
        })
        .collect::<Result<_>>()?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mean_residual = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.residual).sum::<f64>() / rows.len() as f64
    };
    Ok(HeightShiftReport {
        rows,
        max_residual,
        mean_residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinReport {
    pub traces: Vec<IterationTrace>,
    /// `(i, j, distance)` between final truncations, for `i < j`.
    pub pairwise: Vec<(usize, usize, f64)>,
    pub max_distance: f64,
    /// Seeds that end at least `tol` away from some other seed.
    pub outliers: Vec<usize>,
    pub passed: bool,
}

/// Checks that all seeds are carried to a common truncated limit.
pub fn basin_check(
    phi: &Automorphism,
    seeds: &[RationalCurrent],
    n: usize,
    max_len: usize,
    tol: f64,
) -> Result<BasinReport> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("basin check needs at least one seed".into()));
    }
    let traces: Vec<IterationTrace> = seeds
        .par_iter()
        .map(|s| iterate_current(phi, s, n, max_len))
        .collect::<Result<_>>()?;
    let mut pairwise = Vec::new();
    let mut outliers = Vec::new();
    for i in 0..traces.len() {
        for j in i + 1..traces.len() {
            let d = traces[i].last_weights().distance(traces[j].last_weights());
            pairwise.push((i, j, d));
        }
    }
    for i in 0..traces.len() {
        if pairwise.iter().any(|&(a, b, d)| (a == i || b == i) && d >= tol) {
            outliers.push(i);
        }
    }
    let max_distance = pairwise.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(BasinReport {
        traces,
        pairwise,
        max_distance,
        passed: outliers.is_empty(),
        outliers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeConvergenceReport {
    /// `distances[k-1]` compares the normalized vectors of `T0 φ^k` and `T0 φ^{k-1}`.
    pub distances: Vec<f64>,
    pub final_vector: Vec<f64>,
    pub final_distance: f64,
    pub passed: bool,
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Length functions of `T0 φ^k` on `probe`, compared step to step.
pub fn tree_convergence_check(
    phi: &Automorphism,
    start: &TreePoint,
    n: usize,
    probe: &[CyclicWord],
    tol: f64,
) -> Result<TreeConvergenceReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("tree convergence needs n >= 2".into()));
    }
    if start.rank() != phi.rank() {
        return Err(Error::RankMismatch {
            expected: phi.rank(),
            found: start.rank(),
        });
    }
    if probe.is_empty() {
        return Err(Error::InvalidParameter("probe set is empty".into()));
    }
    let lengths = |classes: &[CyclicWord]| -> Vec<f64> {
        classes
            .iter()
            .map(|c| start.length_of_class(c).to_f64().unwrap_or(f64::INFINITY))
            .collect()
    };
    let mut classes: Vec<CyclicWord> = probe.to_vec();
    let mut prev = lengths(&classes);
    let mut distances = Vec::with_capacity(n);
    for _ in 0..n {
        classes = classes.par_iter().map(|c| phi.apply_cyclic(c)).collect::<Result<_>>()?;
        let next = lengths(&classes);
        distances.push(normalized_l1(&prev, &next));
        prev = next;
    }
    let final_distance = *distances.last().unwrap();
    Ok(TreeConvergenceReport {
        final_vector: normalized(&prev),
        final_distance,
        passed: final_distance < tol,
        distances,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport {
    pub heights: Vec<Height>,
    /// First `k` with `f(φ^k μ) > bound`.
    pub escaped_at: Option<usize>,
}

/// Heights of `φ^k μ` for `k = 0..=max_k`, watching for the first to exceed `bound`.
pub fn escape_check(ctx: &HeightContext, phi: &Automorphism, seed: &RationalCurrent, max_k: usize, bound: f64) -> Result<EscapeReport> {
    let mut mu = seed.clone();
    let mut heights = Vec::with_capacity(max_k + 1);
    let mut escaped_at = None;
    for k in 0..=max_k {
        if k > 0 {
            mu = push_forward(phi, &mu)?;
        }
        let h = height(ctx, &mu)?;
        heights.push(h);
        if escaped_at.is_none() && h.to_f64() > bound {
            escaped_at = Some(k);
        }
    }
    Ok(EscapeReport { heights, escaped_at })
}

/// The `⟨T_A, ·⟩` total-length growth of a current over one step.
pub fn length_growth(phi: &Automorphism, mu: &RationalCurrent) -> Result<f64> {
    let rose = TreePoint::unit_rose(phi.rank());
    let before = rose.intersect(mu)?;
    if before.is_zero() {
        return Err(Error::ZeroCurrent);
    }
    Ok(ratio(&rose.intersect(&push_forward(phi, mu)?)?, &before))
}
