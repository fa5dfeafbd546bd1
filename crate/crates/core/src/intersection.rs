//! The intersection form between trees and currents, and the height function
//! built from the attracting and repelling limit trees.

use num_traits::{ToPrimitive, Zero};

use crate::automorphism::Automorphism;
use crate::currents::{push_forward, RationalCurrent};
use crate::error::{Error, Result};
use crate::metric_trees::{LengthFunction, LimitTreeApprox, TreePoint};
use crate::spectra::stretch_estimate;
use crate::Rational;

fn check_rank(tree_rank: usize, mu: &RationalCurrent) -> Result<()> {
    if tree_rank != mu.rank() {
        return Err(Error::RankMismatch {
            expected: tree_rank,
            found: mu.rank(),
        });
    }
    Ok(())
}

/// Trees that can be paired with rational currents.
pub trait Intersect: LengthFunction {
    /// `Σ c_i ||g_i||_T` over the terms `c_i η_{g_i}` of `μ`.
    fn intersect(&self, mu: &RationalCurrent) -> Result<Self::Value>;
}

impl Intersect for TreePoint {
    fn intersect(&self, mu: &RationalCurrent) -> Result<Rational> {
        check_rank(self.rank(), mu)?;
        let mut total = Rational::zero();
        for (class, c) in mu.terms() {
            total += c * self.length_of_class(class);
        }
        Ok(total)
    }
}

impl Intersect for LimitTreeApprox {
    fn intersect(&self, mu: &RationalCurrent) -> Result<f64> {
        check_rank(self.rank(), mu)?;
        Ok(mu
            .terms()
            .map(|(class, c)| c.to_f64().unwrap_or(f64::INFINITY) * self.length_of_class(class))
            .sum())
    }
}

pub fn intersect<T: Intersect>(tree: &T, mu: &RationalCurrent) -> Result<T::Value> {
    tree.intersect(mu)
}

/// Exact test of `<Tφ, μ> = <T, φμ>`.
pub fn check_equivariance(tree: &TreePoint, phi: &Automorphism, mu: &RationalCurrent) -> Result<bool> {
    let left = tree.act_right(phi)?.intersect(mu)?;
    let right = tree.intersect(&push_forward(phi, mu)?)?;
    Ok(left == right)
}

pub const DEFAULT_ZERO_GUARD: f64 = 1e-9;
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-6;

/// Forward and backward limit-tree approximations of one automorphism.
#[derive(Debug, Clone)]
pub struct HeightContext {
    plus: LimitTreeApprox,
    minus: LimitTreeApprox,
    log_stretch_sum: f64,
    zero_guard: f64,
    boundary_tol: f64,
}

impl HeightContext {
    /// `minus` must approximate the attracting tree of the inverse of the
    /// automorphism behind `plus`.
    pub fn new(plus: LimitTreeApprox, minus: LimitTreeApprox) -> Result<HeightContext> {
        if minus.automorphism() != &plus.automorphism().inverse() {
            return Err(Error::InvalidParameter(
                "the backward approximation must use the inverse automorphism".into(),
            ));
        }
        let log_stretch_sum = (plus.stretch() * minus.stretch()).ln();
        Ok(HeightContext {
            plus,
            minus,
            log_stretch_sum,
            zero_guard: DEFAULT_ZERO_GUARD,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
        })
    }

    /// Both trees at `depth` over the unit rose, with stretch factors estimated
    /// from the growth of the generator classes.
    pub fn for_automorphism(phi: &Automorphism, depth: usize) -> Result<HeightContext> {
        let base = TreePoint::unit_rose(phi.rank());
        let inv = phi.inverse();
        let plus = LimitTreeApprox::new(phi, base.clone(), depth, stretch_estimate(phi, 200_000, 400))?;
        let minus = LimitTreeApprox::new(&inv, base, depth, stretch_estimate(&inv, 200_000, 400))?;
        HeightContext::new(plus, minus)
    }

    pub fn plus(&self) -> &LimitTreeApprox {
        &self.plus
    }

    pub fn minus(&self) -> &LimitTreeApprox {
        &self.minus
    }

    pub fn automorphism(&self) -> &Automorphism {
        self.plus.automorphism()
    }

    pub fn depth(&self) -> usize {
        self.plus.depth()
    }

    pub fn log_stretch_sum(&self) -> f64 {
        self.log_stretch_sum
    }

    pub fn with_log_stretch_sum(mut self, value: f64) -> HeightContext {
        self.log_stretch_sum = value;
        self
    }

    pub fn with_zero_guard(mut self, guard: f64) -> HeightContext {
        self.zero_guard = guard;
        self
    }

    pub fn with_boundary_tol(mut self, tol: f64) -> HeightContext {
        self.boundary_tol = tol;
        self
    }

    pub fn with_depth(&self, depth: usize) -> Result<HeightContext> {
        Ok(HeightContext {
            plus: self.plus.with_depth(depth)?,
            minus: self.minus.with_depth(depth)?,
            ..self.clone()
        })
    }

    /// The context of the inverse automorphism.
    pub fn swapped(&self) -> HeightContext {
        HeightContext {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
            ..self.clone()
        }
    }

    /// `(<T_+, μ>, <T_-, μ>)` at the context depth.
    pub fn intersections(&self, mu: &RationalCurrent) -> Result<(f64, f64)> {
        if mu.is_zero() {
            return Err(Error::ZeroCurrent);
        }
        Ok((self.plus.intersect(mu)?, self.minus.intersect(mu)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Height {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl Height {
    pub fn to_f64(self) -> f64 {
        match self {
            Height::Finite(h) => h,
            Height::PlusInfinity => f64::INFINITY,
            Height::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Height::Finite(_))
    }
}

/// `log(<T_+, μ> / <T_-, μ>)`, infinite when one side is below the zero guard.
pub fn height(ctx: &HeightContext, mu: &RationalCurrent) -> Result<Height> {
    let (p, m) = ctx.intersections(mu)?;
    let p_zero = p <= ctx.zero_guard;
    let m_zero = m <= ctx.zero_guard;
    match (p_zero, m_zero) {
        (true, true) => Err(Error::DegenerateHeight),
        (false, true) => Ok(Height::PlusInfinity),
        (true, false) => Ok(Height::MinusInfinity),
        (false, false) => Ok(Height::Finite(p.ln() - m.ln())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborhoodClass {
    UPlus,
    UMinus,
    Boundary,
}

impl std::fmt::Display for NeighborhoodClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NeighborhoodClass::UPlus => "U+",
            NeighborhoodClass::UMinus => "U-",
            NeighborhoodClass::Boundary => "boundary",
        })
    }
}

/// Which limit tree pairs more strongly with `μ`; near-ties are `Boundary`.
pub fn classify_neighborhood(ctx: &HeightContext, mu: &RationalCurrent) -> Result<NeighborhoodClass> {
    let (p, m) = ctx.intersections(mu)?;
    let scale = p.abs().max(m.abs());
    if scale == 0.0 || (p - m).abs() < ctx.boundary_tol * scale {
        return Ok(NeighborhoodClass::Boundary);
    }
    Ok(if m < p {
        NeighborhoodClass::UPlus
    } else {
        NeighborhoodClass::UMinus
    })
}
