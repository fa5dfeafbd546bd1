use thiserror::Error;

use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rank mismatch: expected rank {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),

    #[error("invalid word literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },

    #[error("images and inverse images do not define inverse automorphisms (generator {generator} fails)")]
    NotInverse { generator: usize },

    #[error("expected {expected} words, got {found}")]
    WrongImageCount { expected: usize, found: usize },

    #[error("operation requires a nontrivial word")]
    TrivialWord,

    #[error("generator image {generator} is the trivial word")]
    TrivialImage { generator: usize },

    #[error("coefficient must be nonnegative, got {0}")]
    NegativeCoefficient(String),

    #[error("operation requires a nonzero current")]
    ZeroCurrent,

    #[error("operation requires a nonzero weight system")]
    ZeroWeights,

    #[error("truncation lengths differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("stretch estimate must exceed 1, got {0}")]
    StretchTooSmall(f64),

    #[error("transition matrix is reducible; strongly connected components: {components:?}")]
    Reducible { components: Vec<Vec<usize>> },

    #[error("power iteration did not converge in {iterations} iterations (last residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("malformed word {0} in the generators of the pair")]
    MalformedPairWord(Word),

    #[error("both approximate intersections vanish; height is undefined")]
    DegenerateHeight,

    #[error("geography undefined: minimum pairwise distance {min_distance} is below 4*delta = {}", 4.0 * delta)]
    GeographyUndefined { min_distance: f64, delta: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
