//! Free group automorphisms acting on Outer space and on geodesic currents.
//!
//! The crate covers exact word combinatorics in `F_N`, rose-orbit points of
//! Outer space, rational currents and their weight charts, the intersection
//! form, Perron-Frobenius data of rose maps, North-South iteration, and the
//! bounded certificate/witness searches used to study free subgroups
//! generated by two automorphisms.

pub mod automorphism;
pub mod currents;
pub mod dynamics;
pub mod enumerate;
pub mod error;
pub mod intersection;
pub mod metric_trees;
pub mod sample;
pub mod schottky;
pub mod spectra;
pub mod whitehead;
pub mod word;

pub type Rational = num_rational::BigRational;

pub use automorphism::{verify_automorphism, Automorphism};
pub use currents::RationalCurrent;
pub use error::{Error, Result};
pub use word::{cyclic_canonical, is_conjugate, reduce, CyclicWord, Letter, Word};
