//! Polynomially deformed su(1,1) algebras and their coherent states.
//!
//! The crate is organised bottom-up:
//!
//! - [`special`]: log-gamma, pFq, modified Bessel functions, Meijer G via
//!   Mellin–Barnes quadrature, Kummer-function ratios.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration.
//! - [`algebra`]: structure function, structure and deformation factors,
//!   roots and generalized factorials.
//! - [`rep`]: finite-truncation matrices of `K0`, `K+`, `K-` and the Casimir.
//! - [`coherent`]: Barut–Girardello-type and Perelomov-type coherent states.
//! - [`unity`]: weight functions and the moment form of the resolution of unity.
//! - [`susy`]: the conditionally solvable modified radial oscillator.
//! - [`report`]: verification suites used by the command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod algebra;
pub mod coherent;
mod error;
pub mod quadrature;
pub mod rep;
pub mod report;
pub mod special;
pub mod susy;
pub mod unity;

pub use algebra::{AlgebraSpec, FactorialKind, RootSet, StructureSequence};
pub use coherent::{CoherentState, Family};
pub use error::{Error, Result};
pub use rep::TruncatedRep;
pub use susy::OscillatorParams;
pub use unity::WeightFunction;
