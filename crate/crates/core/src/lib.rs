//! Numerical toolkit for su(3) coherent states and Robertson intelligent
//! states on the totally symmetric bosonic representations.
//!
//! The representation with `j1` total quanta is realized on three bosonic
//! modes. Everything is dense and small (dimension `(j1+1)(j1+2)/2`), so
//! every analytic statement is checked against an independent numerical
//! route: commutators for structure relations, matrix exponentials for the
//! displacement operator, quadrature for the measure, and dense
//! eigensolvers for the intelligent-state spectra.

pub mod analytics;
pub mod bargmann;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod intelligent;
pub mod linalg;
pub mod quadrature;
pub mod rep;
pub mod serial;
pub mod special;
pub mod state;
pub mod verify;

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use rep::{BasisState, GeneratorId, Operator, RepSpace};
pub use state::StateVector;
