//! Learning boolean functions under Ising and coloring Markov random fields.
//!
//! The crate simulates single-site Gibbs dynamics, computes exact spectra of
//! the chain at desk scale, builds MCMC-estimated spectral features, solves
//! the L1-regression linear program, learns juntas from labeled walks and
//! evaluates noise sensitivity.

// `!(x > 0.0)` rejects NaN; index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod chain;
pub mod error;
pub mod experiments;
pub mod features;
pub mod graph;
pub mod io;
pub mod learners;
pub mod linalg;
pub mod model;
pub mod regression;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
