//! Exponential sums over finite fields, the limiting measures predicted by
//! equidistribution theory, and Wasserstein distances between them.
//!
//! The crate is organised bottom-up:
//!
//! - [`ff`]: prime fields and small extensions, generators, discrete logs,
//!   additive and multiplicative characters.
//! - [`expsums`]: complete families of Gaussian periods, root-set sums,
//!   hyper-Kloosterman sums and Mellin-type sums, plus torus orbits and
//!   their Weyl sums.
//! - [`zlattice`]: Smith normal form over the integers and Haar sampling on
//!   the torus subgroup cut out by a module of additive relations.
//! - [`measures`]: empirical and reference probability measures.
//! - [`wasserstein`]: exact and approximate W1 solvers and Fourier-side
//!   upper bounds.
//! - [`harness`]: experiment configs, prime sweeps, rate fits, and output.

pub mod error;
pub mod expsums;
pub mod ff;
pub mod harness;
pub mod measures;
pub mod numeric;
pub mod rng;
pub mod wasserstein;
pub mod zlattice;

pub use error::{Error, Result};
