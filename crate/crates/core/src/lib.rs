//! Pseudo-spectral laboratory for quasilinear symmetric hyperbolic systems.
//!
//! The crate provides Fourier machinery on uniform grids, fractional and
//! weighted Sobolev norms, a method-of-lines solver for systems
//! `A0(U;t) dU/dt + sum_a A^a(U;t) d_a U + B(U;t) U = G(U;t)`, Poisson solvers,
//! the Euler-Poisson-Makino and cosmological perturbation models, an estimate
//! laboratory for the classical Sobolev inequalities, and the flow-map
//! experiment runner used by the `hyperflow` command line tool.

pub mod cosmology;
pub mod elliptic;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod makino;
pub mod norms;
pub mod random;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{MatrixField, RealField, SmallMatrix, SpectralField};
pub use grid::Grid;
