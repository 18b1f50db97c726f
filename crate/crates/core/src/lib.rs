//! Regularized integrals of log-polyhomogeneous functions, parametric traces
//! of spectral families and higher eta-invariants.

pub mod asymptotics;
pub mod clifford;
pub mod cli;
pub mod cutoff;
pub mod eta;
pub mod forms;
mod error;
pub mod fd;
pub mod ids;
pub mod partrace;

pub mod quadrature;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
