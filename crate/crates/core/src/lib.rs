//! Moments of moments of characteristic polynomials of random orthogonal and
//! symplectic matrices, computed three ways: exact Toeplitz+Hankel
//! determinants, Monte Carlo over Haar samples, and large-n asymptotics.

pub mod asymptotics;
pub mod determinant;
pub mod error;
pub mod linalg;
pub mod mom;
pub mod quadrature;
pub mod sampling;
pub mod specfun;
pub mod symbol;

pub use determinant::{joint_moment_exact, Family, Group, ThKind};
pub use error::{Error, Result};
pub use specfun::LogValue;
