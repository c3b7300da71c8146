//! Exact reconstruction and verification of the quadratic-algebra solution of
//! a two-dimensional position-dependent-mass Schrödinger model on the layer
//! `0 < x < ∞, |y| < π/(2q)`.
//!
//! * [`symkernel`]: exact coefficient ring and differential operators.
//! * [`model`]: the Hamiltonian, its integrals of motion and intertwiners.
//! * [`algebra_verify`]: the quadratic associative algebra and its Casimir.
//! * [`classical_limit`]: the quadratic Poisson algebra of the classical system.
//! * [`parafermion_rep`]: deformed parafermionic representations and the
//!   closed-form matrix of `L` in the `(H, R)` basis.
//! * [`wavefn_numerics`]: explicit wavefunctions and quadrature cross-checks.

pub mod algebra_verify;
pub mod classical_limit;
pub mod error;
pub mod model;
pub mod parafermion_rep;
pub mod poly;
pub mod report;
pub mod symkernel;
pub mod upoly;
pub mod wavefn_numerics;

pub use error::{Error, Result};
