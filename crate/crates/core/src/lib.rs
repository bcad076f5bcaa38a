//! Numerical verification of Hubbard-Stratonovich identities over hyperbolic
//! integration domains, together with the group integrals they rest on
//! (Itzykson-Zuber type moments, Duistermaat-Heckman coset integrals,
//! Guhr-Wettig and matrix Macdonald functions) and the integral
//! representation of the gauge-invariant k-orbital model.
//!
//! Every check is small enough to run on a desk machine: matrices are at most
//! 4x4 for the identities and 64x64 for the k-orbital ensemble.
//!
//! Module map:
//! - [`specfun`]: J0, Y0, K0, K0 on the imaginary axis, Weber and Gaussian
//!   Fourier moment closed forms.
//! - [`linalg`]: small dense complex algebra, indefinite-metric and chiral
//!   decompositions, Vandermonde products.
//! - [`sampling`]: reproducible random streams, Haar unitaries, Ginibre
//!   matrices, invariant-measure sampling on GL(n, C), k-orbital Hamiltonians.
//! - [`quadrature`]: adaptive Gauss-Kronrod, tensor Gauss-Hermite, damped
//!   oscillatory integration with Richardson extrapolation, Monte Carlo.
//! - [`identities`]: the identity checkers and their uniform report type.
//! - [`korbital`]: determinant moments, their integral representation, the
//!   Ingham-Siegel factor and the saddle point.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod exec;
pub mod identities;
pub mod korbital;
pub mod linalg;
pub mod quadrature;
pub mod sampling;
pub mod specfun;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix, the raw material of every identity.
pub type ComplexMatrix = nalgebra::DMatrix<C64>;
