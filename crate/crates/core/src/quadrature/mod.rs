//! Integration engines: adaptive Gauss-Kronrod, tensor Gauss-Hermite, damped
//! oscillatory integration with extrapolation, and Monte Carlo.

mod adaptive;
mod damped;
mod hermite;
mod monte_carlo;
pub mod rules;

use serde::{Deserialize, Serialize};

use crate::C64;

pub use adaptive::{adaptive_1d, adaptive_1d_with, AdaptiveOptions};
pub use damped::{damped_oscillatory, neville_extrapolate, DampedEstimate, DampedOptions, DampingSchedule};
pub use hermite::{gauss_hermite_tensor, GaussianWeight};
pub use monte_carlo::{monte_carlo, weighted_monte_carlo, McConfig, MeanAccumulator, WeightedEstimate};

/// Complex value, standard error and evaluation count.
///
/// `stderr` is statistical (0 for deterministic rules); `abs_tol` is the
/// error estimate reported by deterministic engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: C64,
    pub stderr: f64,
    pub abs_tol: f64,
    pub n_evals: u64,
}

impl IntegralEstimate {
    pub fn exact(value: C64, n_evals: u64) -> Self {
        Self {
            value,
            stderr: 0.0,
            abs_tol: 0.0,
            n_evals,
        }
    }

    /// Combined uncertainty, treating statistical and quadrature error alike.
    pub fn uncertainty(&self) -> f64 {
        self.stderr.hypot(self.abs_tol)
    }

    pub fn scale(self, factor: C64) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.norm(),
            abs_tol: self.abs_tol * factor.norm(),
            n_evals: self.n_evals,
        }
    }
}
