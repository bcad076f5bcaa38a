use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("argument {name} = {value} outside the domain of {function}")]
    Domain {
        function: &'static str,
        name: &'static str,
        value: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not T-diagonalizable: {0}")]
    NotTDiagonalizable(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("energy outside the band: E^2 = {e2} >= 4J = {four_j}")]
    OutsideBand { e2: f64, four_j: f64 },

    #[error("finite-difference stencil degenerate: {0}")]
    StencilDegeneracy(String),

    #[error("tolerance {requested:.3e} not reached (achieved {achieved:.3e}, estimate {estimate})")]
    ToleranceNotReached {
        estimate: C64,
        achieved: f64,
        requested: f64,
    },

    #[error("damped extrapolation did not converge (last step {step:.3e}, limit {limit:.3e})")]
    NonConvergentExtrapolation { step: f64, limit: f64 },

    #[error("effective sample size {ess:.1} below required {required:.1}")]
    EffectiveSampleSizeTooLow { ess: f64, required: f64 },

    #[error("heavy tail: top 0.1% of samples carry {share:.1}% of the mean")]
    HeavyTailWarning { share: f64 },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
}
