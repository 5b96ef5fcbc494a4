use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Poisson tail lost to the Fock cutoff exceeds the admissible tolerance.
    #[error("Fock truncation inadequate: tail weight {lost:.3e} beyond n_max = {n_max}")]
    Truncation { lost: f64, n_max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Projection onto the symmetric (Dicke) subspace left a residual.
    #[error("state is not in the symmetric subspace (residual norm {residual:.3e})")]
    NotSymmetric { residual: f64 },

    #[error("not a valid density matrix: {0}")]
    NotDensity(String),

    #[error("time grid too coarse: step {step:.3e} exceeds {limit:.3e}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("unknown preset '{name}'; available: {}", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
