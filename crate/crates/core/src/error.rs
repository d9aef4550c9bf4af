use thiserror::Error;

/// Errors raised by state, channel and drive constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input is not Hermitian (max deviation {0:e})")]
    NonHermitianInput(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("Schatten order must be positive, got {0}")]
    InvalidOrder(f64),

    #[error("operation requires dimension {expected}, got {got}")]
    InvalidDimension { expected: usize, got: usize },

    #[error("energy levels must be strictly increasing")]
    UnorderedEnergies,

    #[error("basis columns are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("Monte Carlo average needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("channel is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),

    #[error("channel does not preserve Hermiticity (residual {0:e})")]
    NotHermiticityPreserving(f64),

    #[error("complete positivity violated (min Choi eigenvalue {0:e})")]
    CpViolation(f64),

    #[error("mean photon number must be positive, got {0}")]
    InvalidMean(f64),

    #[error("unsupported drive parameters: {0}")]
    UnsupportedParameters(String),

    #[error("truncated drive support leaves trace residual {0:e}")]
    TruncationError(f64),

    #[error("second-order expansion requires dn <= nbar (dn = {dn}, nbar = {nbar})")]
    ApproximationDomain { dn: f64, nbar: f64 },

    #[error("mean energy must be positive for the Margolus-Levitin bound, got {0}")]
    NonpositiveMeanEnergy(f64),

    #[error("photon budget per pulse below one: {nbar} photons over {pulses} pulses")]
    BudgetTooSmall { nbar: f64, pulses: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
