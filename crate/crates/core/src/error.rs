use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("leg shape mismatch: {0}")]
    LegMismatch(String),

    #[error("leg index {index} out of range for {count} legs")]
    LegOutOfRange { index: usize, count: usize },

    #[error("operator is not Hermitian (max asymmetry {asymmetry:.3e}, scale {scale:.3e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("operator is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("functional is not faithful (min eigenvalue {min_eigenvalue:.3e}, trace {trace:.3e})")]
    NotFaithful { min_eigenvalue: f64, trace: f64 },

    #[error("matrix is not invertible (|det| = {abs_det:.3e})")]
    NotInvertible { abs_det: f64 },

    #[error("permutation group S_{l} exceeds the enumeration bound {bound}")]
    EnumerationBound { l: usize, bound: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("isotypic projector for {0} is zero")]
    ZeroProjector(String),

    #[error("value has significant imaginary part {imag:.3e}")]
    SignificantImaginary { imag: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
