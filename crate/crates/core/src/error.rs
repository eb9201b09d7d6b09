use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("dimension {0} is outside the supported range 1..=64")]
    UnsupportedDimension(usize),

    #[error("QR iteration did not converge after {0} sweeps")]
    NonConvergence(usize),

    #[error("eigenpair residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("matrix is numerically singular (condition estimate {0:e})")]
    Singular(f64),

    #[error("matrix is defective or nearly so (eigenvector condition {0:e}); exceptional point")]
    Defective(f64),

    #[error("invalid signature ({m_plus}, {m_minus}): {reason}")]
    InvalidSignature { m_plus: usize, m_minus: usize, reason: &'static str },

    #[error("expected {expected} rotation angles, found {found}")]
    AngleCount { expected: usize, found: usize },

    #[error("invalid block form: {0}")]
    InvalidBlocks(String),

    #[error("invalid parity operator: {0}")]
    InvalidParity(String),

    #[error("invalid PT system: {0}")]
    InvalidSystem(String),

    #[error("PT symmetry is broken ({conjugate_pairs} conjugate pair(s))")]
    BrokenPhase { conjugate_pairs: usize },

    #[error("exceptional point: {0}")]
    ExceptionalPoint(String),

    #[error("vector is not collinear with its PT image (mismatch {0:e})")]
    NotPtCollinear(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
