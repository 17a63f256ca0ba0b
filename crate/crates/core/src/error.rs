use thiserror::Error;

/// Errors raised by the linear algebra, group, engine and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e}, norm {norm:.3e})")]
    SingularMatrix { sigma_min: f64, norm: f64 },

    #[error("matrix is not diagonalizable within bound (eigenvector condition {condition:.3e} > {bound:.3e})")]
    NotDiagonalizable { condition: f64, bound: f64 },

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("matrix is not skew-symmetric (relative defect {defect:.3e})")]
    NotSkew { defect: f64 },

    #[error("Pfaffian requires even dimension, got {0}")]
    OddDimension(usize),

    #[error("matrix is not in the orthogonal Lie algebra (relative defect {defect:.3e})")]
    NotInAlgebra { defect: f64 },

    #[error("argument family is degenerate: best |det| {achieved:.3e} below threshold {threshold:.3e}")]
    DegenerateFamily { achieved: f64, threshold: f64 },

    #[error("element is not in the group {group} (defect {defect:.3e})")]
    NotInGroup { group: String, defect: f64 },

    #[error("operation requires the so-even family, got {0}")]
    WrongFamily(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponent {exponent} exceeds the cap {cap}")]
    ExponentTooLarge { exponent: f64, cap: u32 },

    #[error("perturbation fallback did not settle: spread {spread:.3e} exceeds {limit:.3e}")]
    DegeneratePersistent { spread: f64, limit: f64 },

    #[error("eigenvalues cannot be paired into reciprocal pairs (residual {residual:.3e})")]
    PairingAmbiguous { residual: f64 },

    #[error("torus element is not regular (denominator {magnitude:.3e})")]
    IrregularElement { magnitude: f64 },

    #[error("need power sums up to degree {needed}, have {available}")]
    InsufficientPowerSums { needed: usize, available: usize },
}

impl Error {
    /// True for the failures that the perturbation fallback is meant to rescue.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, Error::DegenerateFamily { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
