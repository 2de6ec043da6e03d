use thiserror::Error;

/// Errors raised by constructors and checks in this crate.
///
/// Verification failures are *not* errors: checks return a report carrying
/// the measured deviation. Errors signal malformed input or a violated
/// precondition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vector is not normalized (|norm^2 - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("expected {expected} vectors, got {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("symbol {symbol} at ({row}, {col}) is outside 0..{d}")]
    SymbolOutOfRange {
        row: usize,
        col: usize,
        symbol: usize,
        d: usize,
    },

    #[error("not a permutation of 0..{d}: {perm:?}")]
    BadPermutation { d: usize, perm: Vec<usize> },

    #[error("dimension {d} exceeds the supported maximum {max}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("value is not unimodular (||u| - 1| = {deviation:.3e})")]
    NotUnimodular { deviation: f64 },

    #[error("phase matrix violates periodicity at ({row}, {col})")]
    PeriodicityViolated { row: usize, col: usize },

    #[error("invalid design: {0}")]
    DesignInvalid(String),

    #[error("weight is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    WeightNotPositive { min_eigenvalue: f64 },

    #[error("no density operator solves the gram constraints (residual {residual:.3e})")]
    NoSolution { residual: f64 },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("reference vector is not maximally entangled (deviation {deviation:.3e})")]
    NotMaximallyEntangled { deviation: f64 },

    #[error("vector {index} does not correspond to a unitary (||U*U - I|| = {deviation:.3e})")]
    NotUnitaryExtraction { index: usize, deviation: f64 },

    #[error("not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("scheme fails its verifier (deviation {deviation:.3e})")]
    SchemeInvalid { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
