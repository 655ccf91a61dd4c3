//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Result`]. The variants
//! distinguish arithmetic failures (division, precision), structural
//! preconditions (monomial/squarefree shape, mode), and window limitations
//! (a truncation too small or too large to decide the question asked).

/// Errors produced by the library.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Exact division by p was requested on a scalar not divisible by p.
    #[error("scalar {residue} is not divisible by {p}")]
    NotDivisible { p: u64, residue: u64 },

    /// An operation needed more reliable p-adic digits than the operand has.
    #[error("precision exhausted: operation needs {needed} digits, operand has {have}")]
    PrecisionExhausted { needed: u32, have: u32 },

    /// A module length was requested but the quotient has a summand filling
    /// the whole precision window, indistinguishable from a free summand.
    #[error("quotient has a free summand at precision {prec}; length is not finite on this window")]
    NotFinite { prec: u32 },

    /// An operation that requires an unramified element (no fractional
    /// p-power) was applied to a ramified one.
    #[error("ramified input: operation requires an element free of fractional p-powers")]
    RamifiedInput,

    /// A monomial-only operation was applied to a non-monomial ideal.
    #[error("ideal is not monomial: {0}")]
    NotMonomial(String),

    /// A squarefree-monomial-only operation was applied elsewhere.
    #[error("ideal is not squarefree monomial: {0}")]
    NotSquarefree(String),

    /// The requested operation is not available in the tower's mode.
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    /// A numeric hypothesis check on the truncation failed.
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    /// The degree cap is too small for the requested computation.
    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// The degree cap produces a monomial window too large for the dense
    /// linear-algebra fallback.
    #[error("window too large: {0}")]
    WindowTooLarge(String),

    /// Homology lengths disagreed between two caps on the shared trusted
    /// window, or lengths persist at the top of the window.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Symbolic and numeric torsion computations disagree.
    #[error("torsion mismatch: {0}")]
    TorsionMismatch(String),

    /// A config document or polynomial expression failed to parse.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },

    /// A parsed config violates a validation rule.
    #[error("invalid config: {0}")]
    Validation(String),

    /// Operands from incompatible contexts (different p, variable count,
    /// cap, ...) were combined.
    #[error("incompatible operands: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
