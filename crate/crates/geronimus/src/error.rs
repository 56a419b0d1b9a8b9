//! Crate-wide error type.
//!
//! Regularity failures are first-class outcomes of the transformations, not
//! panics: `d_n* = 0` or a vanishing leading minor must surface with the
//! level at which the construction broke down.

use thiserror::Error;

/// Errors produced by moment generation, orthogonalization, and the
/// transformation pipelines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A finite moment sequence was asked for an index it does not hold.
    #[error("moment index {index} out of range (only {len} moments available)")]
    IndexOutOfRange { index: usize, len: usize },

    /// Matrix dimensions do not match for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Exact elimination found no nonzero pivot in some column.
    #[error("singular matrix: no nonzero pivot in column {column}")]
    SingularMatrix { column: usize },

    /// The k-th leading principal minor of a Gram matrix vanishes, so the
    /// form is not regular at that order.
    #[error("form not regular: leading minor of order {0} vanishes")]
    NotRegular(usize),

    /// Single Geronimus step: `d_n* = s_0* P_{n-1}(0) + Q_{n-1}(0)` vanished.
    #[error("degenerate denominator d_{0}* = 0: single transformation not regular at level {0}")]
    DegenerateDenominator(usize),

    /// Double Geronimus step: the 2x2 determinant `d_n**` vanished.
    #[error("degenerate determinant d_{0}** = 0: double transformation not regular at level {0}")]
    DegenerateDeterminant(usize),

    /// Expanding a polynomial in a monic basis left a nonzero residual where
    /// the theory demands exact cancellation.
    #[error("expansion residual at level {level}: {detail}")]
    ExpansionResidual { level: usize, detail: String },

    /// A connection coefficient that must be nonzero came out zero.
    #[error("E_{0} = 0 in the expansion of t^2 P_{0} (coefficient must be nonzero)")]
    ZeroE(usize),

    /// Two exact quantities that must agree entrywise do not.
    #[error("mismatch at ({i}, {j}) in {context}: {left} != {right}")]
    MismatchAt {
        i: usize,
        j: usize,
        context: String,
        left: String,
        right: String,
    },

    /// A floating-point residual exceeded its tolerance.
    #[error("tolerance exceeded in {context}: max residual {residual} > {tolerance}")]
    ToleranceExceeded {
        context: String,
        residual: String,
        tolerance: String,
    },

    /// Two algebraically equivalent computation routes disagreed; this is an
    /// internal consistency failure, never a data error.
    #[error("internal route disagreement at level {level}: {detail}")]
    RouteDisagreement { level: usize, detail: String },

    /// Failed to parse an exact rational from text.
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
