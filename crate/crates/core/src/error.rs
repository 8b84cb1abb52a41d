use thiserror::Error;

/// Errors shared across the crate. Verification failures are *not* errors:
/// verifiers return [`crate::report::Report`] values with full residuals.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("`{b_side}` does not span a subalgebra: [{x}, {y}] has a component outside it: {residual}")]
    NotASubalgebra {
        b_side: String,
        x: String,
        y: String,
        residual: String,
    },

    /// A structure constant, action entry or trace contribution falls outside
    /// the declared weight window. Results would be wrong, not merely partial.
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    /// `d_out * d_in != 0`; carries the first offending entry.
    #[error("composition nonzero at row `{row}`, col `{col}`: {value}")]
    CompositionNonzero {
        row: String,
        col: String,
        value: String,
    },

    #[error("central element must act by 1, but acts on `{gen}` by {value}")]
    KActsWrong { gen: String, value: String },

    /// Enlarging the window changed a cocycle entry inside the stability margin.
    #[error("cocycle trace not stabilized for pair ({x}, {y})")]
    TraceNotStabilized { x: String, y: String },

    #[error("invalid weight window: [{0}, {1}]")]
    WindowInvalid(i64, i64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid scalar literal `{0}`")]
    BadScalar(String),
}

pub type Result<T> = std::result::Result<T, Error>;
