use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds {
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid grid: {field}: {reason}")]
    Grid { field: String, reason: String },

    #[error("invalid rating vector `{image_id}`: {reason}")]
    Rating { image_id: String, reason: String },

    #[error("adjective lists differ between rating vectors")]
    AdjectiveMismatch,

    #[error("jet is all zero; normalized dot product is undefined")]
    DegenerateJet,

    #[error("coded images `{a}` and `{b}` were produced by different filter banks or grids")]
    IncompatibleCoding { a: String, b: String },

    #[error("pair ({a}, {b}): {source}")]
    Pair {
        a: String,
        b: String,
        source: Box<Error>,
    },

    #[error("matrix items differ: only in model {only_in_model:?}, only in semantic {only_in_semantic:?}")]
    ItemMismatch {
        only_in_model: Vec<String>,
        only_in_semantic: Vec<String>,
    },

    #[error("invalid pair matrix: {0}")]
    Matrix(String),

    #[error("correlation is undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("alignment is underdetermined: fewer than two distinct points")]
    Underdetermined,

    #[error("{0} requires a two-dimensional configuration, got {1} dimensions")]
    UnsupportedDimension(&'static str, usize),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
