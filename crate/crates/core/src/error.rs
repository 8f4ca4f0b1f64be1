use thiserror::Error;

/// Errors produced by mesh construction, difference operators and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window too small: {op} needs {needed} points, got {available}")]
    WindowTooSmall {
        op: String,
        needed: usize,
        available: usize,
    },

    #[error("index {index} is not valid for {op} (valid range {lo}..={hi})")]
    InvalidIndex {
        op: String,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("grid functions live on different meshes")]
    MeshMismatch,

    #[error("index windows [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not overlap")]
    DisjointWindows {
        a_lo: usize,
        a_hi: usize,
        b_lo: usize,
        b_hi: usize,
    },

    #[error("reference function is identically zero on the overlap; scale is undefined")]
    ZeroScale,

    #[error("non-finite value {value} at mesh index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("degenerate mesh family: {0}")]
    DegenerateFamily(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("CSV format error on line {line}: {message}")]
    Csv { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
