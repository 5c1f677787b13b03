use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("enumeration bound exceeded: {what} needs {needed} > {bound}")]
    BoundExceeded { what: String, needed: u128, bound: u64 },

    #[error("unsupported field size q = {0}")]
    UnsupportedField(u64),

    #[error("division by zero in F_{0}")]
    ZeroInverse(u32),

    #[error("matrix is singular")]
    Singular,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),

    #[error("invalid contraction pair: {0}")]
    InvalidPair(String),

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("contraction assumptions fail: {0}")]
    Assumptions(String),

    /// Representation-level operations only support the identity automorphism.
    #[error("nontrivial automorphism is unsupported at the representation layer (code E_AUTOMORPHISM)")]
    NontrivialAutomorphism,

    #[error("unbalanced dimension vector: {0}")]
    Unbalanced(String),

    #[error("point is not in the heart")]
    NotHeart,

    #[error("unknown orbit `{orbit}` at dimension {dim}")]
    UnknownOrbit { dim: String, orbit: String },

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
