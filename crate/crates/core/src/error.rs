use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("quaternion has zero norm")]
    ZeroNorm,
    #[error("plaquette plane needs two distinct directions, got {0} twice")]
    InvalidPlane(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mesh is empty")]
    EmptyMesh,
    #[error("link {link} is not an element of the mesh")]
    NotOnMesh { link: usize },
    #[error("bad magic: expected SU2LAT")]
    BadMagic,
    #[error("unsupported format version {found} (expected {expected})")]
    BadVersion { found: u16, expected: u16 },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("mesh index {index} out of range for mesh of size {size}")]
    IndexOutOfRange { index: u64, size: usize },
    #[error("mesh digest mismatch: file expects {expected}, mesh has {found}")]
    MeshDigestMismatch { expected: String, found: String },
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("configuration sets differ between digitized and undigitized records: {0}")]
    ConfigSetMismatch(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable category, used as the CLI error tag.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::ZeroNorm => "zero-norm",
            Error::InvalidPlane(_) => "invalid-plane",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::EmptyMesh => "empty-mesh",
            Error::NotOnMesh { .. } => "not-on-mesh",
            Error::BadMagic => "bad-magic",
            Error::BadVersion { .. } => "bad-version",
            Error::Truncated { .. } => "truncated",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::MeshDigestMismatch { .. } => "mesh-digest-mismatch",
            Error::GeometryMismatch(_) => "geometry-mismatch",
            Error::ConfigSetMismatch(_) => "config-set-mismatch",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
