use thiserror::Error;

use crate::grid::GridDims;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: GridDims, found: GridDims },

    #[error("field length {found} does not match {expected} entries required by the grid")]
    LengthMismatch { expected: usize, found: usize },

    #[error("direction must be a unit vector, got norm {norm}")]
    NotUnitDirection { norm: f64 },

    #[error("negative crack resistance {value} at voxel {index}")]
    NegativeGamma { index: usize, value: f64 },

    #[error("crack resistance vanishes everywhere")]
    ZeroGamma,

    #[error("non-finite value in {what} at entry {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("solver diverged at iteration {iteration}: {what}")]
    Divergence { iteration: usize, what: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),

    #[error("sphere packing jammed after {placed} spheres at porosity {porosity:.4} (target {target:.4})")]
    Jammed {
        placed: usize,
        porosity: f64,
        target: f64,
    },

    #[error("phase id {0} has no entry in the crack-resistance table")]
    MissingPhase(u8),

    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Failures while reading or writing FFVX voxel files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes {0:?}, expected \"FFVX\"")]
    BadMagic([u8; 4]),

    #[error("unsupported FFVX version {0}")]
    UnsupportedVersion(u32),

    #[error("unknown dtype tag {0}")]
    UnknownDtype(u8),

    #[error("dtype mismatch: expected {expected}, file holds {found}")]
    DtypeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("truncated FFVX payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("truncated FFVX header: expected 24 bytes, found {0}")]
    TruncatedHeader(usize),

    #[error("FFVX header declares an invalid grid: {0}")]
    BadDims(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
