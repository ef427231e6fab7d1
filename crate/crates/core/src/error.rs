use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::raster::Geometry;
use crate::word::BitDepth;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("bit depth mismatch: {left} vs {right}")]
    DepthMismatch { left: BitDepth, right: BitDepth },

    #[error("value {value:#x} does not fit in {depth}")]
    ValueOutOfRange { value: u32, depth: BitDepth },

    #[error("unsupported bit depth {0} (expected 8 or 16)")]
    UnsupportedDepth(u32),

    #[error("randomness context has been wiped")]
    ContextWiped,

    #[error("draw address {what} = {value} outside bound {bound}")]
    AddressOutOfBounds {
        what: &'static str,
        value: u64,
        bound: u64,
    },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("at least 2 shares are required, got {0}")]
    InvalidShareCount(usize),

    #[error("combining needs at least 2 shares, got {0}")]
    TooFewShares(usize),

    #[error("share {index} has geometry {found}, expected {expected}")]
    GeometryMismatch {
        index: usize,
        expected: Geometry,
        found: Geometry,
    },

    #[error("byte share {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("{path}: unsupported image format ({format})")]
    UnsupportedFormat { path: PathBuf, format: String },

    #[error(
        "{path}: {format} is a lossy format; shares and restorations must be stored losslessly \
         (use PNG, or PPM/PGM for 8-bit RGB/gray)"
    )]
    LossyFormat { path: PathBuf, format: &'static str },

    #[error("{path}: cannot store {geometry} as {format}")]
    UnsupportedCombination {
        path: PathBuf,
        geometry: Geometry,
        format: &'static str,
    },

    #[error("{path}: corrupt file: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("{path}: malformed manifest: {reason}")]
    MalformedManifest { path: PathBuf, reason: String },

    #[error("{path}: unsupported manifest format_version {found:?} (expected \"1\")")]
    ManifestVersion { path: PathBuf, found: String },

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
