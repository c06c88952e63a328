use thiserror::Error;

/// Errors surfaced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("decode failed: {0}")]
    Decode(String),

    #[error("encode failed: {0}")]
    Encode(String),

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("histogram has no samples")]
    EmptyHistogram,

    #[error("dimensions {0}x{1} are not multiples of patch {2}")]
    UnalignedDims(u32, u32, u32),

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),

    #[error("image {0}x{1} is too small, need at least 8x8")]
    TooSmall(u32, u32),

    #[error("crop box out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("manifest contains no images")]
    EmptyManifest,

    #[error("every image in the batch was skipped")]
    AllSkipped,

    #[error("thread pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
