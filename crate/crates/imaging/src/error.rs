use crate::Rect;

#[derive(Debug, thiserror::Error)]
pub enum ImagingError {
    #[error("image has zero width or height")]
    EmptyImage,
    #[error("unsupported channel count {0}, expected 1 or 3")]
    UnsupportedChannels(u8),
    #[error("pixel buffer has {actual} bytes, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("binary image contains a value other than 0 or 1")]
    NonBinaryValue,
    #[error("all pixels share a single intensity")]
    DegenerateHistogram,
    #[error("kernel dimensions must be odd and at least 1, got {0}x{1}")]
    InvalidKernel(u32, u32),
    #[error("rectangle {0:?} does not lie inside the image")]
    RectOutOfBounds(Rect),
    #[error("malformed PNM header: {0}")]
    MalformedHeader(String),
    #[error("PNM body truncated: expected {expected} bytes, found {actual}")]
    TruncatedData { expected: usize, actual: usize },
    #[error("unsupported PNM maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
