use crate::image::ColorSpace;

/// Errors raised by the image-property pipelines.
///
/// Degenerate inputs that still have a well-defined "no value" answer
/// (all-white mass, constant masks, zero gradient fields) are not errors:
/// those operations return `f64::NAN`, which the CSV writer renders as an
/// empty cell.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported image format (only PNG and JPEG are accepted)")]
    UnsupportedFormat,
    #[error("corrupt image stream: {0}")]
    CorruptStream(String),
    #[error("expected {expected:?} image, got {found:?}")]
    WrongColorSpace {
        expected: ColorSpace,
        found: ColorSpace,
    },
    #[error("image too small: {width}x{height} (need at least {min} px per side)")]
    TooSmall { width: u32, height: u32, min: u32 },
    #[error("image is not square: {width}x{height}")]
    NotSquare { width: u32, height: u32 },
    #[error("side length {0} is not a power of two")]
    SideNotPow2(u32),
    #[error("invalid image geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("weight file does not start with the ATB1 magic")]
    BadMagic,
    #[error("weight file dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("weight file checksum mismatch (stored {stored:#010x}, computed {computed:#010x})")]
    ChecksumFail { stored: u32, computed: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
