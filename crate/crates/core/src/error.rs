use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // raster
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported PGM maxval {0} (must be 1..=255)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    TruncatedPixelData { expected: usize, found: usize },
    #[error("raster dimensions {width}x{height} do not match {len} samples")]
    DimensionMismatch {
        width: usize,
        height: usize,
        len: usize,
    },

    // preprocess
    #[error("image contains no ink")]
    EmptyImage,
    #[error("skew estimation needs at least two ink pixels, found {0}")]
    InsufficientInk(usize),
    #[error("resize target {width}x{height} is below the 10x10 minimum")]
    BadTargetSize { width: usize, height: usize },
    #[error("raster {width}x{height} cannot be cut into a 10x10 grid")]
    IndivisibleDimensions { width: usize, height: usize },

    // features / mlp
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("bad layer dimensions: {0}")]
    BadDims(String),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("unsupported model format version {0}")]
    VersionMismatch(String),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("invalid training configuration: {0}")]
    BadConfig(String),

    // eval
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("manifest references missing file {0}")]
    MissingFile(PathBuf),
    #[error("manifest lists {0} more than once")]
    DuplicatePath(PathBuf),
    #[error("unknown signer {0}")]
    UnknownSigner(String),
    #[error("signer {signer} has {available} {class} samples, split needs {needed}")]
    InsufficientSamples {
        signer: String,
        class: &'static str,
        available: usize,
        needed: usize,
    },
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("test set contains a single class")]
    SingleClassTestSet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
