use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectral curve: {0}")]
    InvalidCurve(String),

    #[error("invalid irradiance profile: {0}")]
    InvalidProfile(String),

    #[error("degenerate interval: {0}")]
    DegenerateInterval(String),

    #[error("insufficient coverage: {0}")]
    Coverage(String),

    #[error("response integrates to zero over [{a_nm}, {b_nm}] nm")]
    ZeroResponse { a_nm: f64, b_nm: f64 },

    #[error("wavelength {wavelength_nm} nm lies outside curve support [{min_nm}, {max_nm}]")]
    Extrapolation {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("image {width}x{height} is smaller than the {window}x{window} window")]
    TooSmall {
        width: usize,
        height: usize,
        window: usize,
    },

    #[error("expected 3 channels, got {0}")]
    Channels(usize),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("matrix is not positive semi-definite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("zero-norm vector: {0}")]
    DegenerateVector(String),

    #[error("layer {layer} has a single location; no negatives available")]
    NoNegatives { layer: usize },

    #[error("{file}: line {line}, field `{field}`: {message}")]
    Parse {
        file: String,
        line: usize,
        field: String,
        message: String,
    },

    #[error("{scope}: {rule}")]
    Validation { scope: String, rule: String },

    #[error("split error: {0}")]
    Split(String),

    #[error("cannot decode {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        file: impl Into<String>,
        line: usize,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}
