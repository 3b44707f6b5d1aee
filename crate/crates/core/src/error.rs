use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient ({k},{l}) lies outside the {support} support of degree {degree}")]
    OutOfSupport {
        k: usize,
        l: usize,
        support: &'static str,
        degree: usize,
    },

    #[error("coefficients ({k},{l}) and ({l},{k}) are not complex conjugates")]
    NotHermitian { k: usize, l: usize },

    #[error("moment table has degree {have}, but degree {need} is required")]
    InsufficientMoments { need: usize, have: usize },

    #[error("moment <a^dag^{k} a^{l}> is not available")]
    MissingMoment { k: usize, l: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("solver backend: {0}")]
    Backend(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
