use thiserror::Error;

/// Errors produced across the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function takes negative value {value:.3e} at t = {at}")]
    Negative { value: f64, at: f64 },

    #[error("{nodes} quadrature nodes cannot resolve |j| <= {max_index} (need at least {required})")]
    Aliasing {
        nodes: usize,
        max_index: usize,
        required: usize,
    },

    #[error("imaginary residue {residue:.3e} exceeds tolerance for a real-valued synthesis")]
    ImaginaryResidue { residue: f64 },

    #[error("index {requested} exceeds coefficient window {window}")]
    OutOfWindow { requested: usize, window: usize },

    #[error("search window too small: {0}")]
    WindowTooSmall(String),

    #[error("undecidable: {0}")]
    Undecidable(String),

    #[error("restriction violated: {0}")]
    Restriction(String),

    #[error("empty sample")]
    EmptySample,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
