use thiserror::Error;

#[derive(Debug, Error)]
pub enum CforError {
    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("unsupported derivative order {0} (expected 0, 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("non-finite kernel evaluation at x = {x}")]
    NonFinite { x: f64 },

    #[error("grid too small: {n} points along an axis, need at least {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("frequency response needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("solution blew up at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },

    #[error("non-positive {quantity} = {value} at index {index}")]
    Positivity {
        quantity: &'static str,
        value: f64,
        index: usize,
    },

    #[error("BiCG failed to converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("time step undefined: maximum signal speed is zero")]
    ZeroSpeed,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{case}: {source}")]
    Case {
        case: String,
        #[source]
        source: Box<CforError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CforError {
    /// Wraps an error with the name of the benchmark case that produced it.
    pub fn in_case(self, case: &str) -> Self {
        CforError::Case {
            case: case.to_string(),
            source: Box::new(self),
        }
    }

    /// Strips any case annotations.
    pub fn root(&self) -> &CforError {
        match self {
            CforError::Case { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, CforError>;
