use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Every off-diagonal distance is zero, so no kernel scale can be derived.
    #[error("degenerate kernel scale: all off-diagonal distances are zero")]
    DegenerateScale,

    #[error("degenerate stationary distribution: entry {index} is {value:e}")]
    DegenerateDistribution { index: usize, value: f64 },

    #[error("numerical failure in {what} (residual {residual:e})")]
    NumericalFailure { what: String, residual: f64 },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Wraps a failure with the pipeline stage (and sensor pair) it came from.
    #[error("{context}: {source}")]
    Stage {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invalid_config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub fn numerical(what: impl Into<String>, residual: f64) -> Self {
        Error::NumericalFailure {
            what: what.into(),
            residual,
        }
    }

    /// Attach stage context, keeping the original error as the source.
    pub fn in_stage(self, context: impl Into<String>) -> Self {
        Error::Stage {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping any stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Adds stage context to a `Result`.
pub trait StageContext<T> {
    fn stage(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.in_stage(context()))
    }
}
