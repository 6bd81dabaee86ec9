use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameters for {family}: {reason}")]
    ParamDomain { family: &'static str, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid sample shape: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("degenerate scale: {0}")]
    DegenerateScale(String),

    #[error(
        "no convergence after {iterations} iterations \
         (best iterate {best:?}, residual {residual:e})"
    )]
    Convergence {
        iterations: usize,
        best: Vec<f64>,
        residual: f64,
    },

    #[error("unsupported null family: {0}")]
    UnsupportedNull(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric guard: {0}")]
    Numeric(String),

    #[error("grid coverage incomplete, missing cells: {}", .0.join("; "))]
    Coverage(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
