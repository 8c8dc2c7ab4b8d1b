use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid journal name {0:?}: empty after normalization")]
    InvalidName(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty environment: {0}")]
    EmptyEnvironment(String),

    #[error("degenerate environment: {0}")]
    DegenerateEnvironment(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("stress undefined: all embedded distances are zero")]
    UndefinedStress,

    #[error("too few points to scale: got {0}, need at least 3")]
    TooFewPoints(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("divergent exponent: every tail value equals xmin")]
    DivergentExponent,

    #[error("skewness undefined: zero variance")]
    UndefinedSkewness,

    #[error("unknown journal: {0}")]
    UnknownJournal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier, used in CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidName(_) => "invalid-name",
            Error::Format(_) => "format-error",
            Error::Parse { .. } => "parse-error",
            Error::EmptyEnvironment(_) => "empty-environment",
            Error::DegenerateEnvironment(_) => "degenerate-environment",
            Error::Contract(_) => "contract-violation",
            Error::UndefinedStress => "undefined-stress",
            Error::TooFewPoints(_) => "too-few-points",
            Error::Parameter(_) => "parameter-error",
            Error::InsufficientData(_) => "insufficient-data",
            Error::DivergentExponent => "divergent-exponent",
            Error::UndefinedSkewness => "undefined-skewness",
            Error::UnknownJournal(_) => "unknown-journal",
            Error::Io(_) => "io-error",
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) => 1,
            Error::InvalidName(_)
            | Error::Format(_)
            | Error::Parse { .. }
            | Error::EmptyEnvironment(_)
            | Error::UnknownJournal(_)
            | Error::InsufficientData(_)
            | Error::Io(_) => 2,
            Error::DegenerateEnvironment(_)
            | Error::Contract(_)
            | Error::UndefinedStress
            | Error::TooFewPoints(_)
            | Error::DivergentExponent
            | Error::UndefinedSkewness => 3,
        }
    }
}
