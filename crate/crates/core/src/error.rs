use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("value {value} for `{key}` is outside its domain {domain}")]
    DomainViolation {
        key: String,
        value: String,
        domain: String,
    },

    #[error("kind `{0}` is unregistered")]
    Unregistered(String),

    #[error("estimator is not fitted")]
    NotFitted,

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("cannot load unknown kind `{0}`")]
    UnknownKindOnLoad(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("column `{column}` has a scitype this estimator does not accept")]
    ScitypeMismatch { column: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("forecasting horizon is empty")]
    EmptyHorizon,

    #[error("offset {offset} exceeds the fitted horizon {max}")]
    HorizonNotFitted { offset: u32, max: u32 },

    #[error("kind `{0}` is already registered")]
    NameCollision(String),

    #[error("flattened parameter name `{0}` is ambiguous")]
    AmbiguousParamFlattening(String),

    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("target column `{0}` is missing")]
    MissingTarget(String),

    #[error("horizon reaches position {needed} but only {available} observations exist")]
    HorizonBeyondData { needed: usize, available: usize },

    #[error("aggregator `{aggregator}` is incompatible with scitype `{scitype}`")]
    AggregatorMismatch { aggregator: String, scitype: String },

    #[error("expected scitype `{expected}`, found `{found}`")]
    WrongScitype { expected: String, found: String },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("bad filter `{0}`: expected tag=value")]
    BadFilterSyntax(String),

    #[error("operation `{0}` is not supported by this kind")]
    Unsupported(String),

    #[error("in component `{name}`: {source}")]
    Component { name: String, source: Box<Error> },
}

impl Error {
    /// Strips component wrappers and returns the originating error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Component { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn in_component(name: &str) -> impl FnOnce(Error) -> Error + '_ {
        move |source| Error::Component {
            name: name.to_string(),
            source: Box::new(source),
        }
    }

    pub(crate) fn domain(key: &str, value: impl std::fmt::Display, domain: impl std::fmt::Display) -> Self {
        Error::DomainViolation {
            key: key.to_string(),
            value: value.to_string(),
            domain: domain.to_string(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Serialization(err.to_string())
    }
}
