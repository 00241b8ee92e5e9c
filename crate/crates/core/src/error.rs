use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0:?} is not a monic irreducible polynomial over F_{1}")]
    Reducible(Vec<u32>, u32),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {0} out of range for a field of order {1}")]
    ElementOutOfRange(u32, u32),
    #[error("malformed field literal {0:?}")]
    BadFieldLiteral(String),
    #[error("malformed element literal {0:?} for F_{1}")]
    BadElementLiteral(String, u32),
    #[error("malformed point literal {0:?}")]
    BadPointLiteral(String),
    #[error("invalid weight system {0:?}: {1}")]
    BadWeights(Vec<u32>, &'static str),
    #[error("tuple length {0} does not match ambient dimension {1}")]
    LengthMismatch(usize, usize),
    #[error("the zero tuple is not a point")]
    ZeroTuple,
    #[error("scaling factor must be nonzero")]
    ZeroScalar,
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("invalid family: {0}")]
    BadFamily(String),
    #[error("surface expects {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("monomial {0} is not a slot of family {1}")]
    UnknownSlot(String, String),
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("extension F_{0}^{1} exceeds the order cap {2}")]
    ExtensionTooLarge(u32, u32, u32),
    #[error("extension degree must be at least 1")]
    BadExtensionDegree,
    #[error("search space of {size} surfaces exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("census requires a field with at most 256 elements")]
    FieldTooLargeForCensus,
    #[error("projective counting needs a family whose solution sets are unions of scaling classes")]
    NotClassClosed,
    #[error("locus filter does not match the search space: {0}")]
    BadFilter(String),
    #[error("checkpoint {path} belongs to a different search space")]
    CheckpointMismatch { path: PathBuf },
    #[error("reports cannot be merged: {0}")]
    ReportMismatch(String),
    #[error("unknown claim {0:?}")]
    UnknownClaim(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("{path}:{line}: {msg}")]
    Table { path: String, line: usize, msg: String },
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), msg: msg.into() }
    }
}
