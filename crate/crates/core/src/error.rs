use thiserror::Error;

/// A located parse failure (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at_offset(src: &[u8], offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&c| c == b'\n').map_or(0, |k| k + 1);
        let column = String::from_utf8_lossy(&src[line_start..offset]).chars().count() + 1;
        ParseError { line, column, message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("inconsistent presentation: the ideal contains the unit")]
    InconsistentPresentation,
    #[error("degree {degree} exceeds the degree cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("unknown letter '{0}'")]
    UnknownLetter(String),
    #[error("duplicate generator '{0}'")]
    DuplicateGenerator(String),
    #[error("quantum families act on different spaces")]
    MismatchedSpace,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis is not a family of orthogonal idempotents: {0}")]
    NotIdempotentBasis(String),
    #[error("unknown parametrization '{0}'")]
    UnknownParametrization(String),
    #[error("presentation hash mismatch: cache has {found}, expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("corrupt cache: {0}")]
    CorruptCache(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
