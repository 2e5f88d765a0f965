use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    InvalidDimension(usize),
    #[error("grid level {0} is too large")]
    InvalidLevel(u32),
    #[error("expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("value at cell {index} is not strictly positive ({value})")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("value at cell {index} is not finite")]
    NonFinite { index: usize },
    #[error("cube (anchor {anchor:?}, side {side}) does not fit in the grid")]
    CubeOutOfBounds { anchor: [usize; 2], side: usize },
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("invalid cube family: {0}")]
    InvalidFamily(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("dual weight is not representable for exponent p = {p}")]
    ExponentOverflow { p: f64 },
    #[error("threshold t = {t} must exceed the cube average {average}")]
    InvalidThreshold { t: f64, average: f64 },
    #[error("no cube in the family admits a doubled cube")]
    NoAdmissibleCube,
    #[error("epsilon {eps} outside the admissible range [0, {max}]")]
    EpsilonOutOfRange { eps: f64, max: f64 },
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset is not contained in the cube")]
    SubsetOutsideCube,
    #[error("weight is constant; the check is degenerate")]
    DegenerateWeight,
    #[error("function is constant on the cube; the check is degenerate")]
    DegenerateFunction,
    #[error("invalid constant: {0}")]
    InvalidConstant(String),
    #[error("exponent relation has no admissible solution: {0}")]
    ExponentBlowup(String),
    #[error("alpha = {0} must lie in (0, n)")]
    AlphaOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
