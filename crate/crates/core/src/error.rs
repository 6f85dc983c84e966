use std::path::PathBuf;

use chrono::NaiveDate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: malformed record: {reason}", path.display())]
    MalformedRecord {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{}: file contains no records", .0.display())]
    EmptyFile(PathBuf),

    #[error("{}: missing column `{column}`", path.display())]
    MissingColumn { path: PathBuf, column: String },

    #[error("{}:{line}: duplicate date {date}", path.display())]
    DuplicateDate {
        path: PathBuf,
        line: u64,
        date: NaiveDate,
    },

    #[error("{}:{line}: non-numeric value {value:?} (data row {row})", path.display())]
    NonNumericValue {
        path: PathBuf,
        line: u64,
        row: usize,
        value: String,
    },

    #[error("keyword list is empty")]
    EmptyKeywords,

    #[error("no trading date is shared by the return series and `{0}`")]
    EmptyIntersection(String),

    #[error("column `{0}` has fewer than 2 observations; spline fill impossible")]
    SplineFillImpossible(String),

    #[error("invalid series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("nonpositive price {value} on {date}")]
    NonpositivePrice { date: NaiveDate, value: f64 },

    #[error("too few points: need at least {required}, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("knot x-coordinates must be strictly increasing (violation at index {0})")]
    DuplicateX(usize),

    #[error("x = {x} outside spline range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("target date {0} lies outside the series span")]
    TargetOutsideSpan(NaiveDate),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("insufficient observations: need more than {required}, got {got}")]
    InsufficientObservations { required: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("response is constant; R-squared undefined")]
    ConstantResponse,

    #[error("invalid design: {0}")]
    InvalidDesign(&'static str),

    #[error("residuals are all zero")]
    AllZeroResiduals,

    #[error("invalid GARCH parameters: {0}")]
    InvalidParams(String),

    #[error("degrees of freedom must exceed 2, got {0}")]
    NuOutOfRange(f64),

    #[error("variance must be positive, got {0}")]
    NonpositiveVariance(f64),

    #[error("log-likelihood is not finite")]
    NonFiniteLikelihood,
}
