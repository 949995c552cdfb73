use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("calendar is empty")]
    EmptyCalendar,

    #[error("calendar dates must be strictly increasing: {prev} is followed by {next}")]
    UnorderedCalendar { prev: NaiveDate, next: NaiveDate },

    #[error("date {0} is not in the market calendar")]
    UnknownDate(NaiveDate),

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("sampler picks {count} market day(s); at least 2 are needed for one return period")]
    DegenerateSampler { count: usize },

    #[error("sampler indices must be strictly increasing and inside a calendar of {len} days")]
    InvalidSampler { len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("series are not indexed by the same market calendar")]
    CalendarMismatch,

    #[error("price at position {index} must be positive, found {value}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("cash dividend {dividend} on {date} is not below the prior close {prior_close}")]
    InvalidDividend {
        date: NaiveDate,
        dividend: f64,
        prior_close: f64,
    },

    #[error("more than one {kind} action on {date}")]
    ConflictingAction { date: NaiveDate, kind: &'static str },

    #[error("invalid corporate action on {date}: {reason}")]
    InvalidAction { date: NaiveDate, reason: String },

    #[error("scale factor must be positive, found {0}")]
    InvalidScale(f64),

    #[error("invalid averaging vector: {0}")]
    InvalidAveragingVector(String),

    #[error("invalid weight system: {0}")]
    InvalidWeights(String),

    #[error("invalid notional shares: {0}")]
    InvalidShares(String),

    #[error("matrix is rank deficient: smallest/largest singular value ratio {ratio:.3e}")]
    RankDeficient { ratio: f64 },

    #[error("system is underdetermined: {rows} observations for {cols} unknowns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("recovered proportion for {ticker} is negative ({value:.3e})")]
    NegativeProportion { ticker: String, value: f64 },

    #[error("return-risk ratio is undefined for a zero-variance column")]
    UndefinedRatio,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for validation failures, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RankDeficient { .. }
            | Error::Underdetermined { .. }
            | Error::NegativeProportion { .. }
            | Error::UndefinedRatio => 2,
            _ => 1,
        }
    }
}
