use std::path::PathBuf;

use crate::spaces::metric::MetricViolation;

/// Errors raised across the crate. Variant names double as the error names
/// reported by the command-line tool.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input matrix is not square (row {row} has {found} entries, expected {expected})")]
    NonSquareInput { row: usize, found: usize, expected: usize },
    #[error("distance matrix is not a metric: {}", .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidMetric(Vec<MetricViolation>),
    #[error("invalid space descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("point index {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("witness mode {mode} is not supported by the {kind} backend")]
    UnsupportedMode { mode: &'static str, kind: &'static str },
    #[error("ball family is empty")]
    EmptyFamily,
    #[error("weight {value} at position {position} is not positive")]
    NonPositiveWeight { position: usize, value: f64 },
    #[error("sides ({0}, {1}, {2}) violate the triangle inequality")]
    TriangleInequalityViolated(f64, f64, f64),
    #[error("all three sides are zero")]
    DegenerateAllZero,
    #[error("radius function does not match the domain: {0}")]
    DomainMismatch(String),
    #[error("radius function is not admissible at pair ({0}, {1})")]
    NotAdmissible(usize, usize),
    #[error("coordinate descent did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize, best: Vec<f64> },
    #[error("triple ({0}, {1}, {2}) is degenerate (a Gromov product vanishes)")]
    DegenerateTriple(usize, usize, usize),
    #[error("central angles are not realizable on a circle: {0}")]
    UnrealizableAngles(String),
    #[error("triangle is not equilateral: sides ({0}, {1}, {2})")]
    NotEquilateral(f64, f64, f64),
    #[error("tuple is degenerate: radius {radius} at point {point} is below tolerance")]
    DegenerateTuple { point: usize, radius: f64 },
    #[error("sample of {found} points is too small (need at least {needed})")]
    SampleTooSmall { found: usize, needed: usize },
    #[error("filtrations are built on different base points")]
    MismatchedBases,
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("complex has {found} simplices, limit is {limit}")]
    TooLarge { found: usize, limit: usize },
    #[error("record ({0}, {1}, {2}) carries a non-finite value")]
    DegenerateLeak(usize, usize, usize),
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable name of the variant, used for reporting.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonSquareInput { .. } => "NonSquareInput",
            Error::InvalidMetric(_) => "InvalidMetric",
            Error::InvalidDescriptor(_) => "InvalidDescriptor",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::UnsupportedMode { .. } => "UnsupportedMode",
            Error::EmptyFamily => "EmptyFamily",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::TriangleInequalityViolated(..) => "TriangleInequalityViolated",
            Error::DegenerateAllZero => "DegenerateAllZero",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::NotAdmissible(..) => "NotAdmissible",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DegenerateTriple(..) => "DegenerateTriple",
            Error::UnrealizableAngles(_) => "UnrealizableAngles",
            Error::NotEquilateral(..) => "NotEquilateral",
            Error::DegenerateTuple { .. } => "DegenerateTuple",
            Error::SampleTooSmall { .. } => "SampleTooSmall",
            Error::MismatchedBases => "MismatchedBases",
            Error::InvalidFiltration(_) => "InvalidFiltration",
            Error::TooLarge { .. } => "TooLarge",
            Error::DegenerateLeak(..) => "DegenerateLeak",
            Error::MalformedCsv(_) => "MalformedCsv",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "JsonError",
            Error::Csv(_) => "CsvError",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
