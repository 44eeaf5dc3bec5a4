use thiserror::Error;

use crate::ground::PointId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric violation: {0}")]
    MetricViolation(String),
    #[error("euclidean metric or coordinate dictionary requested but points carry no coordinates")]
    MissingCoords,
    #[error("unknown point id {0}")]
    UnknownPoint(PointId),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty set")]
    EmptySet,
    #[error("set is not a subset of the ambient set")]
    NotSubset,
    #[error("point {0} lies in the hull and cannot be separated")]
    NotSeparable(PointId),
    #[error("function is improper: {0}")]
    ImproperFunction(String),
    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),
    #[error("ill-formed linear program: {0}")]
    IllFormed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),
}
