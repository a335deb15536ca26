use thiserror::Error;

use crate::chart::ChartKind;
use crate::poly::PolyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("eps_q must be a positive rational, got {0}")]
    InvalidEpsQ(String),
    #[error("unknown chart `{0}` (expected one of P, R, S, T)")]
    UnknownChart(String),
    #[error("potential must be written over the chart variables {expected:?}, got {got:?}")]
    ChartVariables { expected: Vec<String>, got: Vec<String> },
    #[error("{operation} is not defined for chart {chart}")]
    UnsupportedChart {
        operation: &'static str,
        chart: ChartKind,
    },
    #[error("pull-back metric is singular at {point:?} (det = {det:e})")]
    SingularMetric { point: [f64; 3], det: f64 },
    #[error("initial covector is not null: H = {0:e}")]
    NotNull(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
