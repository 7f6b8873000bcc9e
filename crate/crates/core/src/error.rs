//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, aggregation, estimation and generation.
#[derive(Debug, Error)]
pub enum Error {
    /// A line of tick CSV could not be parsed at all.
    #[error("parse error: {msg}, line {line}")]
    Parse { line: usize, msg: String },

    /// A parsed trade violates a record invariant (nonpositive price, zero volume, ...).
    #[error("validation error: {msg}, line {line}")]
    InvalidTrade { line: usize, msg: String },

    /// A series-level invariant does not hold.
    #[error("validation error: {0}")]
    Validation(String),

    /// No trades / records at all.
    #[error("empty series: {0}")]
    EmptySeries(String),

    /// Not enough observations for the requested operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Standardization is undefined because the sample variance is zero.
    #[error("zero variance: standardization undefined")]
    ZeroVariance,

    /// Volume normalization is undefined because the mean volume is zero.
    #[error("degenerate volume: mean volume is zero")]
    DegenerateVolume,

    /// A sample has no usable spread (all equal or nonpositive).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Too few CCDF points in the requested tail region.
    #[error("insufficient tail: {have} points in fit range, need {need}")]
    InsufficientTail { have: usize, need: usize },

    /// A fit produced an unusable result.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// The q-Gaussian fit hit its evaluation cap; fields carry the best point seen.
    #[error(
        "fit failure: no convergence after {evals} evaluations; \
         best so far q={q:.6} mu={mu:.6} sigma={sigma:.6} objective={objective:.6e}"
    )]
    FitNonConvergence {
        evals: usize,
        q: f64,
        mu: f64,
        sigma: f64,
        objective: f64,
    },

    /// An argument is outside its allowed range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two fits cannot be combined because they were made by different methods.
    #[error("comparability error: method mismatch ({left} vs {right})")]
    MethodMismatch { left: String, right: String },

    /// The data does not span enough range (e.g. less than one decade).
    #[error("insufficient range: {0}")]
    InsufficientRange(String),

    /// Numerical integration or another numeric routine failed to converge.
    #[error("numerics error: {0}")]
    Numerics(String),

    /// Synthetic market generation failed (price path under/overflow).
    #[error("generation error at trade {index}: {msg}")]
    Generation { index: usize, msg: String },

    /// I/O failure while reading or writing an artifact.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON (session calendars, configs).
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
