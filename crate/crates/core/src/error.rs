use thiserror::Error;

/// Errors reported by the solvers, oracles and parsers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty instance")]
    EmptyInstance,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("instance has odd cardinality ({n}); drop a point before matching")]
    OddCardinality { n: usize },

    #[error("points are not in strictly convex position")]
    NotConvex,

    /// A size-capped routine was asked to run above its cap. The caps guard
    /// quadratic or cubic work, not correctness.
    #[error("{what} supports at most {cap} points, got {n}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        n: usize,
    },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid generator config: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An internal invariant failed. Seeing this means a bug or a degenerate
    /// geometry the algorithms do not claim to handle.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
