//! Near-optimal solutions and certified upper bounds for two geometric
//! maximization problems on planar point sets: maximum-weight perfect
//! matching and maximum travelling salesman tours.
//!
//! The central quantity is the star value of a point set, the sum of
//! distances from all points to a best-possible single center (the Weber
//! point). It upper-bounds the value of any perfect matching, and twice it
//! upper-bounds any tour. The matching and tour heuristics here pair up or
//! chain together points that lie on nearly opposite sides of that center,
//! which makes the same quantity both the construction device and the
//! quality certificate: solutions come back with instance-specific bounds
//! that are often within a fraction of a percent.
//!
//! - [`weber`] computes the star value (numerically and, when a balance
//!   condition certifies it, combinatorially) and a sharper variant that
//!   discounts each point by its best detour.
//! - [`matching`] and [`tour`] build antipodal matchings and tours around
//!   the center and polish them with budgeted local search.
//! - [`oracles`] holds exact references for small instances: brute force,
//!   the fractional matching optimum via an assignment reduction, and a
//!   fractional subtour solution witnessing an integrality gap.
//! - [`instances`] generates seeded uniform and clustered instances and
//!   reads TSPLIB coordinate files.

pub mod error;
pub mod geom;
pub mod instances;
pub mod matching;
pub mod oracles;
pub mod tour;
pub mod weber;

pub use error::{Error, Result};
pub use geom::{dist, Instance, InstanceSource, Point2D};
pub use matching::{cross_matching, matching_local_search, Matching};
pub use tour::{cross_tour, tour_local_search, Tour};
pub use weber::{fwp_improved, fwp_value, weber_combinatorial, weber_numeric, WeberResult};

/// Stopping rules for the local searches. A search halts when it has spent
/// `evaluations` candidate-move evaluations or when `time_limit` elapses,
/// whichever comes first. The seed fixes every random choice, so equal
/// budgets give equal results.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub evaluations: u64,
    pub time_limit: Option<std::time::Duration>,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            evaluations: 1_000_000,
            time_limit: None,
            seed: 0,
        }
    }
}
