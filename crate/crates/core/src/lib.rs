//! Pareto records in `d` dimensions: how many current records does a new
//! record break?
//!
//! The crate simulates the finite record process ([`stream`]), samples the
//! Poisson-process limit law of the kill count exactly up to an ℓ1
//! truncation whose total-variation cost is known ([`limit`]), and
//! evaluates the closed-form references and bounds ([`analytics`]).

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod frontier;
pub mod geometry;
pub mod law;
pub mod limit;
pub mod rng;
pub mod stream;

pub use error::{Error, Result};
pub use frontier::{maxima_of, Backend, Frontier, RecordOutcome};
pub use geometry::Point;
pub use law::EmpiricalLaw;
