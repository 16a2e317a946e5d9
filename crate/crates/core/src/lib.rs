//! Bipartite quadratic assignment problems (BQAP1 and BQAP2).
//!
//! * [`model`]: instances, solutions, exact evaluation, file formats, generators.
//! * [`analytics`]: closed-form average value, canonical solutions, shift classes.
//! * [`oracle`]: exhaustive enumeration used as ground truth.
//! * [`heuristics`]: rounding, alternating descent, swap local searches, domination procedure.
//! * [`gadgets`]: structured instances (tightness, bad local optima, partition, padding).

pub mod analytics;
mod error;
pub mod gadgets;
pub mod heuristics;
pub mod model;
pub mod oracle;
mod rational;
mod serde_big;

pub use error::{Error, Result};
pub use model::{FractionalSolution, Instance, Solution, Variant};
pub use oracle::{EnumerationReport, NeighborhoodKind, DEFAULT_LIMIT};
pub use rational::Rational;
