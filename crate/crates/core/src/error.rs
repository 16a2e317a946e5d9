use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension {name} must be at least 1, got {value}")]
    Dimension { name: &'static str, value: usize },

    #[error("shape mismatch in `{field}`: expected {expected}, found {found}")]
    Shape {
        field: String,
        expected: String,
        found: String,
    },

    #[error("cost magnitude bound {bound} exceeds the allowed {allowed} (i64::MAX / 4)")]
    Overflow { bound: i128, allowed: i128 },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("infeasible fractional solution: {0}")]
    InfeasibleFractional(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("solution space has {required} elements, above the enumeration limit {limit}")]
    SpaceTooLarge { required: BigUint, limit: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}
