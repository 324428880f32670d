use thiserror::Error;

use crate::verdict::{CriteriaReport, Exclusion};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{value} is not invertible modulo {modulus} (gcd {gcd})")]
    NotInvertible { value: u64, modulus: u64, gcd: u64 },

    #[error(
        "{base}^{bound} is not 1 modulo {modulus}; supplied bound is not a multiple of the order"
    )]
    BoundViolation {
        base: u64,
        bound: u128,
        modulus: u64,
    },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("prime {p} ramifies in Q(sqrt({d}))")]
    Ramified { d: i64, p: u64 },

    #[error("prime {p} is excluded: {reason}")]
    ExcludedPrime { p: u64, reason: Exclusion },

    #[error("linear oracle refused n = {n}: cap is {cap}")]
    OracleCap { n: u64, cap: u64 },

    /// An identity that holds for every valid input failed; always a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("Williams congruence violated for d = {d}, p = {p}: lhs {lhs} != rhs {rhs}")]
    CongruenceViolation { d: i64, p: u64, lhs: u64, rhs: u64 },

    #[error("criteria disagree for d = {}, p = {}", .0.d, .0.p)]
    EquivalenceViolation(Box<CriteriaReport>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
