//! p-rationality of real quadratic fields `Q(√d)` through four equivalent
//! criteria: Fibonacci-Wieferich primes, Wieferich primes to base the
//! fundamental unit, equality of Wall periods mod `p` and `p²`, and the
//! Williams character sum.

pub mod arith;
pub mod error;
pub mod fibmod;
pub mod quadfield;
pub mod scan;
pub mod unitresidue;
pub mod verdict;
pub mod williams;

pub use error::{Error, Result};
pub use quadfield::{field_invariants, is_fundamental_discriminant, QuadraticField};
pub use scan::{reproduce_table, scan, ScanConfig, ScanRecord, ScanReport};
pub use verdict::{decide, CriteriaReport, Exclusion, Mode, Verdict};
