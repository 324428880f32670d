//! Combines the exclusion hypotheses and the four criteria into one
//! p-rationality verdict per `(d, p)`.
//!
//! For an odd prime `p ∤ (ε − ε̄)²·h_d` the following are equivalent, and
//! each says `Q(√d)` is **not** `p`-rational:
//!
//! 1. `F_{p−(d/p)} ≡ 0 (mod p²)` (Fibonacci-Wieferich),
//! 2. `ε^{p^r−1} ≡ 1 (mod p²)` (Wieferich to base `ε`),
//! 3. `k(p) = k(p²)` (equal periods),
//! 4. `Σ β_p(i)α_p(i) ≡ 0 (mod p)` (Williams sum vanishes).
//!
//! When `p` divides `v` but not `d·h_d`, only criterion 2 keeps its
//! hypotheses; the verdict is then taken from it alone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{big_mod, is_prime, kronecker};
use crate::error::{Error, Result};
use crate::fibmod::{is_fibonacci_wieferich, wall_period, wall_period_square, FibParams};
use crate::quadfield::QuadraticField;
use crate::unitresidue::is_wieferich_base_unit;
use crate::williams::williams_criterion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    PrimeIsTwo,
    /// `p | (ε − ε̄)² = d·v²`; `ramified` when `p | d`.
    DividesUnitDiscriminant {
        ramified: bool,
    },
    DividesClassNumber,
    /// `p = 3`: evaluated normally, flagged because the unit-side
    /// equivalence is usually proved for `p ≥ 5`.
    SmallPrimeNote,
}

impl Exclusion {
    /// Hard exclusions suppress every criterion.
    pub fn is_hard(&self) -> bool {
        match self {
            Exclusion::PrimeIsTwo | Exclusion::DividesClassNumber => true,
            Exclusion::DividesUnitDiscriminant { ramified } => *ramified,
            Exclusion::SmallPrimeNote => false,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Exclusion::PrimeIsTwo => "prime-is-two",
            Exclusion::DividesUnitDiscriminant { ramified: true } => "ramified",
            Exclusion::DividesUnitDiscriminant { ramified: false } => "divides-unit-discriminant",
            Exclusion::DividesClassNumber => "divides-class-number",
            Exclusion::SmallPrimeNote => "small-prime",
        }
    }
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Exclusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prime-is-two" => Exclusion::PrimeIsTwo,
            "ramified" => Exclusion::DividesUnitDiscriminant { ramified: true },
            "divides-unit-discriminant" => Exclusion::DividesUnitDiscriminant { ramified: false },
            "divides-class-number" => Exclusion::DividesClassNumber,
            "small-prime" => Exclusion::SmallPrimeNote,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown exclusion `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PRational,
    NotPRational,
    Excluded,
}

impl Verdict {
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::PRational => "p-rational",
            Verdict::NotPRational => "not-p-rational",
            Verdict::Excluded => "excluded",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p-rational" => Ok(Verdict::PRational),
            "not-p-rational" => Ok(Verdict::NotPRational),
            "excluded" => Ok(Verdict::Excluded),
            other => Err(Error::InvalidArgument(format!("unknown verdict `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Fibonacci-Wieferich test only: one sequence term mod `p²`.
    Fast,
    /// All four criteria, which must agree.
    CrossValidate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub d: i64,
    pub p: u64,
    pub excluded: Vec<Exclusion>,
    pub fibonacci_wieferich: Option<bool>,
    pub wieferich_unit: Option<bool>,
    pub period_equal: Option<bool>,
    pub williams_nonzero: Option<bool>,
    pub verdict: Verdict,
}

impl CriteriaReport {
    /// Every evaluated criterion says the same thing about `p`.
    pub fn is_consistent(&self) -> bool {
        let votes = [
            self.fibonacci_wieferich,
            self.wieferich_unit,
            self.period_equal,
            self.williams_nonzero.map(|x| !x),
        ];
        let mut seen = votes.iter().flatten();
        match seen.next() {
            Some(first) => seen.all(|x| x == first),
            None => true,
        }
    }
}

pub fn exclusions(field: &QuadraticField, p: u64) -> Vec<Exclusion> {
    let mut out = Vec::new();
    if p == 2 {
        out.push(Exclusion::PrimeIsTwo);
    }
    let ramified = field.d % p as i64 == 0;
    if ramified || big_mod(&field.unit.v, p) == 0 {
        out.push(Exclusion::DividesUnitDiscriminant { ramified });
    }
    if field.h.is_multiple_of(p) {
        out.push(Exclusion::DividesClassNumber);
    }
    if p == 3 {
        out.push(Exclusion::SmallPrimeNote);
    }
    out
}

fn period_equality(field: &QuadraticField, p: u64) -> Result<bool> {
    let params = FibParams::from_field(field);
    let eps = kronecker(field.d, p as i64)?;
    let rec = wall_period(&params, p, eps)?;
    Ok(wall_period_square(&params, p, rec.k) == rec.k)
}

/// Verdict for a prime already known to be prime.
pub(crate) fn decide_prime(field: &QuadraticField, p: u64, mode: Mode) -> Result<CriteriaReport> {
    let excluded = exclusions(field, p);
    let mut report = CriteriaReport {
        d: field.d,
        p,
        excluded,
        fibonacci_wieferich: None,
        wieferich_unit: None,
        period_equal: None,
        williams_nonzero: None,
        verdict: Verdict::Excluded,
    };
    if report.excluded.iter().any(Exclusion::is_hard) {
        return Ok(report);
    }
    let degenerate = report
        .excluded
        .contains(&Exclusion::DividesUnitDiscriminant { ramified: false });
    let not_rational = if degenerate {
        let unit = is_wieferich_base_unit(field, p)?.is_wieferich;
        report.wieferich_unit = Some(unit);
        unit
    } else {
        let fw = is_fibonacci_wieferich(field, p)?;
        report.fibonacci_wieferich = Some(fw);
        if mode == Mode::CrossValidate {
            report.wieferich_unit = Some(is_wieferich_base_unit(field, p)?.is_wieferich);
            report.period_equal = Some(period_equality(field, p)?);
            report.williams_nonzero = Some(williams_criterion(field, p)?);
        }
        fw
    };
    report.verdict = if not_rational {
        Verdict::NotPRational
    } else {
        Verdict::PRational
    };
    if !report.is_consistent() {
        return Err(Error::EquivalenceViolation(Box::new(report)));
    }
    Ok(report)
}

/// p-rationality of `Q(√d)` at the prime `p`.
pub fn decide(field: &QuadraticField, p: u64, mode: Mode) -> Result<CriteriaReport> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    decide_prime(field, p, mode)
}

/// Outcome of requiring `p`-rationality of several fields at once.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conjunction {
    Holds,
    Fails,
    /// No member fails, but at least one is excluded.
    Indeterminate,
}

/// Whether every field in `fields` is `p`-rational.
pub fn simultaneous(fields: &[QuadraticField], p: u64) -> Result<Conjunction> {
    let mut indeterminate = false;
    for field in fields {
        match decide(field, p, Mode::Fast)?.verdict {
            Verdict::NotPRational => return Ok(Conjunction::Fails),
            Verdict::Excluded => indeterminate = true,
            Verdict::PRational => {}
        }
    }
    Ok(if indeterminate {
        Conjunction::Indeterminate
    } else {
        Conjunction::Holds
    })
}
