//! Character sums `β_p(i)`, reciprocal sums `α_p(i)` and Williams'
//! congruence.
//!
//! For an odd prime `p ∤ d` let `p'` be the inverse of `p` modulo `d` and
//! `{n}` the least non-negative residue of `n` modulo `d`. Then
//!
//! ```text
//! β_p(i) = Σ_{j=1}^{{p'i}−1} (d/j)          (empty sum = 0)
//! α_p(i) = Σ_{1 ≤ k ≤ (p−1)/2, k ≡ i (d)} 1/k  (mod p)
//! ```
//!
//! and Williams' congruence reads
//!
//! ```text
//! h_d · U_{p−(d/p)} / p ≡ −2 (d/p) N^{((d/p)−1)/2} Σ_{i=1}^{(p−1)/2} β_p(i)/i  (mod p)
//! ```
//!
//! where `N = N(ε_d)` and `U_n = (εⁿ − ε̄ⁿ)/√d`. In half-coordinates
//! `ε − ε̄ = v√d`, so `U_n = v·F_n` with `F` the sequence of
//! [`crate::fibmod`]; the two normalizations agree exactly when `v = 1`.
//! Since `v` is a unit mod `p` whenever `p ∤ (ε − ε̄)²`, the vanishing of the
//! right-hand side (equivalently of `Σ_{i=1}^{d} β_p(i)α_p(i)`) still decides
//! whether `F_{p−(d/p)} ≡ 0 (mod p²)`.
//!
//! For `d = 5` and `p ≡ 1 (mod 5)` one has `p' = 1`, so the coefficients
//! `β_p(1..=5)` are `(0, 1, 0, −1, 0)` and the criterion reduces to
//! `α_p(2) − α_p(4) ≢ 0 (mod p)`; see [`golden_ratio_criterion`].

use serde::Serialize;

use crate::arith::{batch_inverse, inv_mod, kronecker, mul_mod, Residue};
use crate::error::{Error, Result};
use crate::fibmod::pair_raw;
use crate::quadfield::QuadraticField;
use crate::verdict::Exclusion;

/// Inverses are produced in blocks of this size with one gcd per block.
const INVERSE_BLOCK: usize = 1 << 14;

/// Prefix sums `S(n) = Σ_{j=1}^{n} (d/j)` for `0 ≤ n < d`.
struct CharPrefix {
    d: i64,
    prefix: Vec<i32>,
}

impl CharPrefix {
    fn new(d: i64) -> Self {
        let mut prefix = Vec::with_capacity(d as usize);
        let mut acc = 0i32;
        prefix.push(0);
        for j in 1..d {
            acc += kronecker(d, j).expect("j > 0") as i32;
            prefix.push(acc);
        }
        CharPrefix { d, prefix }
    }

    fn beta(&self, p_inv: u64, i: u64) -> i64 {
        let r = mul_mod(p_inv, i, self.d as u64);
        if r <= 1 {
            0
        } else {
            self.prefix[r as usize - 1] as i64
        }
    }
}

fn p_inverse_mod_d(d: i64, p: u64) -> Result<u64> {
    inv_mod(p % d as u64, d as u64).map_err(|_| Error::Ramified { d, p })
}

fn check_odd(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be an odd prime"
        )));
    }
    Ok(())
}

/// `β_p(i)` for `1 ≤ i ≤ d`; depends only on `i mod d`.
pub fn beta(d: i64, p: u64, i: u64) -> Result<i64> {
    let p_inv = p_inverse_mod_d(d, p)?;
    let r = mul_mod(p_inv, i, d as u64);
    Ok((1..r as i64)
        .map(|j| kronecker(d, j).expect("j > 0") as i64)
        .sum())
}

/// `α_p(i)`: sum of `1/k mod p` over `k ≤ (p−1)/2` with `k ≡ i (mod d)`.
pub fn alpha(d: i64, p: u64, i: u64) -> Result<Residue> {
    check_odd(p)?;
    let d = d as u64;
    let half = (p - 1) / 2;
    let first = match i % d {
        0 => d,
        r => r,
    };
    let mut acc = Residue::zero(p);
    let mut k = first;
    while k <= half {
        acc = acc + Residue::new(inv_mod(k, p)?, p);
        k += d;
    }
    Ok(acc)
}

/// Both groupings of `Σ_{i≤(p−1)/2} β_p(i)/i`, sharing one pass over the
/// inverses: per residue class via `α_p`, and term by term.
struct Sums {
    alpha: Vec<u64>,
    grouped: u64,
    direct: u64,
}

fn reciprocal_sums(chars: &CharPrefix, p: u64, p_inv: u64, classes: usize) -> Result<Sums> {
    let d = chars.d as u64;
    let half = (p - 1) / 2;
    let mut alpha = vec![0u64; classes];
    let mut direct = 0u64;
    let mut block: Vec<u64> = Vec::with_capacity(INVERSE_BLOCK);
    let mut start = 1u64;
    while start <= half {
        let end = half.min(start + INVERSE_BLOCK as u64 - 1);
        block.clear();
        block.extend(start..=end);
        let inverses = batch_inverse(&block, p)?;
        for (k, inv) in (start..=end).zip(inverses) {
            let class = ((k - 1) % d) as usize; // index of i = class + 1
            alpha[class] = crate::arith::add_mod(alpha[class], inv, p);
            let b = chars.beta(p_inv, k);
            let term = mul_mod(crate::arith::reduce_i64(b, p), inv, p);
            direct = crate::arith::add_mod(direct, term, p);
        }
        start = end + 1;
    }
    let mut grouped = 0u64;
    for (class, &a) in alpha.iter().enumerate() {
        let b = chars.beta(p_inv, class as u64 + 1);
        grouped = crate::arith::add_mod(grouped, mul_mod(crate::arith::reduce_i64(b, p), a, p), p);
    }
    Ok(Sums {
        alpha,
        grouped,
        direct,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WilliamsReport {
    pub d: i64,
    pub p: u64,
    /// `(d/p)`
    pub eps: i8,
    /// `p'`, the inverse of `p` modulo `d`.
    pub p_inv: Residue,
    /// `β_p(i)` for `i = 1..=d` (index `i − 1`).
    pub beta: Vec<i64>,
    /// `α_p(i)` for `i = 1..=d` (index `i − 1`).
    pub alpha: Vec<Residue>,
    /// `F_{p−(d/p)}/p mod p`; absent when `p` divides `v`.
    pub fibonacci_quotient: Option<Residue>,
    /// `h_d · U_{p−(d/p)}/p mod p`.
    pub lhs: Residue,
    pub rhs: Residue,
    /// `Σ_{i=1}^{d} β_p(i)·α_p(i) mod p`.
    pub criterion_sum: Residue,
}

/// `−2 (d/p) N^{((d/p)−1)/2}`, which is `−2` or `2N`.
fn sign_factor(eps: i8, norm: i8) -> i64 {
    if eps == 1 {
        -2
    } else {
        2 * norm as i64
    }
}

/// Evaluates both sides of Williams' congruence and fails if they differ.
pub fn williams_congruence(field: &QuadraticField, p: u64) -> Result<WilliamsReport> {
    check_odd(p)?;
    let d = field.d;
    let p_inv = p_inverse_mod_d(d, p)?;
    let eps = kronecker(d, p as i64)?;
    let chars = CharPrefix::new(d);
    let sums = reciprocal_sums(&chars, p, p_inv, d as usize)?;
    if sums.grouped != sums.direct {
        return Err(Error::Inconsistency(format!(
            "regrouped sum {} != direct sum {} for d = {d}, p = {p}",
            sums.grouped, sums.direct
        )));
    }

    let m = p * p;
    let n = if eps == 1 { p - 1 } else { p + 1 };
    let f = pair_raw(field.trace_mod(m), field.norm_b, n, m).0;
    let v = field.unit_mod(m).1;
    let u_n = mul_mod(v, f, m);
    if !u_n.is_multiple_of(p) {
        return Err(Error::Inconsistency(format!(
            "U_{n} is not divisible by {p} for d = {d}"
        )));
    }
    let fibonacci_quotient = f.is_multiple_of(p).then(|| Residue::new(f / p, p));
    let lhs = Residue::new(field.h % p, p) * Residue::new(u_n / p, p);
    let criterion_sum = Residue::new(sums.grouped, p);
    let rhs = Residue::from_i64(sign_factor(eps, field.norm_b), p) * criterion_sum;
    if lhs != rhs {
        return Err(Error::CongruenceViolation {
            d,
            p,
            lhs: lhs.value(),
            rhs: rhs.value(),
        });
    }
    let beta = (1..=d as u64).map(|i| chars.beta(p_inv, i)).collect();
    let alpha = sums.alpha.iter().map(|&a| Residue::new(a, p)).collect();
    Ok(WilliamsReport {
        d,
        p,
        eps,
        p_inv: Residue::new(p_inv, d as u64),
        beta,
        alpha,
        fibonacci_quotient,
        lhs,
        rhs,
        criterion_sum,
    })
}

fn check_not_excluded(field: &QuadraticField, p: u64) -> Result<()> {
    check_odd(p)?;
    if field.divides_unit_discriminant(p) {
        let ramified = field.d % p as i64 == 0;
        return Err(Error::ExcludedPrime {
            p,
            reason: Exclusion::DividesUnitDiscriminant { ramified },
        });
    }
    Ok(())
}

/// `Σ_{i=1}^{d} β_p(i)α_p(i) ≢ 0 (mod p)`, i.e. `Q(√d)` is `p`-rational
/// when additionally `p ∤ h_d`.
pub fn williams_criterion(field: &QuadraticField, p: u64) -> Result<bool> {
    check_not_excluded(field, p)?;
    let d = field.d;
    let p_inv = p_inverse_mod_d(d, p)?;
    let chars = CharPrefix::new(d);
    // α_p(i) vanishes for every class above (p − 1)/2
    let classes = (d as u64).min((p - 1) / 2).max(1) as usize;
    let sums = reciprocal_sums(&chars, p, p_inv, classes)?;
    if sums.grouped != sums.direct {
        return Err(Error::Inconsistency(format!(
            "regrouped sum {} != direct sum {} for d = {d}, p = {p}",
            sums.grouped, sums.direct
        )));
    }
    Ok(sums.grouped != 0)
}

/// Closed forms at `p = 3` and `p = 5`: `β_3(1) ≢ 0 (mod 3)` and
/// `β_5(1) + 3·β_5(2) ≢ 0 (mod 5)`.
pub fn special_criterion(field: &QuadraticField, p: u64) -> Result<bool> {
    check_not_excluded(field, p)?;
    match p {
        3 => Ok(beta(field.d, 3, 1)?.rem_euclid(3) != 0),
        5 => Ok((beta(field.d, 5, 1)? + 3 * beta(field.d, 5, 2)?).rem_euclid(5) != 0),
        _ => Err(Error::InvalidArgument(format!(
            "closed form exists only for p = 3, 5, got {p}"
        ))),
    }
}

/// `Q(√5)` at `p ≡ 1 (mod 5)`: `α_p(2) − α_p(4) ≢ 0 (mod p)`.
pub fn golden_ratio_criterion(p: u64) -> Result<bool> {
    if p % 5 != 1 {
        return Err(Error::InvalidArgument(format!(
            "need p ≡ 1 (mod 5), got {p}"
        )));
    }
    Ok(!(alpha(5, p, 2)? - alpha(5, p, 4)?).is_zero())
}
