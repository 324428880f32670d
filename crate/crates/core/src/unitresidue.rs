//! Arithmetic in `O_d / p²O_d` and the Wieferich test to base `ε_d`.
//!
//! `ε^{p^r − 1} ≡ 1 (mod p²)` is the unit-side form of the regulator
//! criterion: no p-adic logarithm is ever evaluated.

use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::arith::{kronecker, reduce_i64, Residue};
use crate::error::{Error, Result};
use crate::quadfield::QuadraticField;

/// Class of `(u + v√d)/2` modulo an odd modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RingElem {
    pub u: Residue,
    pub v: Residue,
    pub d_mod: Residue,
}

impl RingElem {
    pub fn new(u: u64, v: u64, d: i64, modulus: u64) -> Self {
        assert!(modulus % 2 == 1 && modulus >= 3, "ring modulus must be odd");
        RingElem {
            u: Residue::new(u, modulus),
            v: Residue::new(v, modulus),
            d_mod: Residue::new(reduce_i64(d, modulus), modulus),
        }
    }

    pub fn one(d: i64, modulus: u64) -> Self {
        RingElem::new(2, 0, d, modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.u.modulus()
    }

    fn half(&self) -> Residue {
        Residue::new(self.modulus().div_ceil(2), self.modulus())
    }

    pub fn conj(&self) -> Self {
        RingElem {
            v: -self.v,
            ..*self
        }
    }

    /// `(u² − d v²)/4`.
    pub fn norm(&self) -> Residue {
        let h = self.half();
        (self.u * self.u - self.d_mod * self.v * self.v) * h * h
    }

    pub fn is_one(&self) -> bool {
        self.u.value() == 2 % self.modulus() && self.v.is_zero()
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut acc = RingElem {
            u: Residue::new(2, self.modulus()),
            v: Residue::zero(self.modulus()),
            d_mod: self.d_mod,
        };
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        debug_assert_eq!(self.d_mod, rhs.d_mod);
        let h = self.half();
        RingElem {
            u: (self.u * rhs.u + self.v * rhs.v * self.d_mod) * h,
            v: (self.u * rhs.v + rhs.u * self.v) * h,
            d_mod: self.d_mod,
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}√d)/2 (mod {})",
            self.u.value(),
            self.v.value(),
            self.modulus()
        )
    }
}

fn check_odd_unramified(d: i64, p: u64) -> Result<()> {
    if p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must be an odd prime"
        )));
    }
    if d.rem_euclid(p as i64) == 0 {
        return Err(Error::Ramified { d, p });
    }
    Ok(())
}

/// Residue degree of an unramified odd prime: 1 if split, 2 if inert.
pub fn residue_degree(d: i64, p: u64) -> Result<u8> {
    check_odd_unramified(d, p)?;
    Ok(if kronecker(d, p as i64)? == 1 { 1 } else { 2 })
}

/// `ε_d^e` in `O_d / p²O_d`.
pub fn unit_pow(field: &QuadraticField, e: u128, p: u64) -> Result<RingElem> {
    check_odd_unramified(field.d, p)?;
    let m = p * p;
    let (u, v) = field.unit_mod(m);
    Ok(RingElem::new(u, v, field.d, m).pow(e))
}

/// `(ε^{p^r−1} − 1)/p` modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FermatQuotient {
    /// Rational coordinate of the class, the displayed quotient.
    pub scalar: Residue,
    /// The whole class in `O_d / pO_d`.
    pub class: RingElem,
}

pub fn fermat_quotient(field: &QuadraticField, p: u64) -> Result<FermatQuotient> {
    let r = residue_degree(field.d, p)? as u32;
    let e = (p as u128).pow(r) - 1;
    let w = unit_pow(field, e, p)?;
    let (wu, wv) = ((w.u - Residue::new(2, p * p)).value(), w.v.value());
    if wu % p != 0 || wv % p != 0 {
        return Err(Error::Inconsistency(format!(
            "ε^{e} ≢ 1 (mod {p}) for d = {}: {w}",
            field.d
        )));
    }
    let class = RingElem::new(wu / p, wv / p, field.d, p);
    let scalar = class.u * class.half();
    Ok(FermatQuotient { scalar, class })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WieferichReport {
    pub p: u64,
    pub r: u8,
    pub fermat_quotient: Residue,
    pub quotient_class: RingElem,
    pub is_wieferich: bool,
}

/// Whether `ε_d^{p^r − 1} ≡ 1 (mod p²)`.
pub fn is_wieferich_base_unit(field: &QuadraticField, p: u64) -> Result<WieferichReport> {
    let r = residue_degree(field.d, p)?;
    let q = fermat_quotient(field, p)?;
    let is_wieferich = q.class.u.is_zero() && q.class.v.is_zero();
    Ok(WieferichReport {
        p,
        r,
        fermat_quotient: q.scalar,
        quotient_class: q.class,
        is_wieferich,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_in_range;
    use crate::fibmod::is_fibonacci_wieferich;
    use crate::quadfield::{field_invariants, is_fundamental_discriminant};
    use proptest::prelude::*;

    #[test]
    fn residue_degree_examples() {
        assert_eq!(residue_degree(5, 11).unwrap(), 1);
        assert_eq!(residue_degree(5, 7).unwrap(), 2);
        assert!(residue_degree(8, 2).is_err());
        assert!(matches!(
            residue_degree(5, 5),
            Err(Error::Ramified { d: 5, p: 5 })
        ));
    }

    #[test]
    fn unit_pow_examples() {
        let f5 = field_invariants(5).unwrap();
        assert!(unit_pow(&f5, 0, 7).unwrap().is_one());
        let e2 = unit_pow(&f5, 2, 7).unwrap();
        assert_eq!((e2.u.value(), e2.v.value()), (3, 1));
        let f8 = field_invariants(8).unwrap();
        let w = unit_pow(&f8, 168, 13).unwrap();
        assert_eq!((w.u.value(), w.v.value()), (2, 0));
    }

    #[test]
    fn fermat_quotient_examples() {
        let q = fermat_quotient(&field_invariants(8).unwrap(), 13).unwrap();
        assert!(q.scalar.is_zero() && q.class.v.is_zero());
        let q = fermat_quotient(&field_invariants(5).unwrap(), 7).unwrap();
        assert!(!(q.class.u.is_zero() && q.class.v.is_zero()));
        let q = fermat_quotient(&field_invariants(29).unwrap(), 3).unwrap();
        assert!(q.class.u.is_zero() && q.class.v.is_zero());
    }

    #[test]
    fn wieferich_examples() {
        assert!(
            is_wieferich_base_unit(&field_invariants(8).unwrap(), 13)
                .unwrap()
                .is_wieferich
        );
        assert!(
            is_wieferich_base_unit(&field_invariants(12).unwrap(), 103)
                .unwrap()
                .is_wieferich
        );
        assert!(
            !is_wieferich_base_unit(&field_invariants(5).unwrap(), 13)
                .unwrap()
                .is_wieferich
        );
        // 5 divides the v-coordinate of ε_73 but not 73
        let r = is_wieferich_base_unit(&field_invariants(73).unwrap(), 5).unwrap();
        assert!(r.is_wieferich && r.r == 2);
    }

    #[test]
    fn unit_group_identities_and_fibonacci_equivalence() {
        let primes: Vec<u64> = primes_in_range(3, 1000).collect();
        for d in (2..=100).filter(|&d| is_fundamental_discriminant(d)) {
            let field = field_invariants(d).unwrap();
            for &p in &primes {
                if d % p as i64 == 0 {
                    continue;
                }
                let m = p * p;
                let (u, v) = field.unit_mod(m);
                let eps = RingElem::new(u, v, d, m);
                assert_eq!(eps.norm(), Residue::from_i64(field.norm_b as i64, m));
                assert_eq!(
                    eps * eps.conj(),
                    RingElem::new(reduce_i64(2 * field.norm_b as i64, m), 0, d, m)
                );
                let r = residue_degree(d, p).unwrap() as u32;
                let w = eps.pow((p as u128).pow(r) - 1);
                assert!(
                    w.u.value() % p == 2 % p && w.v.value().is_multiple_of(p),
                    "d={d} p={p}"
                );
                if r == 2 {
                    let t = eps.pow(2 * (p as u128 + 1));
                    assert!(
                        t.u.value() % p == 2 && t.v.value().is_multiple_of(p),
                        "inert d={d} p={p}"
                    );
                }
                if p >= 5 && !field.divides_unit_discriminant(p) && !field.h.is_multiple_of(p) {
                    assert_eq!(
                        is_wieferich_base_unit(&field, p).unwrap().is_wieferich,
                        is_fibonacci_wieferich(&field, p).unwrap(),
                        "d={d} p={p}"
                    );
                }
            }
        }
    }

    fn elem(d: i64, m: u64) -> impl Strategy<Value = RingElem> {
        (0..m, 0..m).prop_map(move |(u, v)| RingElem::new(u, v, d, m))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn ring_axioms_mod_169(x in elem(8, 169), y in elem(8, 169), z in elem(8, 169)) {
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * y, y * x);
            let sum = RingElem { u: y.u + z.u, v: y.v + z.v, ..y };
            let lhs = x * sum;
            let (a, b) = (x * y, x * z);
            prop_assert_eq!(lhs, RingElem { u: a.u + b.u, v: a.v + b.v, ..a });
            prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
            prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
        }

        #[test]
        fn ring_axioms_mod_large(x in elem(73, 1_000_003 * 1_000_003), y in elem(73, 1_000_003 * 1_000_003), z in elem(73, 1_000_003 * 1_000_003)) {
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
        }
    }
}
