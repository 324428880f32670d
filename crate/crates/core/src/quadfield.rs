//! Invariants of a real quadratic field `Q(√d)`.
//!
//! Elements of the maximal order are stored in half-coordinates
//! `(u + v√d)/2` with `u ≡ v·d (mod 2)`, for odd `d` and `d ≡ 0 (mod 4)`
//! alike. The fundamental unit comes from the continued-fraction expansion
//! of the standard generator `ω` of `O_d`; the narrow class number is the
//! number of cycles of reduced indefinite forms of discriminant `d`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::big_mod;
use crate::error::{Error, Result};

fn is_squarefree(mut n: i64) -> bool {
    let mut q = 2i64;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return false;
            }
        }
        q += 1;
    }
    true
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m % 4, 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

fn serialize_big<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `(u + v√d)/2` in the maximal order of `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticInteger {
    #[serde(serialize_with = "serialize_big")]
    pub u: BigInt,
    #[serde(serialize_with = "serialize_big")]
    pub v: BigInt,
    pub d: i64,
}

impl QuadraticInteger {
    pub fn new(u: BigInt, v: BigInt, d: i64) -> Result<Self> {
        if (&u - &v * d).is_odd() {
            return Err(Error::InvalidArgument(format!(
                "({u} + {v}√{d})/2 is not an algebraic integer"
            )));
        }
        Ok(QuadraticInteger { u, v, d })
    }

    pub fn one(d: i64) -> Self {
        QuadraticInteger {
            u: BigInt::from(2),
            v: BigInt::zero(),
            d,
        }
    }

    pub fn norm(&self) -> BigInt {
        (&self.u * &self.u - &self.v * &self.v * self.d) / 4
    }

    pub fn trace(&self) -> &BigInt {
        &self.u
    }

    pub fn conj(&self) -> Self {
        QuadraticInteger {
            u: self.u.clone(),
            v: -&self.v,
            d: self.d,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        QuadraticInteger {
            u: (&self.u * &other.u + &self.v * &other.v * self.d) / 2,
            v: (&self.u * &other.v + &other.u * &self.v) / 2,
            d: self.d,
        }
    }

    /// Natural log of the real embedding; fine for magnitudes far beyond f64.
    pub fn ln(&self) -> f64 {
        let sqrt_d = (self.d as f64).sqrt();
        let bits = self.u.bits().max(self.v.bits());
        if bits < 1000 {
            let val = (self.u.to_f64().unwrap() + self.v.to_f64().unwrap() * sqrt_d) / 2.0;
            val.ln()
        } else {
            let shift = bits - 60;
            let u = (&self.u >> shift).to_f64().unwrap();
            let v = (&self.v >> shift).to_f64().unwrap();
            ((u + v * sqrt_d) / 2.0).ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

impl fmt::Display for QuadraticInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.v.is_negative() { '-' } else { '+' };
        write!(f, "({} {} {}√{})/2", self.u, sign, self.v.abs(), self.d)
    }
}

/// Result of the continued-fraction expansion of `ω`.
struct UnitExpansion {
    unit: QuadraticInteger,
    period: usize,
}

/// Expands `ω = (d mod 2 + √d)/2` as a continued fraction. Complete
/// quotients are tracked as `(P + √d)/Q`; the period closes when `Q` returns
/// to 2, and the convergent `h/k` before that point gives `ε = h − k·ω̄`.
fn expand_unit(d: i64) -> UnitExpansion {
    let p0 = d.rem_euclid(2);
    let root = d.sqrt();
    let (mut p, mut q) = (p0, 2i64);
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut step = 0usize;
    loop {
        debug_assert!(q > 0);
        let a = (p + root) / q;
        let h_next = &h * a + &h_prev;
        let k_next = &k * a + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let p_next = a * q - p;
        let q_next = (d - p_next * p_next) / q;
        p = p_next;
        q = q_next;
        step += 1;
        if q == 2 {
            let u = &h * 2 - &k * p0;
            let unit = QuadraticInteger { u, v: k, d };
            return UnitExpansion { unit, period: step };
        }
    }
}

/// The fundamental unit `ε_d > 1` of `O_d`.
pub fn fundamental_unit(d: i64) -> Result<QuadraticInteger> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(expand_unit(d).unit)
}

/// Length of the continued-fraction period of `ω`; its parity is the sign of
/// `N(ε_d)` (odd period means norm −1).
pub fn cf_period(d: i64) -> Result<usize> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    Ok(expand_unit(d).period)
}

/// A binary quadratic form `A x² + B xy + C y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// `x > √disc` for non-square `disc`.
fn exceeds_root(x: i64, disc: i64) -> bool {
    x > 0 && (x as i128) * (x as i128) > disc as i128
}

/// `x < √disc` for non-square `disc`.
fn below_root(x: i64, disc: i64) -> bool {
    x < 0 || (x as i128) * (x as i128) < disc as i128
}

impl Form {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// `0 < B < √D` and `√D − B < 2|A| < √D + B`.
    pub fn is_reduced(&self) -> bool {
        let disc = self.discriminant();
        let two_a = 2 * self.a.abs();
        self.b > 0
            && below_root(self.b, disc)
            && exceeds_root(two_a + self.b, disc)
            && below_root(two_a - self.b, disc)
    }

    /// Reduction neighbor `(A, B, C) -> (C, B', (B'² − D)/4C)` with
    /// `B' ≡ −B (mod 2|C|)` and `√D − 2|C| < B' < √D`.
    pub fn rho(&self) -> Form {
        let disc = self.discriminant();
        let m = 2 * self.c.abs();
        let root = disc.sqrt();
        let b = root - (root + self.b).rem_euclid(m);
        Form {
            a: self.c,
            b,
            c: (b * b - disc) / (4 * self.c),
        }
    }
}

/// Every primitive reduced form of discriminant `disc`.
pub fn reduced_forms(disc: i64) -> Vec<Form> {
    let root = disc.sqrt();
    let mut forms = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= root {
        let ac = (b * b - disc) / 4; // negative
        let n = -ac;
        let mut a = 1i64;
        while a * a <= n {
            if n % a == 0 {
                for divisor in [a, n / a] {
                    for sign in [1i64, -1] {
                        let form = Form {
                            a: sign * divisor,
                            b,
                            c: ac / (sign * divisor),
                        };
                        if form.is_reduced() && form.a.gcd(&form.b).gcd(&form.c) == 1 {
                            forms.push(form);
                        }
                    }
                    if a * a == n {
                        break;
                    }
                }
            }
            a += 1;
        }
        b += 2;
    }
    forms.sort_unstable();
    forms.dedup();
    forms
}

/// Narrow class number `h⁺(d)`: the number of `rho`-cycles among the
/// primitive reduced forms of discriminant `d`.
pub fn class_number_narrow(d: i64) -> Result<u64> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let forms = reduced_forms(d);
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0u64;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            let next = forms[i].rho();
            i = *index.get(&next).ok_or_else(|| {
                Error::Inconsistency(format!("rho({:?}) = {next:?} is not reduced", forms[i]))
            })?;
        }
    }
    Ok(cycles)
}

/// Everything downstream needs to know about `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticField {
    pub d: i64,
    pub unit: QuadraticInteger,
    /// `ε + ε̄`
    #[serde(serialize_with = "serialize_big")]
    pub trace_a: BigInt,
    /// `N(ε)`
    pub norm_b: i8,
    /// `(ε − ε̄)² = d·v²`
    #[serde(serialize_with = "serialize_big")]
    pub disc_unit_sq: BigInt,
    pub h_narrow: u64,
    pub h: u64,
    pub cf_period: usize,
}

pub fn field_invariants(d: i64) -> Result<QuadraticField> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let UnitExpansion { unit, period } = expand_unit(d);
    let norm = unit.norm();
    let norm_b: i8 = if norm.is_one() {
        1
    } else if norm == -BigInt::one() {
        -1
    } else {
        return Err(Error::Inconsistency(format!(
            "unit {unit} of d = {d} has norm {norm}"
        )));
    };
    let h_narrow = class_number_narrow(d)?;
    let h = if norm_b == -1 { h_narrow } else { h_narrow / 2 };
    let disc_unit_sq = &unit.v * &unit.v * d;
    Ok(QuadraticField {
        d,
        trace_a: unit.u.clone(),
        norm_b,
        disc_unit_sq,
        h_narrow,
        h,
        cf_period: period,
        unit,
    })
}

impl QuadraticField {
    pub fn trace_mod(&self, m: u64) -> u64 {
        big_mod(&self.trace_a, m)
    }

    /// `(u mod m, v mod m)` for the half-coordinates of `ε`.
    pub fn unit_mod(&self, m: u64) -> (u64, u64) {
        (big_mod(&self.unit.u, m), big_mod(&self.unit.v, m))
    }

    /// Whether `p` divides `(ε − ε̄)² = d·v²`.
    pub fn divides_unit_discriminant(&self, p: u64) -> bool {
        self.d.rem_euclid(p as i64) == 0 || big_mod(&self.unit.v, p) == 0
    }
}
