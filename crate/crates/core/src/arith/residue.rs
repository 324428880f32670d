use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `a * b mod m` through a 128-bit intermediate.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u128, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Result<u64> {
    let a = a % m;
    let ext = (a as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return Err(Error::NotInvertible {
            value: a,
            modulus: m,
            gcd: ext.gcd as u64,
        });
    }
    Ok(ext.x.rem_euclid(m as i128) as u64)
}

/// Signed integer reduced into `[0, m)`.
#[inline]
pub fn reduce_i64(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// A residue class `value mod modulus`, always kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Panics if `modulus < 2`.
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(
            modulus >= 2,
            "residue modulus must be at least 2, got {modulus}"
        );
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        Residue::new(reduce_i64(value, modulus), modulus)
    }

    pub fn zero(modulus: u64) -> Self {
        Residue::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Residue::new(1, modulus)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn is_one(self) -> bool {
        self.value == 1
    }

    pub fn pow(self, exp: u128) -> Self {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Self> {
        Ok(Residue {
            value: inv_mod(self.value, self.modulus)?,
            modulus: self.modulus,
        })
    }

    /// Centered representative in `(-m/2, m/2]`.
    pub fn signed(self) -> i64 {
        if self.value > self.modulus / 2 {
            -((self.modulus - self.value) as i64)
        } else {
            self.value as i64
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: add_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: sub_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        debug_assert_eq!(self.modulus, rhs.modulus);
        Residue {
            value: mul_mod(self.value, rhs.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

/// `base^exp` in the residue ring.
pub fn mod_pow(base: Residue, exp: u128) -> Residue {
    base.pow(exp)
}

pub fn mod_inv(a: Residue) -> Result<Residue> {
    a.inv()
}

/// Inverses of every element of `values` modulo `m` with a single extended
/// gcd (prefix-product batching). Fails on the first non-invertible entry.
pub fn batch_inverse(values: &[u64], m: u64) -> Result<Vec<u64>> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1u64;
    for &x in values {
        prefix.push(acc);
        acc = mul_mod(acc, x % m, m);
    }
    let mut inv_acc = match inv_mod(acc, m) {
        Ok(v) => v,
        Err(_) => {
            // locate the culprit for a precise error
            for &x in values {
                inv_mod(x, m)?;
            }
            unreachable!("product not invertible but every factor is");
        }
    };
    let mut out = vec![0u64; values.len()];
    for i in (0..values.len()).rev() {
        out[i] = mul_mod(inv_acc, prefix[i], m);
        inv_acc = mul_mod(inv_acc, values[i] % m, m);
    }
    Ok(out)
}
