/// Montgomery arithmetic for an odd modulus below 2^63.
///
/// Elements live in Montgomery form `x·2^64 mod m`; only `mul` and the
/// conversions differ from plain residue arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct Montgomery {
    m: u64,
    neg_inv: u64,
    r2: u64,
    one: u64,
}

impl Montgomery {
    pub fn new(m: u64) -> Option<Self> {
        if m.is_multiple_of(2) || !(3..1 << 63).contains(&m) {
            return None;
        }
        // Newton iteration for m^{-1} mod 2^64.
        let mut inv = m;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        debug_assert_eq!(m.wrapping_mul(inv), 1);
        let r = ((1u128 << 64) % m as u128) as u64;
        let r2 = ((r as u128 * r as u128) % m as u128) as u64;
        Some(Montgomery {
            m,
            neg_inv: inv.wrapping_neg(),
            r2,
            one: r,
        })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + q as u128 * self.m as u128) >> 64) as u64;
        if u >= self.m {
            u - self.m
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, x: u64) -> u64 {
        self.redc((x % self.m) as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn from_mont(&self, x: u64) -> u64 {
        self.redc(x as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.one
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b; // both < 2^63
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mul_mod;
    use proptest::prelude::*;

    #[test]
    fn rejects_even_and_huge() {
        assert!(Montgomery::new(10).is_none());
        assert!(Montgomery::new((1 << 63) + 1).is_none());
    }

    proptest! {
        #[test]
        fn mul_matches_u128(p in 3u64..(1 << 31), a in any::<u64>(), b in any::<u64>()) {
            let m = (p | 1) * (p | 1);
            let mg = Montgomery::new(m).unwrap();
            let r = mg.from_mont(mg.mul(mg.to_mont(a), mg.to_mont(b)));
            prop_assert_eq!(r, mul_mod(a % m, b % m, m));
            prop_assert_eq!(mg.from_mont(mg.one()), 1);
        }
    }
}
