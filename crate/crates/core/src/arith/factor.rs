use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::residue::{mul_mod, pow_mod, Residue};
use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;
const RHO_SEED: u64 = 0x5eed_f1b0;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        super::sieve::simple_sieve(TRIAL_LIMIT)
            .into_iter()
            .map(|p| p as u32)
            .collect()
    })
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d as u128, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs, primes ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// The factored integer.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    /// Product of two factorizations.
    pub fn merge(&self, other: &Factorization) -> Factorization {
        let mut all: Vec<(u64, u32)> = self.factors.iter().chain(&other.factors).copied().collect();
        all.sort_unstable();
        let mut factors: Vec<(u64, u32)> = Vec::with_capacity(all.len());
        for (p, e) in all {
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Factorization { factors }
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| {
                if e == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{e}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// Trial division by the primes below 10^6, then Pollard-Brent rho on what
/// remains. The rho walk uses a fixed seed, so results and timings repeat.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 1, "factorize needs n >= 1");
    let mut rest = n;
    let mut found: Vec<u64> = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            found.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        let mut rng = StdRng::seed_from_u64(RHO_SEED);
        split_into(rest, &mut found, &mut rng);
    }
    found.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization { factors }
}

fn split_into(n: u64, out: &mut Vec<u64>, rng: &mut StdRng) {
    if n == 1 {
        return;
    }
    // no factor below 10^6 survives trial division, so n < 10^12 is prime
    if n < TRIAL_LIMIT * TRIAL_LIMIT || is_prime(n) {
        out.push(n);
        return;
    }
    let f = loop {
        let c = rng.gen_range(1..n);
        let x0 = rng.gen_range(0..n);
        if let Some(f) = brent(n, x0, c) {
            break f;
        }
    };
    split_into(f, out, rng);
    split_into(n / f, out, rng);
}

/// One Pollard-Brent walk `x -> x^2 + c`; `None` if the walk collapses.
fn brent(n: u64, x0: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) as u128 + c as u128).rem_euclid(n as u128) as u64;
    let mut y = x0;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    const BLOCK: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BLOCK.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BLOCK;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Least `t > 0` with `a^t ≡ 1`, given a factored multiple of the order.
pub fn multiplicative_order(a: Residue, bound: &Factorization) -> Result<u64> {
    let m = a.modulus();
    let full = bound.value();
    if !a.pow(full).is_one() {
        return Err(Error::BoundViolation {
            base: a.value(),
            bound: full,
            modulus: m,
        });
    }
    let mut t = full;
    for &(q, e) in bound.factors() {
        for _ in 0..e {
            let cand = t / q as u128;
            if a.pow(cand).is_one() {
                t = cand;
            } else {
                break;
            }
        }
    }
    u64::try_from(t).map_err(|_| Error::Inconsistency(format!("order {t} exceeds 64 bits")))
}
