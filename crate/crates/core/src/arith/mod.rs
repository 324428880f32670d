//! Integer kernel: residues, Kronecker symbols, factorization, order finding
//! and the segmented prime sieve.

mod factor;
mod kronecker;
mod montgomery;
mod residue;
mod sieve;

pub use factor::{factorize, is_prime, multiplicative_order, Factorization};
pub use kronecker::{jacobi, kronecker};
pub use montgomery::Montgomery;
pub use residue::{
    add_mod, batch_inverse, inv_mod, mod_inv, mod_pow, mul_mod, pow_mod, reduce_i64, sub_mod,
    Residue,
};
pub use sieve::{primes_in_range, simple_sieve, PrimeRange};

use num_bigint::BigInt;
use num_traits::Signed;

/// `x mod m` for an arbitrary-precision integer without allocating.
pub fn big_mod(x: &BigInt, m: u64) -> u64 {
    let mut acc: u128 = 0;
    for digit in x.magnitude().iter_u64_digits().rev() {
        acc = ((acc << 64) | digit as u128) % m as u128;
    }
    let r = acc as u64;
    if x.is_negative() && r != 0 {
        m - r
    } else {
        r
    }
}
