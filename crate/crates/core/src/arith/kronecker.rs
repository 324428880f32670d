use crate::error::{Error, Result};

/// Jacobi symbol `(a/n)` for odd `n`.
pub fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1, "jacobi needs an odd modulus");
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(a/n)`.
///
/// Extends the Jacobi symbol to even and negative `n`:
/// `(a/2)` is 0 for even `a`, `+1` for `a ≡ ±1 (mod 8)` and `-1` for
/// `a ≡ ±3 (mod 8)`; `(a/-1)` is the sign of `a`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "kronecker symbol is undefined for n = 0".into(),
        ));
    }
    let mut sign = 1i8;
    if n < 0 && a < 0 {
        sign = -1;
    }
    let mut m = n.unsigned_abs();
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        m >>= tz;
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    let a_red = (a as i128).rem_euclid(m as i128) as u64;
    Ok(sign * jacobi(a_red, m))
}
