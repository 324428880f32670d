//! Slow, independent reference computations. Nothing here calls into the
//! library except for type conversions.

#![allow(dead_code)]

/// Trial-division factorization.
pub fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        while n.is_multiple_of(q) {
            out.push(q);
            n /= q;
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n).len() == 1
}

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Legendre symbol by Euler's criterion.
fn legendre(a: i64, p: u64) -> i64 {
    let r = a.rem_euclid(p as i64) as u128;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p as u128 - 1) / 2, p as u128) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(a/n)` for `n ≥ 1`, multiplied out over the prime
/// factors of `n`.
pub fn kronecker(a: i64, n: u64) -> i64 {
    factor(n)
        .into_iter()
        .map(|q| {
            if q == 2 {
                match a.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre(a, q)
            }
        })
        .product()
}

pub fn is_squarefree(n: u64) -> bool {
    let f = factor(n);
    f.windows(2).all(|w| w[0] != w[1])
}

pub fn fundamental(d: i64) -> bool {
    if d < 2 {
        return false;
    }
    match d % 4 {
        1 => is_squarefree(d as u64),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m as u64)
        }
        _ => false,
    }
}

pub fn fundamental_up_to(d_max: i64) -> Vec<i64> {
    (2..=d_max).filter(|&d| fundamental(d)).collect()
}

fn isqrt(n: u128) -> u128 {
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Fundamental unit `(u + v√d)/2` with its norm, by searching the least
/// `v ≥ 1` with `d v² ± 4` a square.
pub fn pell_unit(d: i64) -> (u128, u128, i8) {
    let d = d as u128;
    for v in 1u128.. {
        let t = d * v * v;
        // u² − d v² = 4N; for equal v the norm −1 solution is smaller
        for norm in [-1i8, 1] {
            let sq = if norm > 0 { t + 4 } else { t - 4 };
            let u = isqrt(sq);
            if u * u == sq && u > 0 {
                return (u, v, norm);
            }
        }
    }
    unreachable!()
}

/// Class number from `h·ln ε = −½ Σ_{a<D} (D/a) ln sin(πa/D)`.
pub fn analytic_class_number(d: i64) -> u64 {
    let (u, v, _) = pell_unit(d);
    let eps = (u as f64 + v as f64 * (d as f64).sqrt()) / 2.0;
    let mut s = 0.0;
    for a in 1..d {
        let chi = kronecker(d, a as u64);
        if chi != 0 {
            s += chi as f64 * (std::f64::consts::PI * a as f64 / d as f64).sin().ln();
        }
    }
    let h = -0.5 * s / eps.ln();
    let r = h.round();
    assert!(
        (h - r).abs() < 1e-6,
        "d={d}: analytic value {h} is not an integer"
    );
    r as u64
}

/// `(F_n mod m, F_{n+1} mod m)` for `F_{n+2} = a F_{n+1} − b F_n`, by
/// stepping the recursion.
pub fn fib_naive(a: u64, b: i64, n: u64, m: u64) -> (u64, u64) {
    let m = m as u128;
    let a = a as u128 % m;
    let nb = (-(b as i128)).rem_euclid(m as i128) as u128;
    let (mut x, mut y) = (0u128, 1 % m);
    for _ in 0..n {
        let next = (a * y + nb * x) % m;
        x = y;
        y = next;
    }
    (x as u64, y as u64)
}

/// `(rank of apparition, period)` modulo `m` by stepping until `(0, 1)`.
pub fn period_naive(a: u64, b: i64, m: u64) -> (u64, u64) {
    let mm = m as u128;
    let a = a as u128 % mm;
    let nb = (-(b as i128)).rem_euclid(mm as i128) as u128;
    let (mut x, mut y) = (0u128, 1u128);
    let (mut z, mut t) = (0u64, 0u64);
    loop {
        let next = (a * y + nb * x) % mm;
        x = y;
        y = next;
        t += 1;
        if x == 0 && z == 0 {
            z = t;
        }
        if x == 0 && y == 1 {
            return (z, t);
        }
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a as u128, p as u128 - 2, p as u128) as u64
}

/// `β_p(i) = Σ_{j=1}^{{p'i}−1} (d/j)` with `p'` found by search.
pub fn beta(d: i64, p: u64, i: u64) -> i64 {
    let du = d as u64;
    let p_inv = (1..du)
        .find(|&x| (x * (p % du)) % du == 1)
        .expect("p invertible mod d");
    let r = (p_inv * (i % du)) % du;
    (1..r).map(|j| kronecker(d, j)).sum()
}
