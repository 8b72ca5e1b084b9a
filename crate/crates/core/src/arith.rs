//! Integer helpers shared by every module: modular arithmetic on `u64`,
//! trial-division primality and factorization, and the `floor(p^rho)` rule
//! used to size intervals.

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere. Products of two reduced residues then
/// stay below 2^62.
pub const MAX_MODULUS: u64 = 1 << 31;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    match a.checked_mul(b) {
        Some(x) => x % p,
        None => ((a as u128 * b as u128) % p as u128) as u64,
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime via Fermat.
pub fn inv_mod(a: u64, p: u64) -> Result<u64> {
    let a = a % p;
    if a == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(pow_mod(a, p - 2, p))
}

/// Reduce a signed integer into `[0, p)`.
#[inline]
pub fn reduce_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Rejects anything that is not a prime below [`MAX_MODULUS`].
pub fn check_prime(p: u64) -> Result<()> {
    if p >= MAX_MODULUS {
        return Err(Error::Domain(format!("modulus {p} exceeds the 2^31 limit")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) {
            let mut e = 0;
            while n.is_multiple_of(f) {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// `p^d` with overflow detection.
pub fn checked_pow(p: u64, d: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..d {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// `floor(base^rho)` for `base >= 2`, `rho >= 0`, corrected so that the
/// result `n` satisfies `n <= base^rho < n + 1` up to a relative slack of
/// 1e-12 in the exponent. Plain `powf` can land one below an exact power.
pub fn floor_pow(base: u64, rho: f64) -> u64 {
    let target = rho * (base as f64).ln();
    let mut n = (base as f64).powf(rho).floor().max(0.0) as u64;
    while n > 0 && (n as f64).ln() > target + 1e-12 {
        n -= 1;
    }
    while ((n + 1) as f64).ln() <= target + 1e-12 {
        n += 1;
    }
    n
}

/// Number of divisors by trial division.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}
