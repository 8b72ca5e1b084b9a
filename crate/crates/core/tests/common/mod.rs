//! Naive reference arithmetic shared by the integration tests.
//!
//! Elements are coefficient vectors reduced by schoolbook division; logs
//! come from walking the powers of a generator. Only the modulus and the
//! generator are taken from the library under test.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

pub struct Oracle {
    pub p: u64,
    pub d: usize,
    /// Monic modulus, constant first, length `d + 1`.
    pub modulus: Vec<u64>,
    pub q: u64,
    log: HashMap<u64, u64>,
}

impl Oracle {
    pub fn new(p: u64, modulus: &[u64], generator: u64) -> Self {
        let d = modulus.len() - 1;
        let q = p.pow(d as u32);
        let mut o = Oracle {
            p,
            d,
            modulus: modulus.to_vec(),
            q,
            log: HashMap::new(),
        };
        let mut x = 1u64;
        for j in 0..q - 1 {
            assert!(o.log.insert(x, j).is_none(), "generator has order {j}");
            x = o.mul(x, generator);
        }
        assert_eq!(x, 1);
        o
    }

    pub fn of(ctx: &charsum::FieldCtx) -> Self {
        Self::new(ctx.p(), ctx.min_poly(), ctx.generator_enc())
    }

    pub fn coeffs(&self, mut a: u64) -> Vec<u64> {
        (0..self.d)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    pub fn enc(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &x| acc * self.p + x % self.p)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.enc(&s)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let (p, d) = (self.p, self.d);
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * d];
        for i in 0..d {
            for j in 0..d {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
            }
        }
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let sub = c * self.modulus[i] % p;
                prod[k - d + i] = (prod[k - d + i] + p - sub) % p;
            }
        }
        self.enc(&prod[..d])
    }

    /// Integer `x` embedded as a constant.
    pub fn int(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    pub fn inv(&self, a: u64) -> u64 {
        let l = self.log[&a];
        let n = self.q - 1;
        self.exp((n - l) % n)
    }

    pub fn exp(&self, j: u64) -> u64 {
        *self.log.iter().find(|(_, &v)| v == j).unwrap().0
    }

    pub fn log(&self, a: u64) -> Option<u64> {
        self.log.get(&a).copied()
    }

    /// `chi_k(a) = e(k log a / (q - 1))`, zero at zero.
    pub fn chi(&self, k: u64, a: u64) -> Complex64 {
        match self.log(a) {
            None => Complex64::new(0.0, 0.0),
            Some(l) => {
                let n = self.q - 1;
                let t = (k % n) * l % n;
                Complex64::from_polar(1.0, TAU * t as f64 / n as f64)
            }
        }
    }

    /// `sum_i x_i omega^i` over the integer box.
    pub fn box_points(&self, omega: u64, sides: &[(i64, u64)]) -> Vec<u64> {
        let mut out = vec![0u64];
        let mut power = 1u64;
        for &(start, len) in sides {
            let mut next = Vec::new();
            for &acc in &out {
                for x in start..start + len as i64 {
                    next.push(self.add(acc, self.mul(self.int(x), power)));
                }
            }
            out = next;
            power = self.mul(power, omega);
        }
        out
    }
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Discriminant of `t^3 + a t^2 + b t + c` mod `p`.
pub fn cubic_disc(a: u64, b: u64, c: u64, p: u64) -> u64 {
    let (a, b, c, p) = (a as i128, b as i128, c as i128, p as i128);
    let v = a * a * b * b - 4 * b * b * b - 4 * a * a * a * c - 27 * c * c + 18 * a * b * c;
    v.rem_euclid(p) as u64
}

/// Number of distinct roots of `t^3 + a t^2 + b t + c` in `F_p`.
pub fn cubic_roots(a: u64, b: u64, c: u64, p: u64) -> usize {
    (0..p)
        .filter(|&t| (t * t % p * t + a * t % p * t + b * t + c).is_multiple_of(p))
        .count()
}

/// Small deterministic generator for test inputs (xorshift64*).
pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}
