//! Dense univariate polynomials over a finite field, coefficients stored low
//! degree first. Elements are the `u64` encodings used by [`FieldOps`]
//! implementors, so the same routines serve `F_p` and `F_{p^d}`.

use crate::arith;
use crate::error::{Error, Result};

/// Field arithmetic on `u64` element encodings. Base-field constants `c < p`
/// encode as themselves.
pub trait FieldOps {
    fn characteristic(&self) -> u64;
    /// Number of elements `q`.
    fn size(&self) -> u64;
    fn add(&self, a: u64, b: u64) -> u64;
    fn sub(&self, a: u64, b: u64) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> Result<u64>;

    fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse Frobenius: the unique `b` with `b^p = a`.
    fn pth_root(&self, a: u64) -> u64 {
        self.pow(a, self.size() / self.characteristic())
    }
}

/// The prime field `F_p` on plain residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        arith::check_prime(p)?;
        Ok(Self { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl FieldOps for PrimeField {
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn size(&self) -> u64 {
        self.p
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        arith::add_mod(a, b, self.p)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        arith::sub_mod(a, b, self.p)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        arith::mul_mod(a, b, self.p)
    }
    fn inv(&self, a: u64) -> Result<u64> {
        arith::inv_mod(a, self.p)
    }
    fn pth_root(&self, a: u64) -> u64 {
        a
    }
}

pub type Poly = Vec<u64>;

pub fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(f: &[u64]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

pub fn is_one(f: &[u64]) -> bool {
    degree(f) == Some(0) && f[0] == 1
}

pub fn add<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Poly {
    let n = f.len().max(g.len());
    let out = (0..n)
        .map(|i| k.add(f.get(i).copied().unwrap_or(0), g.get(i).copied().unwrap_or(0)))
        .collect();
    trim(out)
}

pub fn sub<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Poly {
    let n = f.len().max(g.len());
    let out = (0..n)
        .map(|i| k.sub(f.get(i).copied().unwrap_or(0), g.get(i).copied().unwrap_or(0)))
        .collect();
    trim(out)
}

pub fn mul<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = k.add(out[i + j], k.mul(a, b));
        }
    }
    trim(out)
}

pub fn scale<F: FieldOps>(k: &F, f: &[u64], c: u64) -> Poly {
    trim(f.iter().map(|&a| k.mul(a, c)).collect())
}

/// Quotient and remainder; errors on a zero divisor.
pub fn divrem<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Result<(Poly, Poly)> {
    let dg = degree(g).ok_or(Error::DivisionByZero)?;
    let lead_inv = k.inv(g[dg])?;
    let mut rem = trim(f.to_vec());
    let Some(df) = degree(&rem) else {
        return Ok((Vec::new(), Vec::new()));
    };
    if df < dg {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![0; df - dg + 1];
    for i in (dg..=df).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        let q = k.mul(c, lead_inv);
        quot[i - dg] = q;
        for (j, &b) in g[..=dg].iter().enumerate() {
            rem[i - dg + j] = k.sub(rem[i - dg + j], k.mul(q, b));
        }
    }
    Ok((trim(quot), trim(rem)))
}

pub fn rem<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Result<Poly> {
    Ok(divrem(k, f, g)?.1)
}

pub fn monic<F: FieldOps>(k: &F, f: &[u64]) -> Result<Poly> {
    let d = degree(f).ok_or(Error::DivisionByZero)?;
    let inv = k.inv(f[d])?;
    Ok(scale(k, f, inv))
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd<F: FieldOps>(k: &F, f: &[u64], g: &[u64]) -> Poly {
    let mut a = trim(f.to_vec());
    let mut b = trim(g.to_vec());
    while !b.is_empty() {
        let r = rem(k, &a, &b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        monic(k, &a).expect("nonzero")
    }
}

pub fn derivative<F: FieldOps>(k: &F, f: &[u64]) -> Poly {
    let p = k.characteristic();
    trim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| k.mul(c, (i as u64) % p))
            .collect(),
    )
}

pub fn eval<F: FieldOps>(k: &F, f: &[u64], x: u64) -> u64 {
    f.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c))
}

/// `base^exp mod modulus`.
pub fn powmod<F: FieldOps>(k: &F, base: &[u64], mut exp: u128, modulus: &[u64]) -> Result<Poly> {
    let mut acc = rem(k, &[1], modulus)?;
    let mut b = rem(k, base, modulus)?;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(k, &mul(k, &acc, &b), modulus)?;
        }
        b = rem(k, &mul(k, &b, &b), modulus)?;
        exp >>= 1;
    }
    Ok(acc)
}

/// Squarefree decomposition of a nonzero polynomial: pairwise coprime monic
/// squarefree factors `g_i` with multiplicities `e_i` such that
/// `monic(f) = prod g_i^{e_i}`. Handles characteristic `p` through p-th roots.
pub fn squarefree_decomposition<F: FieldOps>(k: &F, f: &[u64]) -> Result<Vec<(Poly, u64)>> {
    let f = monic(k, f)?;
    let mut out = Vec::new();
    sff_rec(k, &f, 1, &mut out)?;
    out.sort_by_key(|(_, e)| *e);
    Ok(out)
}

fn sff_rec<F: FieldOps>(k: &F, f: &[u64], mult: u64, out: &mut Vec<(Poly, u64)>) -> Result<()> {
    if degree(f).unwrap_or(0) == 0 {
        return Ok(());
    }
    let p = k.characteristic();
    let df = derivative(k, f);
    let mut c = gcd(k, f, &df);
    let mut w = if c.is_empty() {
        c = f.to_vec();
        vec![1]
    } else {
        divrem(k, f, &c)?.0
    };
    let mut i = 1;
    while !is_one(&w) {
        let y = gcd(k, &w, &c);
        let fac = divrem(k, &w, &y)?.0;
        if degree(&fac).unwrap_or(0) > 0 {
            out.push((fac, i * mult));
        }
        w = y.clone();
        c = divrem(k, &c, &y)?.0;
        i += 1;
    }
    if degree(&c).unwrap_or(0) > 0 {
        let d = degree(&c).unwrap();
        let root: Poly = (0..=d / p as usize).map(|j| k.pth_root(c[j * p as usize])).collect();
        sff_rec(k, &trim(root), mult * p, out)?;
    }
    Ok(())
}

/// Irreducibility over `F_p` for a monic polynomial: no factor of degree
/// `k <= d/2`, i.e. `gcd(f, x^{p^k} - x) = 1` for every such `k`.
pub fn is_irreducible(k: &PrimeField, f: &[u64]) -> Result<bool> {
    let Some(d) = degree(f) else {
        return Ok(false);
    };
    if d == 0 {
        return Ok(false);
    }
    let p = k.p() as u128;
    let x: Poly = vec![0, 1];
    let mut frob = x.clone();
    for _ in 1..=d / 2 {
        frob = powmod(k, &frob, p, f)?;
        let h = sub(k, &frob, &x);
        if !is_one(&gcd(k, f, &h)) {
            return Ok(false);
        }
    }
    Ok(true)
}
