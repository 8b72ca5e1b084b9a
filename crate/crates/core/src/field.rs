//! Exact arithmetic in `F_p` and `F_{p^d} = F_p[x]/(m(x))`.
//!
//! Elements are coefficient vectors in the basis `1, w, ..., w^{d-1}` where
//! `w` is the class of `x`. Hot loops work on the integer encoding
//! `sum c_i p^i`, which is also the canonical total order used for every
//! deterministic tie-break (highest coefficient most significant).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::poly::{self, FieldOps, PrimeField};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 8;

/// Default cap on `p^d - 1` for discrete-log tables.
pub const DEFAULT_DLOG_BUDGET: u64 = 1 << 24;

/// An element of `F_{p^d}` as its `d` coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    pub coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn new(coeffs: Vec<u64>) -> Self {
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Replayable description of a field context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub d: usize,
    /// Monic minimal polynomial, `d + 1` coefficients, constant term first.
    pub min_poly: Vec<u64>,
    pub generator: Vec<u64>,
}

/// `log[a]` and `exp[j]` over encodings, relative to the context generator.
#[derive(Debug)]
pub struct DlogTable {
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl DlogTable {
    const ZERO: u32 = u32::MAX;

    #[inline]
    pub fn log(&self, enc: u64) -> Option<u64> {
        match self.log[enc as usize] {
            Self::ZERO => None,
            j => Some(j as u64),
        }
    }

    #[inline]
    pub fn exp(&self, j: u64) -> u64 {
        self.exp[(j % self.exp.len() as u64) as usize] as u64
    }

    pub fn len(&self) -> usize {
        self.exp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exp.is_empty()
    }
}

/// Immutable context for `F_{p^d}`.
#[derive(Clone)]
pub struct FieldCtx {
    p: u64,
    d: usize,
    size: u64,
    min_poly: Vec<u64>,
    generator: u64,
    dlog: Option<Arc<DlogTable>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("d", &self.d)
            .field("min_poly", &self.min_poly)
            .field("generator", &self.decode(self.generator))
            .field("dlog", &self.dlog.is_some())
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.min_poly == other.min_poly
    }
}

/// Smallest monic irreducible of degree `d` over `F_p`, scanning candidates in
/// encoding order starting at offset `seed`.
pub fn find_irreducible(p: u64, d: usize, seed: u64) -> Result<Vec<u64>> {
    let k = PrimeField::new(p)?;
    if d == 0 || d > MAX_DEGREE {
        return Err(Error::Domain(format!("degree {d} outside 1..={MAX_DEGREE}")));
    }
    let count = arith::checked_pow(p, d).ok_or_else(|| Error::Domain(format!("{p}^{d} overflows 64 bits")))?;
    for t in 0..count {
        let idx = (seed % count + t) % count;
        let mut f = digits(idx, p, d);
        f.push(1);
        if poly::is_irreducible(&k, &f)? {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn digits(mut x: u64, p: u64, d: usize) -> Vec<u64> {
    (0..d)
        .map(|_| {
            let c = x % p;
            x /= p;
            c
        })
        .collect()
}

impl FieldCtx {
    /// Context over the smallest irreducible found from `seed`, with the
    /// smallest generator. No dlog table yet.
    pub fn new(p: u64, d: usize, seed: u64) -> Result<Self> {
        let min_poly = find_irreducible(p, d, seed)?;
        Self::from_min_poly(p, &min_poly)
    }

    pub fn from_min_poly(p: u64, min_poly: &[u64]) -> Result<Self> {
        let k = PrimeField::new(p)?;
        let d = poly::degree(min_poly)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Domain("minimal polynomial must have degree >= 1".into()))?;
        if d > MAX_DEGREE {
            return Err(Error::Domain(format!("degree {d} exceeds {MAX_DEGREE}")));
        }
        if min_poly.len() != d + 1 || min_poly[d] != 1 || min_poly.iter().any(|&c| c >= p) {
            return Err(Error::Domain(
                "minimal polynomial must be monic with reduced coefficients".into(),
            ));
        }
        if !poly::is_irreducible(&k, min_poly)? {
            return Err(Error::Domain(format!("{min_poly:?} is reducible over F_{p}")));
        }
        let size = arith::checked_pow(p, d)
            .filter(|&s| s < (1u64 << 62))
            .ok_or_else(|| Error::Domain(format!("{p}^{d} is too large")))?;
        let mut ctx = Self {
            p,
            d,
            size,
            min_poly: min_poly.to_vec(),
            generator: 1,
            dlog: None,
        };
        ctx.generator = ctx.find_generator_enc();
        Ok(ctx)
    }

    /// Rebuilds a context from its JSON description, checking every invariant.
    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let mut ctx = Self::from_min_poly(spec.p, &spec.min_poly)?;
        if ctx.d != spec.d {
            return Err(Error::Shape(format!(
                "spec degree {} but minimal polynomial has degree {}",
                spec.d, ctx.d
            )));
        }
        let g = ctx.encode(&FieldElem::new(spec.generator.clone()))?;
        if !ctx.has_full_order(g) {
            return Err(Error::Domain("generator does not have order p^d - 1".into()));
        }
        ctx.generator = g;
        Ok(ctx)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            d: self.d,
            min_poly: self.min_poly.clone(),
            generator: self.decode(self.generator).coeffs,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `p^d`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// `p^d - 1`.
    pub fn unit_order(&self) -> u64 {
        self.size - 1
    }

    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }

    pub fn generator(&self) -> FieldElem {
        self.decode(self.generator)
    }

    pub fn generator_enc(&self) -> u64 {
        self.generator
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        self == other
    }

    // ---- encoding ----------------------------------------------------------

    pub fn check(&self, a: &FieldElem) -> Result<()> {
        if a.coeffs.len() != self.d {
            return Err(Error::Context(format!(
                "element {a} has {} coefficients, field degree is {}",
                a.coeffs.len(),
                self.d
            )));
        }
        if a.coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Context(format!(
                "element {a} has coefficients outside [0, {})",
                self.p
            )));
        }
        Ok(())
    }

    pub fn encode(&self, a: &FieldElem) -> Result<u64> {
        self.check(a)?;
        Ok(a.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c))
    }

    pub fn decode(&self, enc: u64) -> FieldElem {
        FieldElem::new(digits(enc, self.p, self.d))
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::new(vec![0; self.d])
    }

    pub fn one(&self) -> FieldElem {
        self.decode(1)
    }

    /// Base-field constant from any integer.
    pub fn from_int(&self, x: i64) -> FieldElem {
        self.decode(arith::reduce_i64(x, self.p))
    }

    /// Encoding of `w^i`, the i-th power of the basis root.
    pub fn basis_power_enc(&self, i: usize) -> u64 {
        let w = if self.d == 1 {
            arith::sub_mod(0, self.min_poly[0], self.p)
        } else {
            self.p
        };
        self.pow(w, i as u64)
    }

    /// The basis root `w` (class of `x`), which generates the field over `F_p`.
    pub fn omega(&self) -> FieldElem {
        self.decode(self.basis_power_enc(1))
    }

    #[inline]
    fn unpack(&self, mut enc: u64, out: &mut [u64; MAX_DEGREE]) {
        for slot in out.iter_mut().take(self.d) {
            *slot = enc % self.p;
            enc /= self.p;
        }
    }

    #[inline]
    fn pack(&self, c: &[u64]) -> u64 {
        c[..self.d].iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    // ---- arithmetic on encodings ------------------------------------------

    #[inline]
    pub fn add_enc(&self, a: u64, b: u64) -> u64 {
        if self.d == 1 {
            return arith::add_mod(a, b, self.p);
        }
        let (mut x, mut y) = ([0; MAX_DEGREE], [0; MAX_DEGREE]);
        self.unpack(a, &mut x);
        self.unpack(b, &mut y);
        for i in 0..self.d {
            x[i] = arith::add_mod(x[i], y[i], self.p);
        }
        self.pack(&x)
    }

    #[inline]
    pub fn neg_enc(&self, a: u64) -> u64 {
        let mut x = [0; MAX_DEGREE];
        self.unpack(a, &mut x);
        for c in x.iter_mut().take(self.d) {
            *c = arith::sub_mod(0, *c, self.p);
        }
        self.pack(&x)
    }

    #[inline]
    pub fn sub_enc(&self, a: u64, b: u64) -> u64 {
        self.add_enc(a, self.neg_enc(b))
    }

    /// Multiplies a field element by a base-field scalar.
    #[inline]
    pub fn scale_enc(&self, a: u64, s: u64) -> u64 {
        let mut x = [0; MAX_DEGREE];
        self.unpack(a, &mut x);
        for c in x.iter_mut().take(self.d) {
            *c = arith::mul_mod(*c, s, self.p);
        }
        self.pack(&x)
    }

    /// Schoolbook product reduced modulo the minimal polynomial.
    pub fn mul_enc(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        if self.d == 1 {
            return arith::mul_mod(a, b, p);
        }
        let (mut x, mut y) = ([0; MAX_DEGREE], [0; MAX_DEGREE]);
        self.unpack(a, &mut x);
        self.unpack(b, &mut y);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..self.d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.d {
                prod[i + j] = arith::add_mod(prod[i + j], arith::mul_mod(x[i], y[j], p), p);
            }
        }
        for i in (self.d..2 * self.d - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..self.d {
                let t = arith::mul_mod(c, self.min_poly[j], p);
                prod[i - self.d + j] = arith::sub_mod(prod[i - self.d + j], t, p);
            }
        }
        self.pack(&prod)
    }

    pub fn pow_enc(&self, base: u64, exp: u64) -> u64 {
        FieldOps::pow(self, base, exp)
    }

    /// Inverse via `a^{p^d - 2}`.
    pub fn inv_enc(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow_enc(a, self.size - 2))
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius_enc(&self, a: u64) -> u64 {
        self.pow_enc(a, self.p)
    }

    /// Norm to `F_p` as the product of the `d` Frobenius conjugates.
    pub fn norm_enc(&self, a: u64) -> u64 {
        let mut acc = 1;
        let mut conj = a;
        for _ in 0..self.d {
            acc = self.mul_enc(acc, conj);
            conj = self.frobenius_enc(conj);
        }
        debug_assert!(acc < self.p, "norm must land in the base field");
        acc
    }

    /// Degree of `F_p(a)` over `F_p`: least `k` with `a^{p^k} = a`.
    pub fn element_degree(&self, a: u64) -> usize {
        let mut conj = self.frobenius_enc(a);
        let mut k = 1;
        while conj != a {
            conj = self.frobenius_enc(conj);
            k += 1;
        }
        k
    }

    #[inline]
    pub fn is_base(&self, a: u64) -> bool {
        a < self.p
    }

    // ---- checked element API ----------------------------------------------

    pub fn ext_add(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.decode(self.add_enc(self.encode(a)?, self.encode(b)?)))
    }

    pub fn ext_sub(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.decode(self.sub_enc(self.encode(a)?, self.encode(b)?)))
    }

    pub fn ext_mul(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.decode(self.mul_enc(self.encode(a)?, self.encode(b)?)))
    }

    pub fn ext_pow(&self, a: &FieldElem, e: u64) -> Result<FieldElem> {
        Ok(self.decode(self.pow_enc(self.encode(a)?, e)))
    }

    pub fn ext_inv(&self, a: &FieldElem) -> Result<FieldElem> {
        Ok(self.decode(self.inv_enc(self.encode(a)?)?))
    }

    /// Norm `N(a) = prod_{i<d} a^{p^i}` as a base-field residue.
    pub fn norm_map(&self, a: &FieldElem) -> Result<u64> {
        Ok(self.norm_enc(self.encode(a)?))
    }

    // ---- generators and discrete logs -------------------------------------

    fn has_full_order(&self, a: u64) -> bool {
        let n = self.unit_order();
        if a == 0 {
            return false;
        }
        if self.pow_enc(a, n) != 1 {
            return false;
        }
        arith::factorize(n).iter().all(|&(q, _)| self.pow_enc(a, n / q) != 1)
    }

    fn find_generator_enc(&self) -> u64 {
        (1..self.size)
            .find(|&a| self.has_full_order(a))
            .expect("the unit group is cyclic")
    }

    /// Smallest element, in encoding order, of multiplicative order `p^d - 1`.
    pub fn find_generator(&self) -> FieldElem {
        self.decode(self.find_generator_enc())
    }

    pub fn order_of(&self, a: &FieldElem) -> Result<u64> {
        let a = self.encode(a)?;
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut ord = self.unit_order();
        for (q, e) in arith::factorize(ord) {
            for _ in 0..e {
                if self.pow_enc(a, ord / q) == 1 {
                    ord /= q;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    /// Enumerates powers of the generator into a log/exp table.
    pub fn build_dlog(&self, budget: u64) -> Result<DlogTable> {
        let n = self.unit_order();
        if n > budget || n >= u32::MAX as u64 {
            return Err(Error::capacity("discrete-log table", n as u128, budget));
        }
        let mut log = vec![DlogTable::ZERO; self.size as usize];
        let mut exp = vec![0u32; n as usize];
        let mut cur = 1u64;
        for j in 0..n {
            if log[cur as usize] != DlogTable::ZERO {
                return Err(Error::Domain("generator has short order".into()));
            }
            log[cur as usize] = j as u32;
            exp[j as usize] = cur as u32;
            cur = self.mul_enc(cur, self.generator);
        }
        debug_assert_eq!(cur, 1);
        Ok(DlogTable { log, exp })
    }

    /// Copy of this context carrying a dlog table.
    pub fn with_dlog(&self, budget: u64) -> Result<FieldCtx> {
        if self.dlog.is_some() {
            return Ok(self.clone());
        }
        let table = self.build_dlog(budget)?;
        Ok(FieldCtx {
            dlog: Some(Arc::new(table)),
            ..self.clone()
        })
    }

    pub fn dlog_table(&self) -> Option<&DlogTable> {
        self.dlog.as_deref()
    }

    pub fn require_dlog(&self) -> Result<&DlogTable> {
        self.dlog_table().ok_or_else(|| {
            Error::State(format!(
                "F_{}^{} has no discrete-log table; build one first",
                self.p, self.d
            ))
        })
    }

    pub fn dlog(&self, a: &FieldElem) -> Result<u64> {
        let enc = self.encode(a)?;
        self.require_dlog()?
            .log(enc)
            .ok_or(Error::Domain("discrete log of zero".into()))
    }

    /// Product through the dlog table; falls back to polynomial arithmetic
    /// when no table is present.
    #[inline]
    pub fn mul_fast(&self, a: u64, b: u64) -> u64 {
        match &self.dlog {
            Some(t) => match (t.log(a), t.log(b)) {
                (Some(x), Some(y)) => t.exp(x + y),
                _ => 0,
            },
            None => self.mul_enc(a, b),
        }
    }
}

impl FieldOps for FieldCtx {
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn size(&self) -> u64 {
        self.size
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        self.add_enc(a, b)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        self.sub_enc(a, b)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul_enc(a, b)
    }
    fn inv(&self, a: u64) -> Result<u64> {
        self.inv_enc(a)
    }
}
