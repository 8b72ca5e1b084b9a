//! Multiplicative characters of `F_{p^d}^*` and of product rings
//! `R = F_{q_1} x ... x F_{q_m}` (coordinatewise multiplication).
//!
//! A character is the exponent tuple `(k_1, ..., k_m)` against the fixed
//! generators: `chi(a) = prod_i exp(2 pi i k_i log_i(a_i) / N_i)` with
//! `N_i = q_i - 1`, and `chi(a) = 0` as soon as one coordinate is zero.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElem};
use crate::numeric;
use crate::transform;

/// Default cap on the number of characters a transform may produce.
pub const DEFAULT_TRANSFORM_BUDGET: u64 = 1 << 24;

const TAU: f64 = std::f64::consts::TAU;

/// Serialized as `"k0;k1;..."`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CharIndex {
    pub components: Vec<u64>,
}

impl CharIndex {
    pub fn new(components: Vec<u64>) -> Self {
        Self { components }
    }

    pub fn single(k: u64) -> Self {
        Self::new(vec![k])
    }

    pub fn trivial(ring: &RingCtx) -> Self {
        Self::new(vec![0; ring.components.len()])
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(|&k| k == 0)
    }

    /// `lcm_i N_i / gcd(N_i, k_i)`.
    pub fn order(&self, ring: &RingCtx) -> u64 {
        self.components
            .iter()
            .zip(&ring.unit_orders)
            .map(|(&k, &n)| n / arith::gcd(n, k))
            .fold(1, arith::lcm)
    }

    fn check(&self, ring: &RingCtx) -> Result<()> {
        if self.components.len() != ring.components.len() {
            return Err(Error::Shape(format!(
                "character has {} components, ring has {}",
                self.components.len(),
                ring.components.len()
            )));
        }
        for (&k, &n) in self.components.iter().zip(&ring.unit_orders) {
            if k >= n.max(1) {
                return Err(Error::Domain(format!("character exponent {k} not below {n}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CharIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for CharIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let components = s
            .split(';')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("character index {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }
}

impl TryFrom<String> for CharIndex {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<CharIndex> for String {
    fn from(c: CharIndex) -> String {
        c.to_string()
    }
}

/// A product-ring element as per-component field encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElem(pub Vec<u64>);

/// Product of field contexts. Character operations additionally need a
/// dlog table on every component.
#[derive(Debug, Clone)]
pub struct RingCtx {
    components: Vec<FieldCtx>,
    unit_orders: Vec<u64>,
    sizes: Vec<u64>,
}

impl RingCtx {
    pub fn new(components: Vec<FieldCtx>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape("a ring needs at least one component".into()));
        }
        let sizes: Vec<u64> = components.iter().map(|c| c.size()).collect();
        sizes
            .iter()
            .try_fold(1u64, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::Domain("ring too large to encode in 64 bits".into()))?;
        Ok(Self {
            unit_orders: components.iter().map(|c| c.unit_order()).collect(),
            sizes,
            components,
        })
    }

    pub fn single(ctx: FieldCtx) -> Result<Self> {
        Self::new(vec![ctx])
    }

    pub fn components(&self) -> &[FieldCtx] {
        &self.components
    }

    pub fn unit_orders(&self) -> &[u64] {
        &self.unit_orders
    }

    /// `|R^*| = prod N_i`.
    pub fn unit_group_size(&self) -> u64 {
        self.unit_orders.iter().product()
    }

    /// Errors unless every component carries a dlog table.
    pub fn require_dlog(&self) -> Result<()> {
        for c in &self.components {
            c.require_dlog()?;
        }
        Ok(())
    }

    pub fn same_ring(&self, other: &RingCtx) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.same_field(b))
    }

    pub fn check(&self, a: &RingElem) -> Result<()> {
        if a.0.len() != self.components.len() {
            return Err(Error::Context(format!(
                "ring element has {} coordinates, ring has {}",
                a.0.len(),
                self.components.len()
            )));
        }
        if a.0.iter().zip(&self.sizes).any(|(&x, &q)| x >= q) {
            return Err(Error::Context("ring coordinate out of range".into()));
        }
        Ok(())
    }

    pub fn from_field(&self, a: &FieldElem) -> Result<RingElem> {
        if self.components.len() != 1 {
            return Err(Error::Shape("ring has more than one component".into()));
        }
        Ok(RingElem(vec![self.components[0].encode(a)?]))
    }

    /// Mixed-radix key, first coordinate most significant; canonical order.
    pub fn pack(&self, a: &RingElem) -> u64 {
        a.0.iter().zip(&self.sizes).fold(0, |acc, (&x, &q)| acc * q + x)
    }

    pub fn unpack(&self, mut key: u64) -> RingElem {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &q) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = key % q;
            key /= q;
        }
        RingElem(out)
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        a.0.iter().all(|&x| x != 0)
    }

    /// Coordinatewise product by polynomial arithmetic (no dlog tables).
    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(
            self.components
                .iter()
                .zip(a.0.iter().zip(&b.0))
                .map(|(c, (&x, &y))| c.mul_enc(x, y))
                .collect(),
        )
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(
            self.components
                .iter()
                .zip(a.0.iter().zip(&b.0))
                .map(|(c, (&x, &y))| c.add_enc(x, y))
                .collect(),
        )
    }

    pub fn one(&self) -> RingElem {
        RingElem(vec![1; self.components.len()])
    }

    /// Per-coordinate discrete logs; `None` if any coordinate is zero.
    pub fn dlog_tuple(&self, a: &RingElem) -> Option<Vec<u64>> {
        self.components
            .iter()
            .zip(&a.0)
            .map(|(c, &x)| c.dlog_table().and_then(|t| t.log(x)))
            .collect()
    }

    fn flat_index(&self, logs: &[u64]) -> usize {
        logs.iter()
            .zip(&self.unit_orders)
            .fold(0usize, |acc, (&j, &n)| acc * n as usize + j as usize)
    }
}

/// Character value, with `chi(a) = 0` when any coordinate of `a` is zero.
pub fn char_eval(chi: &CharIndex, a: &RingElem, ring: &RingCtx) -> Result<Complex64> {
    chi.check(ring)?;
    ring.check(a)?;
    ring.require_dlog()?;
    let Some(logs) = ring.dlog_tuple(a) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let mut frac = 0.0;
    for ((&k, &j), &n) in chi.components.iter().zip(&logs).zip(&ring.unit_orders) {
        let r = (k as u128 * j as u128 % n as u128) as f64;
        frac += r / n as f64;
    }
    Ok(Complex64::cis(TAU * frac.fract()))
}

/// Whether `chi` is identically 1 on `F_p^*`. The base unit group is
/// generated by `g^{(p^d-1)/(p-1)}`, so this holds iff `(p - 1) | k`.
pub fn is_restriction_trivial(chi: &CharIndex, ctx: &FieldCtx) -> Result<bool> {
    if chi.components.len() != 1 {
        return Err(Error::Shape("restriction test needs a single-field character".into()));
    }
    Ok(chi.components[0].is_multiple_of((ctx.p() - 1).max(1)))
}

/// Character sums `S_A(chi) = sum_{a in A} chi(a)` for every character,
/// stored row-major over `Z_{N_1} x ... x Z_{N_m}`.
#[derive(Debug, Clone)]
pub struct CharSums {
    dims: Vec<u64>,
    values: Vec<Complex64>,
}

impl CharSums {
    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, chi: &CharIndex) -> Complex64 {
        let flat = chi
            .components
            .iter()
            .zip(&self.dims)
            .fold(0usize, |acc, (&k, &n)| acc * n as usize + k as usize);
        self.values[flat]
    }

    pub fn index_of(&self, mut flat: usize) -> CharIndex {
        let mut comps = vec![0; self.dims.len()];
        for (slot, &n) in comps.iter_mut().zip(&self.dims).rev() {
            *slot = (flat % n as usize) as u64;
            flat /= n as usize;
        }
        CharIndex::new(comps)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CharIndex, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.index_of(i), v))
    }

    /// CSV with columns `chi,real,imag,magnitude`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["chi", "real", "imag", "magnitude"])?;
        for (chi, v) in self.iter() {
            w.write_record([
                chi.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                v.norm().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn dlog_histogram(set: &[RingElem], ring: &RingCtx, budget: u64) -> Result<Vec<f64>> {
    ring.require_dlog()?;
    let total = ring.unit_group_size();
    if total > budget {
        return Err(Error::capacity("character transform", total as u128, budget));
    }
    let mut counts = vec![0.0f64; total as usize];
    for a in set {
        ring.check(a)?;
        if let Some(logs) = ring.dlog_tuple(a) {
            counts[ring.flat_index(&logs)] += 1.0;
        }
    }
    Ok(counts)
}

/// All character sums at once through a multidimensional cyclic transform
/// of the dlog-indicator array. Zero-coordinate elements contribute nothing.
pub fn all_char_sums(set: &[RingElem], ring: &RingCtx, budget: u64) -> Result<CharSums> {
    let counts = dlog_histogram(set, ring, budget)?;
    let mut values: Vec<Complex64> = counts.into_iter().map(|c| Complex64::new(c, 0.0)).collect();
    let dims: Vec<usize> = ring.unit_orders.iter().map(|&n| n as usize).collect();
    transform::transform_nd(&mut values, &dims);
    Ok(CharSums {
        dims: ring.unit_orders.clone(),
        values,
    })
}

/// The same table by direct `O(N |A|)` evaluation. Compensated above
/// [`numeric::COMPENSATE_ABOVE`] terms.
pub fn char_sums_direct(set: &[RingElem], ring: &RingCtx, budget: u64) -> Result<CharSums> {
    ring.require_dlog()?;
    let total = ring.unit_group_size();
    if (total as u128) * (set.len() as u128) > budget as u128 * 64 {
        return Err(Error::capacity(
            "direct character sums",
            total as u128 * set.len() as u128,
            budget * 64,
        ));
    }
    let logs: Vec<Vec<u64>> = set
        .iter()
        .map(|a| ring.check(a).map(|_| ring.dlog_tuple(a)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out = CharSums {
        dims: ring.unit_orders.clone(),
        values: vec![Complex64::new(0.0, 0.0); total as usize],
    };
    for flat in 0..total as usize {
        let chi = out.index_of(flat);
        let terms = logs.iter().map(|js| {
            let frac: f64 = chi
                .components
                .iter()
                .zip(js)
                .zip(&ring.unit_orders)
                .map(|((&k, &j), &n)| (k as u128 * j as u128 % n as u128) as f64 / n as f64)
                .sum();
            Complex64::cis(TAU * frac.fract())
        });
        out.values[flat] = numeric::sum_complex(terms, logs.len());
    }
    Ok(out)
}

/// Fast single-field character evaluator for hot loops over encodings.
///
/// `chi(g^j)` depends only on `t = (k j mod N) / gcd(N, k)`, an index in
/// `[0, ord)`; values are tabulated when `ord` is moderate.
#[derive(Debug, Clone)]
pub struct FieldCharacter {
    ctx: FieldCtx,
    k: u64,
    n: u64,
    step: u64,
    ord: u64,
    table: Option<Vec<Complex64>>,
}

const TABLE_LIMIT: u64 = 1 << 20;

impl FieldCharacter {
    pub fn new(ctx: &FieldCtx, chi: &CharIndex) -> Result<Self> {
        if chi.components.len() != 1 {
            return Err(Error::Shape("expected a single-field character".into()));
        }
        ctx.require_dlog()?;
        let n = ctx.unit_order();
        let k = chi.components[0];
        if k >= n.max(1) {
            return Err(Error::Domain(format!("character exponent {k} not below {n}")));
        }
        let step = arith::gcd(n, k).max(1);
        let ord = if k == 0 { 1 } else { n / step };
        let table =
            (ord <= TABLE_LIMIT).then(|| (0..ord).map(|t| Complex64::cis(TAU * t as f64 / ord as f64)).collect());
        Ok(Self {
            ctx: ctx.clone(),
            k,
            n,
            step,
            ord,
            table,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.ord
    }

    /// Phase index `t` in `[0, ord)`, or `None` at zero.
    #[inline]
    pub fn phase(&self, enc: u64) -> Option<u64> {
        let j = self.ctx.dlog_table()?.log(enc)?;
        if self.k == 0 {
            return Some(0);
        }
        Some((self.k as u128 * j as u128 % self.n as u128) as u64 / self.step)
    }

    #[inline]
    pub fn value_of_phase(&self, t: u64) -> Complex64 {
        match &self.table {
            Some(tab) => tab[t as usize],
            None => Complex64::cis(TAU * t as f64 / self.ord as f64),
        }
    }

    #[inline]
    pub fn eval_enc(&self, enc: u64) -> Complex64 {
        match self.phase(enc) {
            Some(t) => self.value_of_phase(t),
            None => Complex64::new(0.0, 0.0),
        }
    }
}
