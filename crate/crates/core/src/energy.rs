//! Multiplicative energy of set tuples, representation counts and the
//! divisor bound.
//!
//! `E(A_1, ..., A_n)` counts `2n`-tuples of units with equal `n`-fold
//! products. Two independent routes are provided: a product-multiset count
//! using polynomial arithmetic only, and the character identity
//! `E = |R^*|^{-1} sum_chi prod_i |sum_{a in A_i} chi(a)|^2` evaluated with
//! the all-characters transform.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{all_char_sums, RingCtx, RingElem};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldSpec};
use crate::numeric::Neumaier;
use crate::sets::{self, TupleSet};

/// Default cap on product-pair work for brute-force counts.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Largest accepted distance from the nearest integer before rounding the
/// character-side energy.
pub const SPECTRAL_RESIDUAL_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMethod {
    Brute,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCount {
    pub value: u64,
    pub method: EnergyMethod,
    /// Sizes of the input sets, and how many of their elements are units.
    pub set_sizes: Vec<usize>,
    pub unit_sizes: Vec<usize>,
    /// Distance to the nearest integer before rounding (spectral only).
    #[serde(default)]
    pub residual: f64,
}

fn sizes(sets: &[Vec<RingElem>], ring: &RingCtx) -> (Vec<usize>, Vec<usize>) {
    (
        sets.iter().map(Vec::len).collect(),
        sets.iter()
            .map(|s| s.iter().filter(|a| ring.is_unit(a)).count())
            .collect(),
    )
}

/// Multiset of `n`-fold products of units, keyed by packed ring element.
pub fn product_histogram(sets: &[Vec<RingElem>], ring: &RingCtx, budget: u64) -> Result<HashMap<u64, u64>> {
    for s in sets {
        for a in s {
            ring.check(a)?;
        }
    }
    let units: Vec<Vec<&RingElem>> = sets
        .iter()
        .map(|s| s.iter().filter(|a| ring.is_unit(a)).collect())
        .collect();
    let mut hist: HashMap<u64, u64> = HashMap::new();
    if units.iter().any(Vec::is_empty) {
        return Ok(hist);
    }
    hist.insert(ring.pack(&ring.one()), 1);
    let mut work: u128 = 0;
    for factor in &units {
        work += hist.len() as u128 * factor.len() as u128;
        if work > budget as u128 {
            return Err(Error::capacity("product multiset", work, budget));
        }
        let entries: Vec<(u64, u64)> = hist.into_iter().collect();
        hist = entries
            .par_chunks(1024)
            .fold(HashMap::new, |mut acc: HashMap<u64, u64>, chunk| {
                for &(key, count) in chunk {
                    let eta = ring.unpack(key);
                    for a in factor {
                        *acc.entry(ring.pack(&ring.mul(&eta, a))).or_insert(0) += count;
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            });
    }
    Ok(hist)
}

/// `sum_eta m(eta)^2` over the product multiset.
pub fn energy_brute(sets: &[Vec<RingElem>], ring: &RingCtx, budget: u64) -> Result<EnergyCount> {
    let hist = product_histogram(sets, ring, budget)?;
    let value = hist
        .values()
        .try_fold(0u64, |acc, &m| acc.checked_add(m.checked_mul(m)?))
        .ok_or_else(|| Error::Numerical("energy overflows 64 bits".into()))?;
    let (set_sizes, unit_sizes) = sizes(sets, ring);
    Ok(EnergyCount {
        value,
        method: EnergyMethod::Brute,
        set_sizes,
        unit_sizes,
        residual: 0.0,
    })
}

/// Character-side energy, normalized by `|R^*|`.
pub fn energy_spectral(sets: &[Vec<RingElem>], ring: &RingCtx, transform_budget: u64) -> Result<EnergyCount> {
    ring.require_dlog()?;
    let (set_sizes, unit_sizes) = sizes(sets, ring);
    let mut product = vec![1.0f64; ring.unit_group_size() as usize];
    for s in sets {
        let sums = all_char_sums(s, ring, transform_budget)?;
        for (acc, v) in product.iter_mut().zip(sums.values()) {
            *acc *= v.norm_sqr();
        }
    }
    let mut total = Neumaier::default();
    for v in product {
        total.add(v);
    }
    let raw = total.value() / ring.unit_group_size() as f64;
    let rounded = raw.round();
    let residual = (raw - rounded).abs();
    if residual >= SPECTRAL_RESIDUAL_LIMIT || rounded < 0.0 {
        return Err(Error::Numerical(format!(
            "spectral energy {raw} is {residual:e} away from an integer"
        )));
    }
    Ok(EnergyCount {
        value: rounded as u64,
        method: EnergyMethod::Spectral,
        set_sizes,
        unit_sizes,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepCountResult {
    pub max_count: u64,
    /// Smallest element (canonical order) attaining `max_count`.
    pub argmax: Option<RingElem>,
    /// `(eta, count)` in canonical order.
    pub histogram: Vec<(RingElem, u64)>,
    pub unit_pairs: u64,
}

/// Largest multiplicity of a product `a b`, `a in A`, `b in B` (units only).
pub fn rep_count_max(a: &[RingElem], b: &[RingElem], ring: &RingCtx, budget: u64) -> Result<RepCountResult> {
    let hist = product_histogram(&[a.to_vec(), b.to_vec()], ring, budget)?;
    let mut entries: Vec<(u64, u64)> = hist.into_iter().collect();
    entries.sort_unstable();
    let mut best: Option<(u64, u64)> = None;
    for &(key, count) in &entries {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((key, count));
        }
    }
    Ok(RepCountResult {
        max_count: best.map_or(0, |(_, c)| c),
        argmax: best.map(|(k, _)| ring.unpack(k)),
        unit_pairs: entries.iter().map(|&(_, c)| c).sum(),
        histogram: entries.into_iter().map(|(k, c)| (ring.unpack(k), c)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorCheck {
    pub n: u64,
    pub divisors: u64,
    pub bound: f64,
    pub pass: bool,
}

/// `d(n) <= exp(log n / log log n)` for `n >= 3`.
pub fn divisor_bound_check(n: u64) -> Result<DivisorCheck> {
    if n < 3 {
        return Err(Error::Domain(format!("divisor bound needs n >= 3, got {n}")));
    }
    let ln = (n as f64).ln();
    let bound = (ln / ln.ln()).exp();
    let divisors = arith::divisor_count(n);
    Ok(DivisorCheck {
        n,
        divisors,
        bound,
        pass: divisors as f64 <= bound,
    })
}

fn base_units_in(ctx: &FieldCtx) -> Vec<RingElem> {
    (1..ctx.p()).map(|t| RingElem(vec![t])).collect()
}

/// `E(F_p^*, Q)` for an explicit `Q` (encodings in `ctx`).
pub fn energy_fp_set(ctx: &FieldCtx, q: &[u64], budget: u64) -> Result<EnergyCount> {
    let ring = RingCtx::single(ctx.clone())?;
    let q: Vec<RingElem> = q.iter().map(|&e| RingElem(vec![e])).collect();
    energy_brute(&[base_units_in(ctx), q], &ring, budget)
}

/// Exact `E(F_p, Q)` for the `sigma`-box `Q`, with the reporting value
/// `d p^{1 + sigma (d - 1)} log p`.
pub fn energy_fp_q(ctx: &FieldCtx, sigma: f64, budget: u64) -> Result<(EnergyCount, f64)> {
    let q = sets::box_elements(ctx, &sets::q_box(ctx, sigma)?)?;
    let count = energy_fp_set(ctx, &q, budget)?;
    let (p, d) = (ctx.p() as f64, ctx.d() as f64);
    let bound = d * p.powf(1.0 + sigma * (d - 1.0)) * p.ln();
    Ok((count, bound))
}

fn check_same(a: &TupleSet, b: &TupleSet) -> Result<()> {
    if a.params.p != b.params.p || a.params.roots != b.params.roots || a.params.case != b.params.case {
        return Err(Error::Context("tuple sets come from different rings".into()));
    }
    Ok(())
}

/// Exact `E(R, Delta)`, with the reporting value `p log p |I| |J|`.
pub fn energy_r_delta(r: &TupleSet, delta: &TupleSet, ring: &RingCtx, budget: u64) -> Result<(EnergyCount, f64)> {
    check_same(r, delta)?;
    let count = energy_brute(&[r.elements.clone(), delta.elements.clone()], ring, budget)?;
    let p = r.params.p as f64;
    let ij: f64 = r.params.intervals.iter().take(2).map(|i| i.length as f64).product();
    Ok((count, p * p.ln() * ij))
}

/// Representation maximum over `(T + zeta) x T`.
pub fn tmax_repcount(t: &TupleSet, zeta: &RingElem, ring: &RingCtx, budget: u64) -> Result<RepCountResult> {
    ring.check(zeta)?;
    let shifted: Vec<RingElem> = t.elements.iter().map(|z| ring.add(z, zeta)).collect();
    rep_count_max(&shifted, &t.elements, ring, budget)
}

/// JSON record `{sets, ring, value, method, bound, ratio}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub sets: Vec<String>,
    pub ring: Vec<FieldSpec>,
    pub value: u64,
    pub method: EnergyMethod,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

impl EnergyReport {
    pub fn new(labels: Vec<String>, ring: &RingCtx, count: &EnergyCount, bound: Option<f64>) -> Self {
        Self {
            sets: labels,
            ring: ring.components().iter().map(FieldCtx::spec).collect(),
            value: count.value,
            method: count.method,
            bound,
            ratio: bound.map(|b| count.value as f64 / b),
        }
    }
}
