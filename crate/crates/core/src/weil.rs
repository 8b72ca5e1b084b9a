//! Exhaustive checks of the Weil bound for multiplicative character sums of
//! polynomial values, its norm form over extensions, and the averaged
//! moment over the family `(t + a)(t^2 + b t + c)`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{CharIndex, FieldCharacter};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, DEFAULT_DLOG_BUDGET};
use crate::numeric::Neumaier;
use crate::poly::{self, FieldOps};
use crate::sets::IntervalSpec;

/// Absolute slack on every bound comparison.
pub const WEIL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilCheck {
    /// Size of the base field.
    pub q: u64,
    /// Extension degree summed over (1 for the plain field check).
    pub n: usize,
    pub chi: CharIndex,
    /// Order of `chi`.
    pub dd: u64,
    /// Coefficients of `f`, constant first.
    pub f: Vec<u64>,
    /// Distinct roots of `f` over the algebraic closure.
    pub m: u64,
    pub re: f64,
    pub im: f64,
    pub sum_mag: f64,
    pub bound: f64,
    /// `f` is not a `dd`-th power.
    pub admissible: bool,
    pub pass: bool,
}

/// `(m, admissible)` from the squarefree decomposition: `m` is the total
/// degree of the squarefree parts, and `f` is a `dd`-th power over the
/// closure iff every multiplicity is divisible by `dd`.
pub fn root_data<F: FieldOps>(k: &F, f: &[u64], dd: u64) -> Result<(u64, bool)> {
    let parts = poly::squarefree_decomposition(k, f)?;
    let m = parts.iter().map(|(g, _)| poly::degree(g).unwrap_or(0) as u64).sum();
    let admissible = parts.iter().any(|&(_, e)| e % dd != 0);
    Ok((m, admissible))
}

fn check_poly(ctx: &FieldCtx, f: &[u64]) -> Result<Vec<u64>> {
    for &c in f {
        if c >= ctx.size() {
            return Err(Error::Context(format!("coefficient {c} outside F_{}", ctx.size())));
        }
    }
    let f = poly::trim(f.to_vec());
    if poly::degree(&f).unwrap_or(0) < 1 {
        return Err(Error::Precondition("f must have degree at least 1".into()));
    }
    Ok(f)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    q: u64,
    n: usize,
    chi: &CharIndex,
    dd: u64,
    f: Vec<u64>,
    m: u64,
    admissible: bool,
    sum: Complex64,
) -> WeilCheck {
    let bound = m.saturating_sub(1) as f64 * (q as f64).powf(n as f64 / 2.0);
    let sum_mag = sum.norm();
    WeilCheck {
        q,
        n,
        chi: chi.clone(),
        dd,
        f,
        m,
        re: sum.re,
        im: sum.im,
        sum_mag,
        bound,
        admissible,
        pass: !admissible || sum_mag <= bound + WEIL_TOLERANCE,
    }
}

fn sum_phases(chi: &FieldCharacter, values: impl Iterator<Item = u64>) -> Complex64 {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for v in values {
        if let Some(t) = chi.phase(v) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable();
    keys.into_iter().map(|(t, c)| chi.value_of_phase(t) * c as f64).sum()
}

/// `|sum_{x in F_q} chi(f(x))|` against `(m - 1) q^{1/2}`.
pub fn weil_field_check(ctx: &FieldCtx, chi: &CharIndex, f: &[u64]) -> Result<WeilCheck> {
    let fc = FieldCharacter::new(ctx, chi)?;
    if chi.is_trivial() {
        return Err(Error::Precondition(
            "the Weil bound needs a nontrivial character".into(),
        ));
    }
    let f = check_poly(ctx, f)?;
    let dd = fc.order();
    let (m, admissible) = root_data(ctx, &f, dd)?;
    let sum = sum_phases(&fc, (0..ctx.size()).map(|x| poly::eval(ctx, &f, x)));
    Ok(finish(ctx.size(), 1, chi, dd, f, m, admissible, sum))
}

/// `|sum_{x in F_{q^n}} chi(N(f(x)))|` against `(m - 1) q^{n/2}`, for a
/// prime base field.
pub fn weil_norm_check(base: &FieldCtx, n: usize, chi: &CharIndex, f: &[u64]) -> Result<WeilCheck> {
    if base.d() != 1 {
        return Err(Error::Precondition("norm checks take a prime base field".into()));
    }
    let fc = FieldCharacter::new(base, chi)?;
    if chi.is_trivial() {
        return Err(Error::Precondition(
            "the Weil bound needs a nontrivial character".into(),
        ));
    }
    let f = check_poly(base, f)?;
    let dd = fc.order();
    let (m, admissible) = root_data(base, &f, dd)?;
    let ext = FieldCtx::new(base.p(), n, 0)?;
    let sum = sum_phases(&fc, (0..ext.size()).map(|x| ext.norm_enc(poly::eval(&ext, &f, x))));
    Ok(finish(base.size(), n, chi, dd, f, m, admissible, sum))
}

/// All monic polynomials of degree `deg` over `F_p`, coefficients constant
/// first, in lexicographic order of the lower coefficients (highest first).
pub fn monic_polys(p: u64, deg: usize) -> Vec<Vec<u64>> {
    let count = arith::checked_pow(p, deg).expect("small enumeration");
    (0..count)
        .map(|mut idx| {
            let mut f = vec![0; deg + 1];
            for c in f.iter_mut().take(deg) {
                *c = idx % p;
                idx /= p;
            }
            f[deg] = 1;
            f
        })
        .collect()
}

/// Primes up to `p_max`.
pub fn primes_up_to(p_max: u64) -> Vec<u64> {
    (2..=p_max).filter(|&p| arith::is_prime(p)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeilSuiteReport {
    /// One row per `(chi, f)` cell.
    pub cells: Vec<WeilCheck>,
    pub admissible: u64,
    pub violations: Vec<WeilCheck>,
}

impl WeilSuiteReport {
    fn from_cells(cells: Vec<WeilCheck>) -> Self {
        Self {
            admissible: cells.iter().filter(|c| c.admissible).count() as u64,
            violations: cells.iter().filter(|c| !c.pass).cloned().collect(),
            cells,
        }
    }
}

/// Every prime in `primes`, every nontrivial `chi` mod `p`, every monic
/// `f` with `1 <= deg f <= max_deg`.
pub fn weil_exhaust(primes: &[u64], max_deg: usize, budget: u64) -> Result<WeilSuiteReport> {
    for &p in primes {
        arith::check_prime(p)?;
    }
    let work: u128 = primes
        .iter()
        .map(|&p| {
            (1..=max_deg)
                .map(|d| (p as u128).pow(d as u32 + 1) * p as u128)
                .sum::<u128>()
        })
        .sum();
    if work > budget as u128 {
        return Err(Error::capacity("Weil suite", work, budget));
    }
    let mut cells = Vec::new();
    for &p in primes {
        let ctx = FieldCtx::new(p, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
        let chars: Vec<FieldCharacter> = (1..p - 1)
            .map(|k| FieldCharacter::new(&ctx, &CharIndex::single(k)))
            .collect::<Result<_>>()?;
        let polys: Vec<Vec<u64>> = (1..=max_deg).flat_map(|d| monic_polys(p, d)).collect();
        let per_f: Vec<Vec<WeilCheck>> = polys
            .par_iter()
            .map(|f| {
                let values: Vec<u64> = (0..p).map(|x| poly::eval(&ctx, f, x)).collect();
                let parts = poly::squarefree_decomposition(&ctx, f)?;
                let m: u64 = parts.iter().map(|(g, _)| poly::degree(g).unwrap_or(0) as u64).sum();
                Ok(chars
                    .iter()
                    .map(|fc| {
                        let dd = fc.order();
                        let admissible = parts.iter().any(|&(_, e)| e % dd != 0);
                        let sum = sum_phases(fc, values.iter().copied());
                        finish(
                            p,
                            1,
                            &CharIndex::single(fc.exponent()),
                            dd,
                            f.clone(),
                            m,
                            admissible,
                            sum,
                        )
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        // cells ordered by chi, then f
        for ci in 0..chars.len() {
            cells.extend(per_f.iter().map(|row| row[ci].clone()));
        }
    }
    Ok(WeilSuiteReport::from_cells(cells))
}

/// Norm-form suite over `F_{q^n}` for the given primes `q`.
pub fn weil_extension_suite(qs: &[u64], n: usize, max_deg: usize) -> Result<WeilSuiteReport> {
    let mut cells = Vec::new();
    for &q in qs {
        let base = FieldCtx::new(q, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
        for k in 1..q - 1 {
            let chi = CharIndex::single(k);
            let rows: Vec<WeilCheck> = (1..=max_deg)
                .flat_map(|d| monic_polys(q, d))
                .collect::<Vec<_>>()
                .par_iter()
                .map(|f| weil_norm_check(&base, n, &chi, f))
                .collect::<Result<_>>()?;
            cells.extend(rows);
        }
    }
    Ok(WeilSuiteReport::from_cells(cells))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WlmReport {
    pub p: u64,
    pub chi: CharIndex,
    pub dd: u64,
    pub k: IntervalSpec,
    pub r: u32,
    /// `sum_{a,b,c} |sum_{t in K} chi((t + a)(t^2 + b t + c))|^{2r}`.
    pub moment: f64,
    /// `moment^{1/2r}`.
    pub root: f64,
    /// `r |K|^{1/2} p^{3/2r} + |K| p^{3/4r}`.
    pub bound: f64,
    /// Tuples in `K^{2r}` whose polynomial is a `dd`-th power.
    pub bad_tuples: u128,
    /// `|K|^r`.
    pub bad_limit: u128,
}

/// Exact moment, its root, and the exact exceptional-tuple count.
pub fn wlm_moment(p: u64, chi: &CharIndex, k: IntervalSpec, r: u32, budget: u64) -> Result<WlmReport> {
    if r == 0 {
        return Err(Error::Domain("r must be at least 1".into()));
    }
    let work = (p as u128).pow(3) * k.length as u128;
    if work > budget as u128 {
        return Err(Error::capacity("moment enumeration", work, budget));
    }
    let ctx = FieldCtx::new(p, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
    let fc = FieldCharacter::new(&ctx, chi)?;
    if chi.is_trivial() {
        return Err(Error::Precondition("the moment needs a nontrivial character".into()));
    }
    let ts: Vec<u64> = k.integers().map(|t| arith::reduce_i64(t, p)).collect();
    let two_r = 2 * r as i32;
    let per_a: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut acc = Neumaier::default();
            let lin: Vec<u64> = ts.iter().map(|&t| arith::add_mod(t, a, p)).collect();
            let sq: Vec<u64> = ts.iter().map(|&t| arith::mul_mod(t, t, p)).collect();
            for b in 0..p {
                for c in 0..p {
                    let s: Complex64 = ts
                        .iter()
                        .enumerate()
                        .map(|(i, &t)| {
                            let quad = arith::add_mod(arith::add_mod(sq[i], arith::mul_mod(b, t, p), p), c, p);
                            fc.eval_enc(arith::mul_mod(lin[i], quad, p))
                        })
                        .sum();
                    acc.add(s.norm_sqr().powi(r as i32));
                }
            }
            acc.value()
        })
        .collect();
    let mut total = Neumaier::default();
    for v in per_a {
        total.add(v);
    }
    let moment = total.value();
    let dd = fc.order();
    let (kl, pf, rf) = (ts.len() as f64, p as f64, r as f64);
    let bad_limit = (ts.len() as u128).pow(r);
    Ok(WlmReport {
        p,
        chi: chi.clone(),
        dd,
        k,
        r,
        moment,
        root: moment.powf(1.0 / two_r as f64),
        bound: rf * kl.sqrt() * pf.powf(3.0 / (2.0 * rf)) + kl * pf.powf(3.0 / (4.0 * rf)),
        bad_tuples: count_bad_tuples(&ts, r, dd, budget)?,
        bad_limit,
    })
}

/// `(t_1, ..., t_2r)` is exceptional when every residue occurs as often
/// among the first `r` entries as among the last `r`, modulo `dd`. Counted
/// as `sum_v H(v)^2` over multiplicity vectors `v` of `r`-tuples.
pub fn count_bad_tuples(ts: &[u64], r: u32, dd: u64, budget: u64) -> Result<u128> {
    let total = (ts.len() as u128).pow(r);
    if total > budget as u128 {
        return Err(Error::capacity("exceptional tuple count", total, budget));
    }
    let mut hist: HashMap<Vec<(u64, u64)>, u128> = HashMap::new();
    let mut idx = vec![0usize; r as usize];
    for _ in 0..total {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for &i in &idx {
            *counts.entry(ts[i]).or_insert(0) += 1;
        }
        let mut key: Vec<(u64, u64)> = counts
            .into_iter()
            .map(|(t, c)| (t, c % dd))
            .filter(|&(_, c)| c != 0)
            .collect();
        key.sort_unstable();
        *hist.entry(key).or_insert(0) += 1;
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < ts.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(hist.values().map(|&h| h * h).sum())
}
