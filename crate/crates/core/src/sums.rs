//! Character sums over grids, codimension-one boxes and cubic-form values,
//! the `rho''_d` threshold, uniformity scans over `omega`, and the
//! amplification decomposition `Phi`, `alpha`, `beta`, `gamma`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{is_restriction_trivial, CharIndex, FieldCharacter};
use crate::cubic::{self, CubicForm};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, DEFAULT_DLOG_BUDGET};
use crate::numeric::{ComplexSum, Neumaier};
use crate::rng::Lcg64;
use crate::sets::{self, ExponentRule, IntervalSpec, LatticeBox};

/// Parameters a [`SumRecord`] was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumParams {
    pub p: u64,
    pub d: usize,
    /// Coefficients of `omega`, constant first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<CubicForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    pub intervals: Vec<IntervalSpec>,
    pub chi: CharIndex,
    pub restriction_trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRecord {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub trivial_bound: f64,
    pub ratio: f64,
    /// Number of terms whose argument was zero.
    pub zero_terms: u64,
    /// All terms nonzero with one common phase, so `magnitude` equals
    /// `trivial_bound` exactly.
    pub aligned: bool,
    pub params: SumParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl SumRecord {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Exact phase bookkeeping for one sum: terms are grouped by phase index
/// before any floating-point work.
#[derive(Debug, Clone, Copy)]
struct Tally {
    value: Complex64,
    zeros: u64,
    terms: u64,
    aligned: bool,
}

fn tally<I: IntoIterator<Item = u64>>(chi: &FieldCharacter, encs: I) -> Tally {
    let mut phases = Vec::new();
    let mut zeros = 0;
    for e in encs {
        match chi.phase(e) {
            Some(t) => phases.push(t),
            None => zeros += 1,
        }
    }
    let terms = phases.len() as u64 + zeros;
    phases.sort_unstable();
    let mut acc = ComplexSum::default();
    let mut distinct = 0;
    let mut i = 0;
    while i < phases.len() {
        let t = phases[i];
        let mut j = i;
        while j < phases.len() && phases[j] == t {
            j += 1;
        }
        acc.add(chi.value_of_phase(t) * (j - i) as f64);
        distinct += 1;
        i = j;
    }
    Tally {
        value: acc.value(),
        zeros,
        terms,
        aligned: zeros == 0 && distinct == 1,
    }
}

fn make_record(t: Tally, params: SumParams) -> SumRecord {
    let trivial_bound = t.terms as f64;
    let magnitude = t.value.norm();
    SumRecord {
        re: t.value.re,
        im: t.value.im,
        magnitude,
        trivial_bound,
        ratio: if t.terms == 0 { 0.0 } else { magnitude / trivial_bound },
        zero_terms: t.zeros,
        aligned: t.aligned,
        params,
        flags: Vec::new(),
    }
}

fn check_budget(what: &str, work: u128, budget: u64) -> Result<()> {
    if work > budget as u128 {
        return Err(Error::capacity(what, work, budget));
    }
    Ok(())
}

fn terms_of(intervals: &[IntervalSpec]) -> u128 {
    intervals.iter().map(|i| i.length as u128).product()
}

/// `sum x_i omega^i` over integer tuples, each coordinate reduced mod `p`.
/// Sides may be as long as you like; repeats are kept.
fn lattice_points(ctx: &FieldCtx, omega: u64, intervals: &[IntervalSpec]) -> Vec<u64> {
    let p = ctx.p();
    let mut out = vec![0u64];
    let mut power = 1u64;
    for iv in intervals {
        let axis: Vec<u64> = iv
            .integers()
            .map(|x| ctx.scale_enc(power, arith::reduce_i64(x, p)))
            .collect();
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for &acc in &out {
            for &term in &axis {
                next.push(ctx.add_enc(acc, term));
            }
        }
        out = next;
        power = ctx.mul_enc(power, omega);
    }
    if intervals.is_empty() {
        out.clear();
    }
    out
}

fn params_for(ctx: &FieldCtx, omega: u64, intervals: &[IntervalSpec], chi: &CharIndex) -> Result<SumParams> {
    Ok(SumParams {
        p: ctx.p(),
        d: ctx.d(),
        omega: Some(ctx.decode(omega).coeffs),
        form: None,
        case: None,
        intervals: intervals.to_vec(),
        chi: chi.clone(),
        restriction_trivial: is_restriction_trivial(chi, ctx)?,
    })
}

fn check_enc(ctx: &FieldCtx, omega: u64) -> Result<()> {
    if omega >= ctx.size() {
        return Err(Error::Context(format!(
            "encoding {omega} outside a field of size {}",
            ctx.size()
        )));
    }
    Ok(())
}

/// `sum_{x in I, y in J} chi(x + omega y)` over `F_{p^3}`.
pub fn grid_sum(
    ctx: &FieldCtx,
    omega: u64,
    i: IntervalSpec,
    j: IntervalSpec,
    chi: &CharIndex,
    budget: u64,
) -> Result<SumRecord> {
    if ctx.d() != 3 {
        return Err(Error::Precondition(format!(
            "grid sums live in a cubic extension, got degree {}",
            ctx.d()
        )));
    }
    check_enc(ctx, omega)?;
    if ctx.is_base(omega) {
        return Err(Error::Precondition("omega lies in the prime field".into()));
    }
    let intervals = [i, j];
    check_budget("grid sum", terms_of(&intervals), budget)?;
    let fc = FieldCharacter::new(ctx, chi)?;
    let t = tally(&fc, lattice_points(ctx, omega, &intervals));
    Ok(make_record(t, params_for(ctx, omega, &intervals, chi)?))
}

/// Sum over the codimension-one box `{x_0 + x_1 omega + ... + x_{d-2} omega^{d-2}}`.
pub fn sublattice_sum(
    ctx: &FieldCtx,
    omega: u64,
    boxes: &[IntervalSpec],
    chi: &CharIndex,
    budget: u64,
) -> Result<SumRecord> {
    let d = ctx.d();
    if boxes.len() + 1 != d {
        return Err(Error::Shape(format!(
            "expected d - 1 = {} boxes, got {}",
            d.saturating_sub(1),
            boxes.len()
        )));
    }
    check_enc(ctx, omega)?;
    if ctx.element_degree(omega) != d {
        return Err(Error::Precondition(format!(
            "omega has degree {} over F_p, need {d}",
            ctx.element_degree(omega)
        )));
    }
    check_budget("sublattice sum", terms_of(boxes), budget)?;
    let fc = FieldCharacter::new(ctx, chi)?;
    let t = tally(&fc, lattice_points(ctx, omega, boxes));
    Ok(make_record(t, params_for(ctx, omega, boxes, chi)?))
}

/// `sum_{x in I, y in J} chi(f(x, y))` for a non-degenerate cubic form and a
/// non-principal `chi` of `F_p^*`.
pub fn cubic_form_sum(
    p: u64,
    form: &CubicForm,
    i: IntervalSpec,
    j: IntervalSpec,
    chi: &CharIndex,
    budget: u64,
) -> Result<SumRecord> {
    let class = match cubic::classify(form, p) {
        Err(Error::Degenerate(m)) => return Err(Error::Precondition(m)),
        other => other?,
    };
    if chi.is_trivial() {
        return Err(Error::Precondition(
            "cubic form sums need a non-principal character".into(),
        ));
    }
    let intervals = [i, j];
    check_budget("cubic form sum", terms_of(&intervals), budget)?;
    let ctx = FieldCtx::new(p, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
    let fc = FieldCharacter::new(&ctx, chi)?;
    let values = i.integers().flat_map(|x| {
        j.integers()
            .map(move |y| form.eval(arith::reduce_i64(x, p), arith::reduce_i64(y, p), p))
    });
    let t = tally(&fc, values);
    let mut rec = make_record(
        t,
        SumParams {
            p,
            d: 1,
            omega: None,
            form: Some(*form),
            case: Some(class.case.number()),
            intervals: intervals.to_vec(),
            chi: chi.clone(),
            restriction_trivial: false,
        },
    );
    let root = (p as f64).sqrt();
    if i.length as f64 >= root || j.length as f64 >= root {
        rec.flags.push("interval-not-below-sqrt-p".into());
    }
    Ok(rec)
}

/// `rho''_d = (1460 - 1000 d + sqrt(1e6 d^2 - 1.96e6 d + 490000)) / 960`.
pub fn rho_threshold(d: u32) -> Result<f64> {
    if d < 3 {
        return Err(Error::Domain(format!("threshold needs d >= 3, got {d}")));
    }
    let d = d as f64;
    let disc = 1_000_000.0 * d * d - 1_960_000.0 * d + 490_000.0;
    Ok((1460.0 - 1000.0 * d + disc.sqrt()) / 960.0)
}

// ---- character selection ---------------------------------------------------

/// A concrete index, the canonical character of a given order, or the
/// canonical nontrivial character trivial on `F_p^*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ChiSelector {
    Index(CharIndex),
    Order(u64),
    RestrictionTrivial,
}

impl ChiSelector {
    /// Exponent `k` in `chi(g^j) = e(kj / N)` for a single field.
    pub fn resolve(&self, ctx: &FieldCtx) -> Result<CharIndex> {
        let n = ctx.unit_order();
        match self {
            ChiSelector::Index(chi) => {
                if chi.components.len() != 1 || chi.components[0] >= n {
                    return Err(Error::Domain(format!("character {chi} not defined mod {n}")));
                }
                Ok(chi.clone())
            }
            ChiSelector::Order(k) => {
                if *k == 0 || !n.is_multiple_of(*k) {
                    return Err(Error::Domain(format!(
                        "no character of order {k}: unit group has order {n}"
                    )));
                }
                Ok(CharIndex::single((n / k) % n))
            }
            ChiSelector::RestrictionTrivial => {
                if ctx.d() < 2 {
                    return Err(Error::Domain(
                        "only the trivial character is trivial on F_p^* here".into(),
                    ));
                }
                Ok(CharIndex::single(ctx.p() - 1))
            }
        }
    }
}

impl fmt::Display for ChiSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiSelector::Index(chi) => write!(f, "{chi}"),
            ChiSelector::Order(k) => write!(f, "order={k}"),
            ChiSelector::RestrictionTrivial => f.write_str("restriction-trivial"),
        }
    }
}

impl FromStr for ChiSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "restriction-trivial" {
            return Ok(ChiSelector::RestrictionTrivial);
        }
        if let Some(k) = s.strip_prefix("order=") {
            return k
                .parse()
                .map(ChiSelector::Order)
                .map_err(|e| Error::Parse(format!("character order {k:?}: {e}")));
        }
        s.parse().map(ChiSelector::Index)
    }
}

impl TryFrom<String> for ChiSelector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ChiSelector> for String {
    fn from(c: ChiSelector) -> String {
        c.to_string()
    }
}

// ---- omega scans -----------------------------------------------------------

/// Which `omega in F_{p^3} \ F_p` a scan visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OmegaMode {
    All,
    Sample(u64),
}

impl OmegaMode {
    /// Encodings in visiting order: ascending for `All`, a seeded draw with
    /// replacement for `Sample`.
    pub fn omegas(&self, ctx: &FieldCtx, seed: u64) -> Vec<u64> {
        let (p, q) = (ctx.p(), ctx.size());
        match self {
            OmegaMode::All => (p..q).collect(),
            OmegaMode::Sample(n) => {
                let mut rng = Lcg64::new(seed);
                (0..*n).map(|_| p + rng.below(q - p)).collect()
            }
        }
    }

    pub fn count(&self, ctx: &FieldCtx) -> u64 {
        match self {
            OmegaMode::All => ctx.size() - ctx.p(),
            OmegaMode::Sample(n) => *n,
        }
    }
}

impl fmt::Display for OmegaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaMode::All => f.write_str("all"),
            OmegaMode::Sample(n) => write!(f, "sample:{n}"),
        }
    }
}

impl FromStr for OmegaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(OmegaMode::All);
        }
        match s.strip_prefix("sample:") {
            Some(n) => n
                .parse()
                .map(OmegaMode::Sample)
                .map_err(|e| Error::Parse(format!("sample size {n:?}: {e}"))),
            None => Err(Error::Parse(format!("omega mode {s:?}: expected all or sample:N"))),
        }
    }
}

impl TryFrom<String> for OmegaMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OmegaMode> for String {
    fn from(m: OmegaMode) -> String {
        m.to_string()
    }
}

/// Median of a non-empty slice (mean of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiScan {
    pub chi: CharIndex,
    pub restriction_trivial: bool,
    pub omegas: Vec<u64>,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub argmax_omega: Option<u64>,
    /// How many `omega` give a fully aligned sum (ratio exactly 1).
    pub aligned: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub restriction_trivial: bool,
    pub characters: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub aligned: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub p: u64,
    pub intervals: [IntervalSpec; 2],
    pub mode: OmegaMode,
    pub seed: u64,
    pub per_chi: Vec<ChiScan>,
    pub groups: Vec<GroupSummary>,
}

/// Grid sums for every visited `omega` and every character in `chis`.
pub fn omega_uniformity_scan(
    ctx: &FieldCtx,
    i: IntervalSpec,
    j: IntervalSpec,
    chis: &[CharIndex],
    mode: OmegaMode,
    seed: u64,
    budget: u64,
) -> Result<ScanReport> {
    if ctx.d() != 3 {
        return Err(Error::Precondition("omega scans run over F_{p^3}".into()));
    }
    let work = mode.count(ctx) as u128 * terms_of(&[i, j]) * chis.len() as u128;
    check_budget("omega scan", work, budget)?;
    let omegas = mode.omegas(ctx, seed);
    let mut per_chi = Vec::with_capacity(chis.len());
    for chi in chis {
        let fc = FieldCharacter::new(ctx, chi)?;
        let tallies: Vec<Tally> = omegas
            .par_iter()
            .map(|&w| tally(&fc, lattice_points(ctx, w, &[i, j])))
            .collect();
        let ratios: Vec<f64> = tallies
            .iter()
            .map(|t| {
                if t.terms == 0 {
                    0.0
                } else {
                    t.value.norm() / t.terms as f64
                }
            })
            .collect();
        let mut argmax = None;
        let mut max_ratio = f64::NEG_INFINITY;
        for (&w, &r) in omegas.iter().zip(&ratios) {
            if r > max_ratio {
                max_ratio = r;
                argmax = Some(w);
            }
        }
        per_chi.push(ChiScan {
            chi: chi.clone(),
            restriction_trivial: is_restriction_trivial(chi, ctx)?,
            median_ratio: median(&ratios),
            max_ratio: if ratios.is_empty() { f64::NAN } else { max_ratio },
            argmax_omega: argmax,
            aligned: tallies.iter().filter(|t| t.aligned).count() as u64,
            omegas: omegas.clone(),
            ratios,
        });
    }
    let mut groups = Vec::new();
    for flag in [true, false] {
        let members: Vec<&ChiScan> = per_chi.iter().filter(|c| c.restriction_trivial == flag).collect();
        if members.is_empty() {
            continue;
        }
        let pooled: Vec<f64> = members.iter().flat_map(|c| c.ratios.iter().copied()).collect();
        groups.push(GroupSummary {
            restriction_trivial: flag,
            characters: members.len(),
            max_ratio: pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            median_ratio: median(&pooled),
            aligned: members.iter().map(|c| c.aligned).sum(),
        });
    }
    Ok(ScanReport {
        p: ctx.p(),
        intervals: [i, j],
        mode,
        seed,
        per_chi,
        groups,
    })
}

// ---- amplification decomposition -------------------------------------------

/// Greedy harmonic fill of the window `(lo, hi)` by `1/k`, `k >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicWindow {
    pub lo: f64,
    pub hi: f64,
    pub ks: Vec<u64>,
    pub sum: f64,
    /// `hi <= 0`: no admissible list exists and the fill is empty.
    pub vacuous: bool,
}

const MAX_HARMONIC_TERMS: usize = 64;

/// Repeatedly appends the smallest `k >= 2` keeping the sum below `hi`,
/// until the sum exceeds `lo`.
pub fn harmonic_fill(lo: f64, hi: f64) -> Result<HarmonicWindow> {
    if hi <= 0.0 || hi <= lo {
        return Ok(HarmonicWindow {
            lo,
            hi,
            ks: Vec::new(),
            sum: 0.0,
            vacuous: true,
        });
    }
    let mut ks = Vec::new();
    let mut sum = 0.0;
    while sum <= lo {
        if ks.len() == MAX_HARMONIC_TERMS {
            return Err(Error::Numerical(format!(
                "window ({lo}, {hi}) not filled by {MAX_HARMONIC_TERMS} terms"
            )));
        }
        let gap = hi - sum;
        // smallest k with 1/k < gap
        let mut k = ((1.0 / gap).floor() as u64).max(1) + 1;
        while k > 2 && 1.0 / ((k - 1) as f64) < gap {
            k -= 1;
        }
        k = k.max(2);
        ks.push(k);
        sum += 1.0 / k as f64;
    }
    Ok(HarmonicWindow {
        lo,
        hi,
        ks,
        sum,
        vacuous: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurgessConfig {
    pub rho: f64,
    pub eps: f64,
    /// `J_0, ..., J_{d-2}`.
    pub boxes: Vec<IntervalSpec>,
    /// Hölder exponent.
    pub k: u32,
    pub rule: ExponentRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurgessDecomp {
    /// `(mu, Phi(mu))` for `Phi(mu) > 0`, ascending encoding.
    pub phi: Vec<(u64, u64)>,
    pub alpha_mass: u64,
    pub beta_sq: u64,
    pub gamma_moment: f64,
    pub k: u32,
    pub window: HarmonicWindow,
    pub i_len: u64,
    pub is_lens: Vec<u64>,
    pub q_size: u64,
    pub q0: LatticeBox,
    pub q0_size: u64,
    pub boxes: Vec<IntervalSpec>,
    pub rho: f64,
    pub eps: f64,
    /// `(1/N) sum_mu Phi(mu) |sum_{t in I} chi(mu + t)|`, `N = |I| prod|I_s| |Q0|`.
    pub amplified_average: f64,
    /// `(1/N) alpha^{1 - 1/k} (beta^2)^{1/2k} gamma^{1/2k}`.
    pub holder_bound: f64,
    /// `|Q||Q0| p^{(19 - 4 rho)/10 sum 1/k_s}`.
    pub claim_lhs: f64,
    /// `|Q|^2 |Q0|^2 p^{2 sum 1/k_s - d/2}`.
    pub claim_rhs: f64,
    pub claim_holds: bool,
}

/// Exact `Phi` histogram of `x / (s_1 ... s_r q)` with `x` in the `J`-box,
/// `s_i in I_s`, `q in Q0`, and the moments built from it.
pub fn burgess_decompose(ctx: &FieldCtx, cfg: &BurgessConfig, chi: &CharIndex, budget: u64) -> Result<BurgessDecomp> {
    let (p, d) = (ctx.p(), ctx.d());
    if cfg.boxes.len() + 1 != d {
        return Err(Error::Shape(format!(
            "expected d - 1 = {} boxes, got {}",
            d.saturating_sub(1),
            cfg.boxes.len()
        )));
    }
    if cfg.k == 0 {
        return Err(Error::Domain("Hölder exponent k must be at least 1".into()));
    }
    if cfg.eps.is_nan() || cfg.eps <= 0.0 {
        return Err(Error::Domain(format!("eps = {} must be positive", cfg.eps)));
    }
    let base = 1.2 * cfg.rho - 0.45;
    let window = harmonic_fill(base - 2.0 * cfg.eps, base - cfg.eps)?;
    let q0 = sets::q0_box(ctx, cfg.rho, cfg.rule)?;
    let q0_elems = sets::box_elements(ctx, &q0)?;
    if q0_elems.is_empty() {
        return Err(Error::Precondition("Q0 is empty".into()));
    }
    let x_box = LatticeBox::new(cfg.boxes.clone());
    let i_len = arith::floor_pow(p, cfg.eps / 2.0);
    let is_lens: Vec<u64> = window.ks.iter().map(|&k| arith::floor_pow(p, 1.0 / k as f64)).collect();
    let tuples =
        x_box.cardinality() as u128 * is_lens.iter().map(|&l| l as u128).product::<u128>() * q0_elems.len() as u128;
    check_budget("Phi enumeration", tuples, budget)?;
    check_budget("gamma moment", ctx.size() as u128 * i_len as u128, budget)?;
    let xs = sets::box_elements(ctx, &x_box)?;
    let fc = FieldCharacter::new(ctx, chi)?;

    // denominators s_1 ... s_r q with multiplicity
    let mut denom: Vec<(u64, u64)> = vec![(1, 1)];
    for &len in &is_lens {
        let mut next = std::collections::BTreeMap::new();
        for &(v, m) in &denom {
            for s in 1..=len {
                *next.entry(ctx.scale_enc(v, s % p)).or_insert(0u64) += m;
            }
        }
        denom = next.into_iter().collect();
    }
    let mut with_q = std::collections::BTreeMap::new();
    for &(v, m) in &denom {
        for &q in &q0_elems {
            *with_q.entry(ctx.mul_enc(v, q)).or_insert(0u64) += m;
        }
    }
    let inverses: Vec<(u64, u64)> = with_q
        .into_iter()
        .filter(|&(v, _)| v != 0)
        .map(|(v, m)| Ok((ctx.inv_enc(v)?, m)))
        .collect::<Result<_>>()?;

    let mut phi_dense = vec![0u64; ctx.size() as usize];
    for &x in &xs {
        for &(inv, m) in &inverses {
            phi_dense[ctx.mul_enc(x, inv) as usize] += m;
        }
    }
    let mut alpha_mass = 0u64;
    let mut beta_sq = 0u64;
    let mut phi = Vec::new();
    for (mu, &c) in phi_dense.iter().enumerate() {
        if c > 0 {
            alpha_mass += c;
            beta_sq = beta_sq
                .checked_add(
                    c.checked_mul(c)
                        .ok_or_else(|| Error::Numerical("beta overflow".into()))?,
                )
                .ok_or_else(|| Error::Numerical("beta overflow".into()))?;
            phi.push((mu as u64, c));
        }
    }

    // |sum_{t in I} chi(mu + t)| for every mu
    let shifts: Vec<u64> = (1..=i_len).map(|t| t % p).collect();
    let mags: Vec<f64> = (0..ctx.size())
        .into_par_iter()
        .map(|mu| tally(&fc, shifts.iter().map(|&t| ctx.add_enc(mu, t))).value.norm())
        .collect();
    let two_k = 2 * cfg.k as i32;
    let mut gamma = Neumaier::default();
    let mut weighted = Neumaier::default();
    for (mu, &m) in mags.iter().enumerate() {
        gamma.add(m.powi(two_k));
        if phi_dense[mu] > 0 {
            weighted.add(phi_dense[mu] as f64 * m);
        }
    }
    let gamma_moment = gamma.value();
    let norm = i_len as f64 * is_lens.iter().map(|&l| l as f64).product::<f64>() * q0_elems.len() as f64;
    let k = cfg.k as f64;
    let holder_bound = (alpha_mass as f64).powf(1.0 - 1.0 / k)
        * (beta_sq as f64).powf(1.0 / (2.0 * k))
        * gamma_moment.powf(1.0 / (2.0 * k))
        / norm;

    let q_size = x_box.cardinality();
    let (qf, q0f, pf) = (q_size as f64, q0_elems.len() as f64, p as f64);
    let claim_lhs = qf * q0f * pf.powf((19.0 - 4.0 * cfg.rho) / 10.0 * window.sum);
    let claim_rhs = qf * qf * q0f * q0f * pf.powf(2.0 * window.sum - d as f64 / 2.0);
    Ok(BurgessDecomp {
        phi,
        alpha_mass,
        beta_sq,
        gamma_moment,
        k: cfg.k,
        window,
        i_len,
        is_lens,
        q_size,
        q0_size: q0_elems.len() as u64,
        q0,
        boxes: cfg.boxes.clone(),
        rho: cfg.rho,
        eps: cfg.eps,
        amplified_average: weighted.value() / norm,
        holder_bound,
        claim_lhs,
        claim_rhs,
        claim_holds: claim_lhs < claim_rhs,
    })
}

// ---- sweeps -----------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub p_list: Vec<u64>,
    pub rho_list: Vec<f64>,
    pub chi: Vec<ChiSelector>,
    pub omega_mode: OmegaMode,
    pub seed: u64,
    pub budget: u64,
}

/// One `(p, rho, chi class)` cell of a cancellation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: u64,
    pub d: usize,
    pub rho: f64,
    pub chi_class: String,
    pub chi: String,
    pub restriction_trivial: bool,
    pub omega_mode: String,
    pub seed: u64,
    pub n_omega: u64,
    pub interval_len: u64,
    pub median_ratio: f64,
    pub max_ratio: f64,
    pub aligned: u64,
}

/// Median and max grid-sum ratios over `omega` for every cell, in plan
/// order (`p`, then `rho`, then character class).
pub fn cancellation_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &p in &spec.p_list {
        let ctx = FieldCtx::new(p, 3, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
        for &rho in &spec.rho_list {
            let iv = IntervalSpec::from_exponent(p, rho);
            for sel in &spec.chi {
                let chi = sel.resolve(&ctx)?;
                let report = omega_uniformity_scan(
                    &ctx,
                    iv,
                    iv,
                    std::slice::from_ref(&chi),
                    spec.omega_mode,
                    spec.seed,
                    spec.budget,
                )?;
                let scan = &report.per_chi[0];
                rows.push(SweepRow {
                    p,
                    d: 3,
                    rho,
                    chi_class: sel.to_string(),
                    chi: chi.to_string(),
                    restriction_trivial: scan.restriction_trivial,
                    omega_mode: spec.omega_mode.to_string(),
                    seed: spec.seed,
                    n_omega: scan.omegas.len() as u64,
                    interval_len: iv.length,
                    median_ratio: scan.median_ratio,
                    max_ratio: scan.max_ratio,
                    aligned: scan.aligned,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u64 = 1 << 30;

    fn cubic(p: u64) -> FieldCtx {
        FieldCtx::new(p, 3, 0).unwrap().with_dlog(DEFAULT_DLOG_BUDGET).unwrap()
    }

    #[test]
    fn thresholds() {
        assert!((rho_threshold(3).unwrap() - 0.375).abs() < 1e-12);
        assert!((rho_threshold(4).unwrap() - 0.4178).abs() < 1e-4);
        assert!(matches!(rho_threshold(2), Err(Error::Domain(_))));
        let mut prev = 0.0;
        for d in 3..=12 {
            let r = rho_threshold(d).unwrap();
            assert!(r > prev && r < 0.5);
            prev = r;
        }
    }

    #[test]
    fn grid_trivial_and_single() {
        let k = cubic(7);
        let w = k.basis_power_enc(1);
        let r = grid_sum(
            &k,
            w,
            IntervalSpec::new(1, 3),
            IntervalSpec::new(1, 3),
            &CharIndex::single(0),
            B,
        )
        .unwrap();
        assert_eq!(r.re, 9.0);
        assert_eq!(r.ratio, 1.0);
        assert!(r.aligned);
        let r = grid_sum(
            &k,
            w,
            IntervalSpec::new(1, 1),
            IntervalSpec::new(1, 1),
            &CharIndex::single(5),
            B,
        )
        .unwrap();
        assert!((r.magnitude - 1.0).abs() < 1e-12);
        assert!(matches!(
            grid_sum(
                &k,
                3,
                IntervalSpec::new(1, 1),
                IntervalSpec::new(1, 1),
                &CharIndex::single(1),
                B
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn grid_matches_sublattice() {
        let k = cubic(11);
        let w = k.basis_power_enc(1);
        let (i, j) = (IntervalSpec::new(2, 4), IntervalSpec::new(1, 3));
        let a = grid_sum(&k, w, i, j, &CharIndex::single(7), B).unwrap();
        let b = sublattice_sum(&k, w, &[i, j], &CharIndex::single(7), B).unwrap();
        assert_eq!(a.value(), b.value());
        assert!(matches!(
            sublattice_sum(&k, w, &[i], &CharIndex::single(7), B),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn cubic_sum_tags_case() {
        let f = CubicForm::new(0, 0, -1, 7);
        let r = cubic_form_sum(
            7,
            &f,
            IntervalSpec::new(1, 3),
            IntervalSpec::new(1, 3),
            &CharIndex::single(3),
            B,
        )
        .unwrap();
        assert_eq!(r.params.case, Some(3));
        let direct: f64 = (1..=3u64)
            .flat_map(|x| (1..=3u64).map(move |y| (x, y)))
            .map(|(x, y)| {
                let v = f.eval(x, y, 7);
                if v == 0 {
                    0.0
                } else if arith::pow_mod(v, 3, 7) == 1 {
                    1.0
                } else {
                    -1.0
                }
            })
            .sum();
        assert!((r.re - direct).abs() < 1e-12 && r.im.abs() < 1e-12);
        assert!(matches!(
            cubic_form_sum(
                7,
                &CubicForm::new(0, 0, 0, 7),
                IntervalSpec::new(1, 1),
                IntervalSpec::new(1, 1),
                &CharIndex::single(3),
                B
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn selectors_parse_and_resolve() {
        let k = cubic(7);
        assert_eq!(
            "order=2".parse::<ChiSelector>().unwrap().resolve(&k).unwrap(),
            CharIndex::single(171)
        );
        assert_eq!(
            "restriction-trivial"
                .parse::<ChiSelector>()
                .unwrap()
                .resolve(&k)
                .unwrap(),
            CharIndex::single(6)
        );
        assert_eq!(
            "5".parse::<ChiSelector>().unwrap(),
            ChiSelector::Index(CharIndex::single(5))
        );
        assert!("order=5".parse::<ChiSelector>().unwrap().resolve(&k).is_err());
        assert_eq!("sample:10".parse::<OmegaMode>().unwrap(), OmegaMode::Sample(10));
        assert!("every".parse::<OmegaMode>().is_err());
    }

    #[test]
    fn scan_trivial_and_strict() {
        let k = cubic(7);
        let iv = IntervalSpec::new(1, 2);
        let rep = omega_uniformity_scan(&k, iv, iv, &[CharIndex::single(0)], OmegaMode::All, 0, B).unwrap();
        let c = &rep.per_chi[0];
        assert_eq!(c.omegas.len(), 336);
        assert_eq!((c.max_ratio, c.median_ratio), (1.0, 1.0));
        let rep = omega_uniformity_scan(&k, iv, iv, &[CharIndex::single(171)], OmegaMode::Sample(20), 3, B).unwrap();
        assert_eq!(rep.per_chi[0].omegas.len(), 20);
        assert!(rep.per_chi[0].omegas.iter().all(|&w| (7..343).contains(&w)));
    }

    #[test]
    fn harmonic_window() {
        let w = harmonic_fill(0.07, 0.08).unwrap();
        assert_eq!(w.ks, vec![13]);
        let w = harmonic_fill(0.5, 0.6).unwrap();
        assert!(w.sum > 0.5 && w.sum < 0.6);
        assert!(harmonic_fill(-0.1, -0.05).unwrap().vacuous);
        let w = harmonic_fill(-0.02, 0.01).unwrap();
        assert!(w.ks.is_empty() && !w.vacuous);
    }

    #[test]
    fn burgess_singleton_boxes() {
        let k = cubic(7);
        let cfg = BurgessConfig {
            rho: 0.45,
            eps: 0.01,
            boxes: vec![IntervalSpec::new(1, 1); 2],
            k: 2,
            rule: ExponentRule::SetDef,
        };
        let b = burgess_decompose(&k, &cfg, &CharIndex::single(5), B).unwrap();
        assert_eq!(b.alpha_mass, b.q_size * b.q0_size * b.is_lens.iter().product::<u64>());
        assert!(b.amplified_average <= b.holder_bound * (1.0 + 1e-12));
        assert!(b.beta_sq as f64 >= (b.alpha_mass as f64).powi(2) / 343.0);
    }
}
