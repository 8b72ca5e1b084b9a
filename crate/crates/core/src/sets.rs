//! Interval-structured sets: integer intervals reduced into `F_p`, lattice
//! boxes `{sum x_i w^i}`, the boxes `Q` and `Q0`, and the product-ring
//! tuple sets `R`, `T`, `S`, `Delta` built from a factored cubic form.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::character::{RingCtx, RingElem};
use crate::cubic::{CubicForm, FormClass, FormRoots};
use crate::error::{Error, Result};
use crate::field::{FieldCtx, DEFAULT_DLOG_BUDGET};

/// `{start, ..., start + length - 1}` as integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub start: i64,
    pub length: u64,
}

impl IntervalSpec {
    pub fn new(start: i64, length: u64) -> Self {
        Self { start, length }
    }

    /// `[1, floor(p^rho)]`.
    pub fn from_exponent(p: u64, rho: f64) -> Self {
        Self::new(1, arith::floor_pow(p, rho))
    }

    pub fn integers(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.length as i64).map(move |i| self.start + i)
    }

    /// Elements reduced into `F_p`; no duplicates while `length <= p`.
    pub fn residues(&self, p: u64) -> Result<Vec<u64>> {
        if self.length > p {
            return Err(Error::Domain(format!(
                "interval of length {} wraps around mod {p}",
                self.length
            )));
        }
        Ok(self.integers().map(|x| arith::reduce_i64(x, p)).collect())
    }
}

/// How the per-coordinate length of `Q0` is read off `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentRule {
    /// `floor(p^{(9 - 4 sigma)/20})` per coordinate, as the set is defined.
    SetDef,
    /// `floor(p^{(9 - 4 sigma)/10})` per coordinate, the cardinality exponent
    /// read as a per-coordinate exponent.
    ProofCard,
}

impl ExponentRule {
    pub fn exponent(&self, sigma: f64) -> f64 {
        match self {
            ExponentRule::SetDef => (9.0 - 4.0 * sigma) / 20.0,
            ExponentRule::ProofCard => (9.0 - 4.0 * sigma) / 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxOrigin {
    pub sigma: f64,
    pub exponent: f64,
    pub rule: Option<ExponentRule>,
}

/// Coordinate box `{sum_i x_i w^i : x_i in intervals[i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub intervals: Vec<IntervalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<BoxOrigin>,
}

impl LatticeBox {
    pub fn new(intervals: Vec<IntervalSpec>) -> Self {
        Self {
            intervals,
            origin: None,
        }
    }

    /// Product of interval lengths.
    pub fn cardinality(&self) -> u64 {
        self.intervals.iter().map(|i| i.length).product()
    }
}

/// Elements of the box over the basis root `w` of `ctx`.
pub fn box_elements(ctx: &FieldCtx, lattice: &LatticeBox) -> Result<Vec<u64>> {
    box_elements_over(ctx, lattice, ctx.basis_power_enc(1))
}

/// Elements `sum x_i omega^i` for an arbitrary `omega`, as encodings, in
/// lexicographic order of the coordinate tuple (first coordinate slowest).
pub fn box_elements_over(ctx: &FieldCtx, lattice: &LatticeBox, omega: u64) -> Result<Vec<u64>> {
    if lattice.intervals.len() + 1 > ctx.d().max(2) {
        return Err(Error::Shape(format!(
            "{} coordinates exceed d - 1 = {}",
            lattice.intervals.len(),
            ctx.d().saturating_sub(1)
        )));
    }
    let p = ctx.p();
    let mut axes = Vec::with_capacity(lattice.intervals.len());
    let mut power = 1u64;
    for iv in &lattice.intervals {
        if iv.length >= p {
            return Err(Error::Domain(format!(
                "box side {} must be shorter than p = {p}",
                iv.length
            )));
        }
        let axis: Vec<u64> = iv.residues(p)?.into_iter().map(|x| ctx.scale_enc(power, x)).collect();
        axes.push(axis);
        power = ctx.mul_enc(power, omega);
    }
    let mut out = vec![0u64];
    for axis in &axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for &acc in &out {
            for &term in axis {
                next.push(ctx.add_enc(acc, term));
            }
        }
        out = next;
    }
    if axes.is_empty() {
        out.clear();
    }
    Ok(out)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 11.0 / 16.0) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0, 11/16)")));
    }
    Ok(())
}

/// `Q0 = {y0 + y1 w}` with both sides sized by `rule`.
pub fn q0_box(ctx: &FieldCtx, sigma: f64, rule: ExponentRule) -> Result<LatticeBox> {
    check_sigma(sigma)?;
    let exponent = rule.exponent(sigma);
    let side = IntervalSpec::from_exponent(ctx.p(), exponent);
    Ok(LatticeBox {
        intervals: vec![side; 2],
        origin: Some(BoxOrigin {
            sigma,
            exponent,
            rule: Some(rule),
        }),
    })
}

/// `Q = {x_0 + ... + x_{d-2} w^{d-2} : x_i in [1, p^sigma]}`.
pub fn q_box(ctx: &FieldCtx, sigma: f64) -> Result<LatticeBox> {
    check_sigma(sigma)?;
    let side = IntervalSpec::from_exponent(ctx.p(), sigma);
    Ok(LatticeBox {
        intervals: vec![side; ctx.d().saturating_sub(1).max(1)],
        origin: Some(BoxOrigin {
            sigma,
            exponent: sigma,
            rule: None,
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TupleLabel {
    R,
    T,
    S,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleParams {
    pub p: u64,
    pub case: u8,
    pub form: CubicForm,
    /// Root encodings per coordinate: `l1` and then `w2, w3` (Case 2) or
    /// `l2, l3` (Case 3).
    pub roots: [u64; 3],
    pub intervals: Vec<IntervalSpec>,
}

#[derive(Debug, Clone)]
pub struct TupleSet {
    pub label: TupleLabel,
    pub elements: Vec<RingElem>,
    pub params: TupleParams,
}

/// `R`, `T`, `S`, `Delta` together with their product ring.
#[derive(Debug, Clone)]
pub struct TupleSets {
    pub ring: RingCtx,
    pub r: TupleSet,
    pub t: TupleSet,
    pub s: TupleSet,
    pub delta: TupleSet,
}

/// Ring `F_p x F_{p^2} x F_{p^2}` (Case 2) or `F_p^3` (Case 3) and the root
/// encodings of the three linear factors.
pub fn form_ring(p: u64, class: &FormClass) -> Result<(RingCtx, [u64; 3])> {
    let base = FieldCtx::new(p, 1, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)?;
    match &class.roots {
        FormRoots::Cubic { .. } => Err(Error::Precondition(
            "an irreducible form has no linear factors over F_p".into(),
        )),
        FormRoots::Split(l) => Ok((RingCtx::new(vec![base.clone(), base.clone(), base])?, *l)),
        FormRoots::Quadratic {
            lambda1,
            ext,
            omega2,
            omega3,
            ..
        } => {
            let ext = ext.with_dlog(DEFAULT_DLOG_BUDGET)?;
            Ok((
                RingCtx::new(vec![base, ext.clone(), ext])?,
                [*lambda1, *omega2, *omega3],
            ))
        }
    }
}

/// `(x - r_1 y, x - r_2 y, x - r_3 y)` in the form's ring.
pub fn linear_forms_at(ring: &RingCtx, roots: &[u64; 3], x: u64, y: u64) -> RingElem {
    RingElem(
        ring.components()
            .iter()
            .zip(roots)
            .map(|(c, &r)| c.sub_enc(x, c.mul_enc(r, y)))
            .collect(),
    )
}

fn dedup(elems: Vec<RingElem>) -> Vec<RingElem> {
    let mut seen = HashSet::new();
    elems.into_iter().filter(|e| seen.insert(e.clone())).collect()
}

pub fn build_tuple_sets(
    p: u64,
    form: &CubicForm,
    class: &FormClass,
    i: IntervalSpec,
    j: IntervalSpec,
    i0: IntervalSpec,
    k: IntervalSpec,
) -> Result<TupleSets> {
    let (ring, roots) = form_ring(p, class)?;
    let params = TupleParams {
        p,
        case: class.case.number(),
        form: *form,
        roots,
        intervals: vec![i, j, i0, k],
    };
    let pairs = |u: &IntervalSpec, v: &IntervalSpec| -> Result<Vec<RingElem>> {
        let (us, vs) = (u.residues(p)?, v.residues(p)?);
        Ok(dedup(
            us.iter()
                .flat_map(|&x| vs.iter().map(move |&y| (x, y)))
                .map(|(x, y)| linear_forms_at(&ring, &roots, x, y))
                .collect(),
        ))
    };
    let r = pairs(&i, &j)?;
    let t = pairs(&i0, &i0)?;
    let diag = |vals: Vec<u64>| dedup(vals.into_iter().map(|v| RingElem(vec![v; 3])).collect());
    let s = diag(k.residues(p)?);
    let delta = diag((1..p).collect());
    let mk = |label, elements| TupleSet {
        label,
        elements,
        params: params.clone(),
    };
    Ok(TupleSets {
        r: mk(TupleLabel::R, r),
        t: mk(TupleLabel::T, t),
        s: mk(TupleLabel::S, s),
        delta: mk(TupleLabel::Delta, delta),
        ring,
    })
}
