//! Binary cubic forms `f(x, y) = x^3 + a x^2 y + b x y^2 + c y^3` over `F_p`
//! and their factorization type.
//!
//! Everything goes through the dehomogenization `g(t) = f(t, 1)
//! = t^3 + a t^2 + b t + c`; roots are found by exhaustive scan.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{FieldCtx, DEFAULT_DLOG_BUDGET};
use crate::poly::{self, PrimeField};

/// Largest prime for which [`enumerate_nondegenerate`] runs.
pub const ENUMERATION_LIMIT: u64 = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubicForm {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl CubicForm {
    /// Coefficients reduced into `[0, p)`.
    pub fn new(a: i64, b: i64, c: i64, p: u64) -> Self {
        Self {
            a: arith::reduce_i64(a, p),
            b: arith::reduce_i64(b, p),
            c: arith::reduce_i64(c, p),
        }
    }

    /// `g(t) = t^3 + a t^2 + b t + c`, constant term first.
    pub fn dehomogenized(&self) -> Vec<u64> {
        vec![self.c, self.b, self.a, 1]
    }

    pub fn eval(&self, x: u64, y: u64, p: u64) -> u64 {
        let m = |u, v| arith::mul_mod(u, v, p);
        let (x, y) = (x % p, y % p);
        let x2 = m(x, x);
        let y2 = m(y, y);
        let mut acc = m(x2, x);
        acc = arith::add_mod(acc, m(self.a % p, m(x2, y)), p);
        acc = arith::add_mod(acc, m(self.b % p, m(x, y2)), p);
        arith::add_mod(acc, m(self.c % p, m(y2, y)), p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormCase {
    Irreducible,
    LinearTimesQuadratic,
    Split,
}

impl FormCase {
    /// The 1/2/3 numbering of the three non-degenerate cases.
    pub fn number(&self) -> u8 {
        match self {
            FormCase::Irreducible => 1,
            FormCase::LinearTimesQuadratic => 2,
            FormCase::Split => 3,
        }
    }
}

/// Root data of a classified form.
#[derive(Debug, Clone)]
pub enum FormRoots {
    /// Roots `w, w^p, w^{p^2}` of `g` in `ext = F_p[t]/(g)`, where `w` is
    /// the class of `t`.
    Cubic { ext: FieldCtx, roots: [u64; 3] },
    /// `f = (x - l1 y)(x^2 - l2 x y + l3 y^2) = (x - l1 y)(x - w2 y)(x - w3 y)`
    /// with `w2, w3` encodings in `ext = F_{p^2}` and `w3 = w2^p`.
    Quadratic {
        lambda1: u64,
        lambda2: u64,
        lambda3: u64,
        ext: FieldCtx,
        omega2: u64,
        omega3: u64,
    },
    /// Distinct roots in increasing order.
    Split([u64; 3]),
}

#[derive(Debug, Clone)]
pub struct FormClass {
    pub case: FormCase,
    pub roots: FormRoots,
}

impl FormClass {
    /// Expands the stored factorization back into `(a, b, c)`; `None` if the
    /// product fails to land in `F_p[t]`.
    pub fn reconstruct(&self, p: u64) -> Option<CubicForm> {
        match &self.roots {
            FormRoots::Cubic { ext, roots } => {
                let g = roots
                    .iter()
                    .fold(vec![1u64], |acc, &r| poly::mul(ext, &acc, &[ext.neg_enc(r), 1]));
                if g.iter().any(|&c| !ext.is_base(c)) {
                    return None;
                }
                Some(CubicForm {
                    a: g[2],
                    b: g[1],
                    c: g[0],
                })
            }
            FormRoots::Split(l) => {
                let k = PrimeField::new(p).ok()?;
                let g = [l[0], l[1], l[2]]
                    .iter()
                    .fold(vec![1u64], |acc, &r| poly::mul(&k, &acc, &[arith::sub_mod(0, r, p), 1]));
                Some(CubicForm {
                    a: g[2],
                    b: g[1],
                    c: g[0],
                })
            }
            FormRoots::Quadratic {
                lambda1,
                ext,
                omega2,
                omega3,
                ..
            } => {
                // (t - l1)(t - w2)(t - w3) over F_{p^2}
                let l1 = *lambda1;
                let g = [l1, *omega2, *omega3]
                    .iter()
                    .fold(vec![1u64], |acc, &r| poly::mul(ext, &acc, &[ext.neg_enc(r), 1]));
                if g.iter().any(|&c| !ext.is_base(c)) {
                    return None;
                }
                Some(CubicForm {
                    a: g[2],
                    b: g[1],
                    c: g[0],
                })
            }
        }
    }
}

/// Serializable fixture `{p, a, b, c, case}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormFixture {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub case: FormCase,
}

fn require_large_char(p: u64) -> Result<PrimeField> {
    let k = PrimeField::new(p)?;
    if p <= 3 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    Ok(k)
}

/// Discriminant `18abc - 4a^3c + a^2b^2 - 4b^3 - 27c^2` of `g`.
pub fn discriminant(f: &CubicForm, p: u64) -> Result<u64> {
    require_large_char(p)?;
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let pi = p as i128;
    let disc = 18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c;
    Ok(disc.rem_euclid(pi) as u64)
}

/// Canonical `F_{p^2}` (with dlog table) used for Case 2 roots.
pub fn quadratic_extension(p: u64) -> Result<FieldCtx> {
    FieldCtx::new(p, 2, 0)?.with_dlog(DEFAULT_DLOG_BUDGET)
}

/// Classification with a freshly built `F_{p^2}` for Case 2.
pub fn classify(f: &CubicForm, p: u64) -> Result<FormClass> {
    let ext = quadratic_extension(p)?;
    classify_in(f, p, &ext)
}

/// Classification reusing a caller-supplied `F_{p^2}` context.
pub fn classify_in(f: &CubicForm, p: u64, ext: &FieldCtx) -> Result<FormClass> {
    let k = require_large_char(p)?;
    if discriminant(f, p)? == 0 {
        return Err(Error::Degenerate(format!(
            "x^3 + {}x^2y + {}xy^2 + {}y^3 has a repeated root mod {p}",
            f.a, f.b, f.c
        )));
    }
    let g = f.dehomogenized();
    let roots: Vec<u64> = (0..p).filter(|&t| poly::eval(&k, &g, t) == 0).collect();
    match roots.len() {
        0 => {
            let ext = FieldCtx::from_min_poly(p, &g)?;
            let w = ext.basis_power_enc(1);
            let w1 = ext.frobenius_enc(w);
            let roots = [w, w1, ext.frobenius_enc(w1)];
            Ok(FormClass {
                case: FormCase::Irreducible,
                roots: FormRoots::Cubic { ext, roots },
            })
        }
        3 => Ok(FormClass {
            case: FormCase::Split,
            roots: FormRoots::Split([roots[0], roots[1], roots[2]]),
        }),
        1 => {
            if ext.p() != p || ext.d() != 2 {
                return Err(Error::Context("Case 2 needs an F_{p^2} context".into()));
            }
            let l1 = roots[0];
            let (quad, r) = poly::divrem(&k, &g, &[arith::sub_mod(0, l1, p), 1])?;
            debug_assert!(r.is_empty());
            let lambda2 = arith::sub_mod(0, quad[1], p);
            let lambda3 = quad[0];
            let omega2 = (p..ext.size())
                .find(|&w| poly::eval(ext, &quad, w) == 0)
                .ok_or_else(|| Error::Numerical("quadratic factor has no root in F_{p^2}".into()))?;
            let omega3 = ext.frobenius_enc(omega2);
            Ok(FormClass {
                case: FormCase::LinearTimesQuadratic,
                roots: FormRoots::Quadratic {
                    lambda1: l1,
                    lambda2,
                    lambda3,
                    ext: ext.clone(),
                    omega2,
                    omega3,
                },
            })
        }
        n => Err(Error::Numerical(format!(
            "non-degenerate cubic with {n} roots in F_{p}"
        ))),
    }
}

/// Every non-degenerate form mod `p` with its class, in `(a, b, c)` order.
pub fn enumerate_nondegenerate(p: u64) -> Result<Vec<(CubicForm, FormClass)>> {
    require_large_char(p)?;
    if p > ENUMERATION_LIMIT {
        return Err(Error::capacity(
            "cubic form enumeration",
            (p as u128).pow(3),
            ENUMERATION_LIMIT.pow(3),
        ));
    }
    let ext = quadratic_extension(p)?;
    let per_a: Vec<Vec<(CubicForm, FormClass)>> = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in 0..p {
                for c in 0..p {
                    let f = CubicForm { a, b, c };
                    if discriminant(&f, p).expect("p checked") != 0 {
                        out.push((f, classify_in(&f, p, &ext).expect("non-degenerate")));
                    }
                }
            }
            out
        })
        .collect();
    Ok(per_a.into_iter().flatten().collect())
}
