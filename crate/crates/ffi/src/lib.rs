//! C ABI over `charsum`.
//!
//! Every function returns a [`CsStatus`]; results go through out-pointers.
//! On failure the thread-local message behind [`cs_last_error`] describes
//! what went wrong. Panics never cross the boundary.
//!
//! Field elements are `uint64_t` encodings `sum c_i p^i` of their
//! coefficient vectors in the handle's polynomial basis.
//!
//! # Safety
//!
//! Every pointer argument must be null or valid for the access implied by
//! its type; array arguments must hold at least the stated number of
//! elements. Null is reported as `CS_STATUS_NULL_POINTER`. A handle must
//! not be used after [`cs_field_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use charsum::character::{char_eval, CharIndex, RingCtx, RingElem};
use charsum::cubic::{self, CubicForm};
use charsum::energy;
use charsum::field::DEFAULT_DLOG_BUDGET;
use charsum::sets::IntervalSpec;
use charsum::sums;
use charsum::weil;
use charsum::{Error, FieldCtx};

/// Status codes. `CS_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    BudgetExceeded = 3,
    Numerical = 4,
    MissingState = 5,
    Panic = 6,
}

/// Opaque field context with its discrete-log table.
pub struct CsField {
    ctx: FieldCtx,
    ring: RingCtx,
}

/// Energy computation route.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsEnergyMethod {
    Brute = 0,
    Spectral = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsSum {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub trivial_bound: f64,
    pub ratio: f64,
    pub restriction_trivial: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsWeil {
    pub sum_mag: f64,
    pub bound: f64,
    pub m: u64,
    pub dd: u64,
    pub admissible: bool,
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::Capacity { .. } => CsStatus::BudgetExceeded,
        Error::Numerical(_) => CsStatus::Numerical,
        Error::State(_) => CsStatus::MissingState,
        _ => CsStatus::InvalidInput,
    }
}

struct Null;

/// Runs `f`, turning errors and panics into status codes.
fn guard<F>(f: F) -> CsStatus
where
    F: FnOnce() -> Result<(), Result<Error, Null>>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CsStatus::Ok
        }
        Ok(Err(Ok(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Err(Null))) => {
            set_error("null pointer argument");
            CsStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            CsStatus::Panic
        }
    }
}

type FfiResult<T> = Result<T, Result<Error, Null>>;

fn lib<T>(r: charsum::Result<T>) -> FfiResult<T> {
    r.map_err(Ok)
}

unsafe fn field_ref<'a>(f: *const CsField) -> FfiResult<&'a CsField> {
    f.as_ref().ok_or(Err(Null))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or(Err(Null))
}

unsafe fn input_slice<'a>(p: *const u64, len: usize) -> FfiResult<&'a [u64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Err(Null));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn check_elem(f: &CsField, a: u64) -> FfiResult<u64> {
    if a >= f.ctx.size() {
        return Err(Ok(Error::Context(format!("encoding {a} outside F_{}", f.ctx.size()))));
    }
    Ok(a)
}

/// Message for the last failing call on this thread; empty after success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    static VERSION: &CStr = c"charsum-ffi 0.1.0";
    VERSION.as_ptr()
}

/// Builds `F_{p^d}` with its discrete-log table. Free with [`cs_field_free`].
#[no_mangle]
pub unsafe extern "C" fn cs_field_new(p: u64, d: u32, out: *mut *mut CsField) -> CsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let ctx = lib(FieldCtx::new(p, d as usize, 0).and_then(|c| c.with_dlog(DEFAULT_DLOG_BUDGET)))?;
        let ring = lib(RingCtx::single(ctx.clone()))?;
        *out = Box::into_raw(Box::new(CsField { ctx, ring }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_field_free(field: *mut CsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `p^d`, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn cs_field_size(field: *const CsField) -> u64 {
    field.as_ref().map_or(0, |f| f.ctx.size())
}

/// Encoding of the generator used for discrete logs.
#[no_mangle]
pub unsafe extern "C" fn cs_field_generator(field: *const CsField, out: *mut u64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        *out_ref(out)? = f.ctx.generator_enc();
        Ok(())
    })
}

/// Copies the `d + 1` minimal-polynomial coefficients (constant first).
#[no_mangle]
pub unsafe extern "C" fn cs_field_min_poly(field: *const CsField, out: *mut u64, cap: usize) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let mp = f.ctx.min_poly();
        if cap < mp.len() {
            return Err(Ok(Error::Shape(format!("need room for {} coefficients", mp.len()))));
        }
        if out.is_null() {
            return Err(Err(Null));
        }
        slice::from_raw_parts_mut(out, mp.len()).copy_from_slice(mp);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_field_mul(field: *const CsField, a: u64, b: u64, out: *mut u64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let (a, b) = (check_elem(f, a)?, check_elem(f, b)?);
        *out_ref(out)? = f.ctx.mul_enc(a, b);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn cs_field_inv(field: *const CsField, a: u64, out: *mut u64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let a = check_elem(f, a)?;
        *out_ref(out)? = lib(f.ctx.inv_enc(a))?;
        Ok(())
    })
}

/// Norm to `F_p`.
#[no_mangle]
pub unsafe extern "C" fn cs_field_norm(field: *const CsField, a: u64, out: *mut u64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let a = check_elem(f, a)?;
        *out_ref(out)? = f.ctx.norm_enc(a);
        Ok(())
    })
}

/// `log_g(a)` for nonzero `a`.
#[no_mangle]
pub unsafe extern "C" fn cs_field_dlog(field: *const CsField, a: u64, out: *mut u64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let a = check_elem(f, a)?;
        let t = lib(f.ctx.require_dlog())?;
        *out_ref(out)? = t.log(a).ok_or(Ok(Error::DivisionByZero))?;
        Ok(())
    })
}

/// `chi_k(a) = e(k log_g(a) / (p^d - 1))`, zero at `a = 0`.
#[no_mangle]
pub unsafe extern "C" fn cs_char_eval(field: *const CsField, k: u64, a: u64, re: *mut f64, im: *mut f64) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let a = check_elem(f, a)?;
        let v = lib(char_eval(&CharIndex::single(k), &RingElem(vec![a]), &f.ring))?;
        *out_ref(re)? = v.re;
        *out_ref(im)? = v.im;
        Ok(())
    })
}

fn fill_sum(out: &mut CsSum, r: &sums::SumRecord) {
    *out = CsSum {
        re: r.re,
        im: r.im,
        magnitude: r.magnitude,
        trivial_bound: r.trivial_bound,
        ratio: r.ratio,
        restriction_trivial: r.params.restriction_trivial,
    };
}

/// `sum_{x in I, y in J} chi_k(x + omega y)` over a cubic extension.
#[no_mangle]
pub unsafe extern "C" fn cs_grid_sum(
    field: *const CsField,
    omega: u64,
    i_start: i64,
    i_len: u64,
    j_start: i64,
    j_len: u64,
    k: u64,
    budget: u64,
    out: *mut CsSum,
) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let out = out_ref(out)?;
        let r = lib(sums::grid_sum(
            &f.ctx,
            omega,
            IntervalSpec::new(i_start, i_len),
            IntervalSpec::new(j_start, j_len),
            &CharIndex::single(k),
            budget,
        ))?;
        fill_sum(out, &r);
        Ok(())
    })
}

/// `sum_{x in I, y in J} chi_k(x^3 + a x^2 y + b x y^2 + c y^3)` over `F_p`.
#[no_mangle]
pub unsafe extern "C" fn cs_cubic_form_sum(
    p: u64,
    a: i64,
    b: i64,
    c: i64,
    i_start: i64,
    i_len: u64,
    j_start: i64,
    j_len: u64,
    k: u64,
    budget: u64,
    out: *mut CsSum,
) -> CsStatus {
    guard(|| {
        let out = out_ref(out)?;
        let form = CubicForm::new(a, b, c, p);
        let r = lib(sums::cubic_form_sum(
            p,
            &form,
            IntervalSpec::new(i_start, i_len),
            IntervalSpec::new(j_start, j_len),
            &CharIndex::single(k),
            budget,
        ))?;
        fill_sum(out, &r);
        Ok(())
    })
}

/// Threshold exponent for degree `d >= 3`.
#[no_mangle]
pub unsafe extern "C" fn cs_rho_threshold(d: u32, out: *mut f64) -> CsStatus {
    guard(|| {
        *out_ref(out)? = lib(sums::rho_threshold(d))?;
        Ok(())
    })
}

/// Multiplicative energy `E(A, B)` of two encoding arrays.
#[no_mangle]
pub unsafe extern "C" fn cs_energy_pair(
    field: *const CsField,
    a: *const u64,
    a_len: usize,
    b: *const u64,
    b_len: usize,
    method: CsEnergyMethod,
    budget: u64,
    out: *mut u64,
) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let wrap = |s: &[u64]| -> FfiResult<Vec<RingElem>> {
            s.iter().map(|&x| check_elem(f, x).map(|x| RingElem(vec![x]))).collect()
        };
        let sets = [wrap(input_slice(a, a_len)?)?, wrap(input_slice(b, b_len)?)?];
        let out = out_ref(out)?;
        let e = match method {
            CsEnergyMethod::Brute => lib(energy::energy_brute(&sets, &f.ring, budget))?,
            CsEnergyMethod::Spectral => lib(energy::energy_spectral(&sets, &f.ring, budget))?,
        };
        *out = e.value;
        Ok(())
    })
}

/// Factorization case 1, 2 or 3 of a non-degenerate form mod `p > 3`.
#[no_mangle]
pub unsafe extern "C" fn cs_classify_form(p: u64, a: i64, b: i64, c: i64, case_out: *mut u8) -> CsStatus {
    guard(|| {
        let out = out_ref(case_out)?;
        let class = lib(cubic::classify(&CubicForm::new(a, b, c, p), p))?;
        *out = class.case.number();
        Ok(())
    })
}

/// Weil-bound check for `chi_k` and `f` (coefficients constant first, as
/// encodings in the handle's field).
#[no_mangle]
pub unsafe extern "C" fn cs_weil_field_check(
    field: *const CsField,
    k: u64,
    coeffs: *const u64,
    len: usize,
    out: *mut CsWeil,
) -> CsStatus {
    guard(|| {
        let f = field_ref(field)?;
        let poly = input_slice(coeffs, len)?;
        let out = out_ref(out)?;
        let w = lib(weil::weil_field_check(&f.ctx, &CharIndex::single(k), poly))?;
        *out = CsWeil {
            sum_mag: w.sum_mag,
            bound: w.bound,
            m: w.m,
            dd: w.dd,
            admissible: w.admissible,
            pass: w.pass,
        };
        Ok(())
    })
}
