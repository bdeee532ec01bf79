//! C ABI over `tauconv`.
//!
//! Groups and functions are opaque handles released with their `_free`
//! function. Every fallible call returns a [`TcStatus`]; on failure the
//! message is available from [`tc_last_error`] on the same thread.
//! Function values are complex doubles passed as split real and
//! imaginary arrays of length `|G|`, ordered `h * |K| + k`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use num_complex::Complex64;
use tauconv::algebra;
use tauconv::error::Error;
use tauconv::function::GFunction;
use tauconv::group::SemidirectGroup;
use tauconv::io;
use tauconv::norm::Exponent;
use tauconv::scalar::GaussQ;
use tauconv::verify::{self, SuiteConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidGroup = 4,
    Shape = 5,
    GroupMismatch = 6,
    InvalidArgument = 7,
    /// The library panicked; the handle arguments are left untouched.
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TcOp {
    Rconv = 0,
    Lconv = 1,
    Tconv = 2,
    Standard = 3,
}

/// A validated semidirect product `H ⋉ K`.
pub struct TcGroup {
    inner: Arc<SemidirectGroup>,
}

/// A complex-valued function on a group.
pub struct TcFunction {
    inner: GFunction<Complex64>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::Axiom(_) | Error::InvalidAction(_) | Error::Unsupported(_) => TcStatus::InvalidGroup,
        Error::Structural(_) | Error::OutOfRange { .. } => TcStatus::Shape,
        Error::GroupMismatch => TcStatus::GroupMismatch,
        Error::Json(_) | Error::Format(_) => TcStatus::Parse,
        _ => TcStatus::InvalidArgument,
    }
}

fn fail(status: TcStatus, msg: impl Into<String>) -> TcStatus {
    set_error(msg);
    status
}

/// Runs `body`, converting errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), TcStatus>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(TcStatus::Internal, "internal panic"),
    }
}

fn lib(e: Error) -> TcStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, TcStatus> {
    if s.is_null() {
        return Err(fail(TcStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(TcStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, TcStatus> {
    p.as_ref().ok_or_else(|| fail(TcStatus::NullPointer, "null handle"))
}

unsafe fn out_ptr<T>(p: *mut *mut T) -> Result<(), TcStatus> {
    if p.is_null() {
        return Err(fail(TcStatus::NullPointer, "null output pointer"));
    }
    *p = ptr::null_mut();
    Ok(())
}

fn boxed_fn(f: GFunction<Complex64>) -> *mut TcFunction {
    Box::into_raw(Box::new(TcFunction { inner: f }))
}

/// Message of the last failed call on this thread. Valid until the next
/// call into the library from the same thread; never null.
#[no_mangle]
pub extern "C" fn tc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds and validates a group from the JSON body of a group file.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_group_from_json(json: *const c_char, out: *mut *mut TcGroup) -> TcStatus {
    guard(|| {
        out_ptr(out)?;
        let text = str_arg(json)?;
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| fail(TcStatus::Parse, e.to_string()))?;
        let spec = io::parse_group_spec(&value).map_err(lib)?;
        let group = spec.build().map_err(lib)?;
        if let Some(v) = group.validate().violation {
            return Err(fail(TcStatus::InvalidGroup, v.to_string()));
        }
        *out = Box::into_raw(Box::new(TcGroup {
            inner: Arc::new(group),
        }));
        Ok(())
    })
}

/// # Safety
/// `group` must come from [`tc_group_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_group_free(group: *mut TcGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// `|G|`, or 0 for a null handle.
///
/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_group_order(group: *const TcGroup) -> usize {
    group.as_ref().map_or(0, |g| g.inner.order())
}

/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_group_h_order(group: *const TcGroup) -> usize {
    group.as_ref().map_or(0, |g| g.inner.h().order())
}

/// # Safety
/// `group` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_group_k_order(group: *const TcGroup) -> usize {
    group.as_ref().map_or(0, |g| g.inner.k().order())
}

/// Creates a function from `len = |G|` values; `im` may be null for real data.
///
/// # Safety
/// `re` (and `im` unless null) must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_function_new(
    group: *const TcGroup,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut TcFunction,
) -> TcStatus {
    guard(|| {
        out_ptr(out)?;
        let g = handle(group)?;
        if re.is_null() {
            return Err(fail(TcStatus::NullPointer, "null value array"));
        }
        if len != g.inner.order() {
            return Err(fail(
                TcStatus::Shape,
                format!("expected {} values, got {len}", g.inner.order()),
            ));
        }
        let re = std::slice::from_raw_parts(re, len);
        let values = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        let f = GFunction::from_values(&g.inner, values).map_err(lib)?;
        *out = boxed_fn(f);
        Ok(())
    })
}

/// Number of values, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tc_function_len(f: *const TcFunction) -> usize {
    f.as_ref().map_or(0, |f| f.inner.values().len())
}

/// Copies the values out; `im` may be null.
///
/// # Safety
/// `re` (and `im` unless null) must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_function_values(f: *const TcFunction, re: *mut f64, im: *mut f64, len: usize) -> TcStatus {
    guard(|| {
        let f = handle(f)?;
        if re.is_null() {
            return Err(fail(TcStatus::NullPointer, "null value array"));
        }
        let vals = f.inner.values();
        if len != vals.len() {
            return Err(fail(TcStatus::Shape, format!("expected {} values, got {len}", vals.len())));
        }
        for (i, v) in vals.iter().enumerate() {
            *re.add(i) = v.re;
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tc_function_free(f: *mut TcFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `out = op(f, g)`. Both operands must live on the same group.
///
/// # Safety
/// Handles must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_convolve(
    op: TcOp,
    f: *const TcFunction,
    g: *const TcFunction,
    out: *mut *mut TcFunction,
) -> TcStatus {
    guard(|| {
        out_ptr(out)?;
        let (f, g) = (&handle(f)?.inner, &handle(g)?.inner);
        let r = match op {
            TcOp::Rconv => algebra::rconv(f, g),
            TcOp::Lconv => algebra::lconv(f, g),
            TcOp::Tconv => algebra::tconv(f, g),
            TcOp::Standard => algebra::standard_conv_g(f, g),
        }
        .map_err(lib)?;
        *out = boxed_fn(r);
        Ok(())
    })
}

/// The τ-involution of `f`.
///
/// # Safety
/// `f` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_involution(f: *const TcFunction, out: *mut *mut TcFunction) -> TcStatus {
    guard(|| {
        out_ptr(out)?;
        *out = boxed_fn(algebra::involution_tau(&handle(f)?.inner));
        Ok(())
    })
}

/// Writes the projection `f̃` to K into `len = |K|` doubles; `im` may be null.
///
/// # Safety
/// `re` (and `im` unless null) must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_tilde(f: *const TcFunction, re: *mut f64, im: *mut f64, len: usize) -> TcStatus {
    guard(|| {
        let f = handle(f)?;
        if re.is_null() {
            return Err(fail(TcStatus::NullPointer, "null value array"));
        }
        let t = algebra::tilde(&f.inner);
        if len != t.values().len() {
            return Err(fail(TcStatus::Shape, format!("expected {} values, got {len}", t.values().len())));
        }
        for (i, v) in t.values().iter().enumerate() {
            *re.add(i) = v.re;
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        Ok(())
    })
}

/// `‖f‖_p` for `p ≥ 1`; pass `INFINITY` for the max norm.
///
/// # Safety
/// `f` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tc_norm(f: *const TcFunction, p: f64, out: *mut f64) -> TcStatus {
    guard(|| {
        let f = handle(f)?;
        if out.is_null() {
            return Err(fail(TcStatus::NullPointer, "null output pointer"));
        }
        let p = if p == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::new(p).map_err(lib)?
        };
        *out = algebra::norm(&f.inner, p).value;
        Ok(())
    })
}

/// Runs the verification suite and returns the report as JSON, to be
/// released with [`tc_string_free`]. `exact != 0` selects the exact backend.
/// `*passed` is set to 1 when no check failed.
///
/// # Safety
/// `group` must be live; `out_json` and `passed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tc_verify_json(
    group: *const TcGroup,
    seed: u64,
    trials: usize,
    exact: i32,
    out_json: *mut *mut c_char,
    passed: *mut i32,
) -> TcStatus {
    guard(|| {
        out_ptr(out_json)?;
        if passed.is_null() {
            return Err(fail(TcStatus::NullPointer, "null output pointer"));
        }
        let g = handle(group)?;
        let cfg = SuiteConfig {
            seed,
            trials,
            spec: None,
        };
        let report = if exact != 0 {
            verify::run_suite::<GaussQ>(&g.inner, &cfg)
        } else {
            verify::run_suite::<Complex64>(&g.inner, &cfg)
        };
        let text = CString::new(report.to_json().to_string()).map_err(|_| fail(TcStatus::Internal, "NUL in report"))?;
        *passed = i32::from(report.passed);
        *out_json = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
