//! C ABI over `clusterbody`.
//!
//! Objects are opaque handles created by the `cb_*_from_json` and computing functions
//! and released with the matching `cb_*_free`. Every fallible call returns a status
//! code (`CB_OK` on success) and writes its result through an out-pointer. The
//! message of the last failure on the calling thread is available from
//! `cb_last_error`. Strings returned by the library must be released with
//! `cb_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clusterbody::grassmannian::{verify_val_gv, GrData};
use clusterbody::io;
use clusterbody::lattice::{Int, IntVec};
use clusterbody::laurent::{transport, Flavor, LaurentPolynomial};
use clusterbody::scattering::{self, ScatteringDiagram};
use clusterbody::seed::{build_principal, Seed};
use clusterbody::Error;

pub const CB_OK: i32 = 0;
/// A required pointer argument was null.
pub const CB_ERR_NULL: i32 = -1;
/// A string argument was not valid UTF-8.
pub const CB_ERR_UTF8: i32 = -2;
/// The library panicked; this is a bug.
pub const CB_ERR_PANIC: i32 = -3;

// Domain errors; the same numbers as `clusterbody::Error::numeric`.
pub const CB_ERR_RANK: i32 = 1;
pub const CB_ERR_FROZEN_INDEX: i32 = 2;
pub const CB_ERR_EMPTY_INPUT: i32 = 3;
pub const CB_ERR_NOT_LAURENT: i32 = 4;
pub const CB_ERR_NOT_IN_SPAN: i32 = 5;
pub const CB_ERR_NOT_POSITIVE: i32 = 6;
pub const CB_ERR_UNBOUNDED: i32 = 7;
pub const CB_ERR_NON_GENERIC_ENDPOINT: i32 = 8;
pub const CB_ERR_TRUNCATED: i32 = 9;
pub const CB_ERR_NOT_IN_IMAGE: i32 = 10;
pub const CB_ERR_RANK_UNSUPPORTED: i32 = 11;
pub const CB_ERR_SINGULAR_PATH: i32 = 12;
pub const CB_ERR_BAD_PARAMS: i32 = 13;
pub const CB_ERR_INVALID_INPUT: i32 = 14;
pub const CB_ERR_INCONSISTENT: i32 = 15;

pub const CB_FLAVOR_A: i32 = 0;
pub const CB_FLAVOR_X: i32 = 1;

pub struct CbSeed(Seed);

pub struct CbLaurent(LaurentPolynomial);

pub struct CbDiagram(ScatteringDiagram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Domain(Error),
    Null,
    Utf8,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Domain(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CB_OK,
        Ok(Err(Fail::Domain(e))) => {
            set_error(format!("{}: {e}", e.code()));
            e.numeric()
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            CB_ERR_NULL
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8".into());
            CB_ERR_UTF8
        }
        Err(_) => {
            set_error("internal panic".into());
            CB_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = CString::new(s).map_err(|_| Fail::Utf8)?.into_raw();
    Ok(())
}

unsafe fn int_slice(ptr: *const i64, len: usize) -> Result<IntVec, Fail> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ptr.is_null() {
        return Err(Fail::Null);
    }
    Ok(std::slice::from_raw_parts(ptr, len)
        .iter()
        .map(|&x| Int::from(x))
        .collect())
}

/// Message of the last failed call on this thread, or null. Release with
/// `cb_string_free`.
#[no_mangle]
pub extern "C" fn cb_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Seeds

/// Parse a seed from JSON (`n`, `unfrozen`, `lambda` or `eps`, `d`, optional `word`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_seed_from_json(json: *const c_char, out: *mut *mut CbSeed) -> i32 {
    guard(|| {
        let v = io::parse_json(str_arg(json)?)?;
        put(out, CbSeed(io::seed_from_json(&v)?))
    })
}

/// Mutate at an unfrozen index (0-based). The result shares fixed data with `seed`.
///
/// # Safety
/// `seed` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_seed_mutate(
    seed: *const CbSeed,
    k: usize,
    out: *mut *mut CbSeed,
) -> i32 {
    guard(|| {
        let s = obj(seed)?;
        put(out, CbSeed(s.0.mutate(k)?))
    })
}

/// # Safety
/// `seed` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_seed_to_json(seed: *const CbSeed, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let s = obj(seed)?;
        put_string(out, io::to_pretty(&io::seed_to_json(&s.0)))
    })
}

/// # Safety
/// `seed` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_seed_free(seed: *mut CbSeed) {
    if !seed.is_null() {
        drop(Box::from_raw(seed));
    }
}

// ---------------------------------------------------------------------------
// Laurent polynomials

/// Parse `[{"exp": [...], "coef": "p/q"}, ...]` in `nvars` variables.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_from_json(
    json: *const c_char,
    nvars: usize,
    out: *mut *mut CbLaurent,
) -> i32 {
    guard(|| {
        let v = io::parse_json(str_arg(json)?)?;
        put(out, CbLaurent(io::laurent_from_json(&v, nvars)?))
    })
}

/// Rewrite `f` from the chart of `from` into the chart of `to`; `flavor` is
/// `CB_FLAVOR_A` or `CB_FLAVOR_X`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_transport(
    f: *const CbLaurent,
    from: *const CbSeed,
    to: *const CbSeed,
    flavor: i32,
    out: *mut *mut CbLaurent,
) -> i32 {
    guard(|| {
        let flavor = match flavor {
            CB_FLAVOR_A => Flavor::A,
            CB_FLAVOR_X => Flavor::X,
            other => return Err(Error::BadParams(format!("unknown flavor {other}")).into()),
        };
        let g = transport(&obj(f)?.0, &obj(from)?.0, &obj(to)?.0, flavor)?;
        put(out, CbLaurent(g))
    })
}

/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_equal(a: *const CbLaurent, b: *const CbLaurent) -> bool {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => a.0 == b.0,
        _ => false,
    }
}

/// Number of terms, or 0 for a null handle.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_len(f: *const CbLaurent) -> usize {
    f.as_ref().map_or(0, |f| f.0.len())
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_to_json(f: *const CbLaurent, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, io::to_pretty(&io::laurent_to_json(&obj(f)?.0))))
}

/// # Safety
/// `f` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_laurent_free(f: *mut CbLaurent) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

// ---------------------------------------------------------------------------
// Scattering diagrams and theta functions

/// Consistent completion, to `order`, of the initial diagram of `seed`'s fixed data
/// (two mutable directions). With `principal`, the principal-coefficient data is used.
///
/// # Safety
/// `seed` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_diagram_complete(
    seed: *const CbSeed,
    order: usize,
    principal: bool,
    out: *mut *mut CbDiagram,
) -> i32 {
    guard(|| {
        let fd = obj(seed)?.0.fixed();
        let init = if principal {
            ScatteringDiagram::initial(&build_principal(fd))?
        } else {
            ScatteringDiagram::initial(fd)?
        };
        put(out, CbDiagram(scattering::complete_rank2(&init, order)?))
    })
}

/// Whether the loop around the origin is trivial to `order`; writes 1 or 0.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_diagram_is_consistent(
    d: *const CbDiagram,
    order: usize,
    out: *mut bool,
) -> i32 {
    guard(|| {
        let c = scattering::is_consistent(&obj(d)?.0, order)?;
        if out.is_null() {
            return Err(Fail::Null);
        }
        *out = c;
        Ok(())
    })
}

/// Theta function for the exponent `m[0..len]` at a generic point of the positive
/// chamber, summing broken lines of degree at most `bound`. Fails with the
/// `Truncated` code when the sum is not exact at that bound.
///
/// # Safety
/// `d` must be a live handle; `m` must point to `len` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_theta(
    d: *const CbDiagram,
    m: *const i64,
    len: usize,
    bound: usize,
    out: *mut *mut CbLaurent,
) -> i32 {
    guard(|| {
        let d = &obj(d)?.0;
        let m = int_slice(m, len)?;
        let t = scattering::theta_function(d, &m, &scattering::default_basepoint(d), bound)?;
        if !t.exact {
            return Err(Error::Truncated(bound).into());
        }
        put(out, CbLaurent(t.poly))
    })
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_diagram_to_json(d: *const CbDiagram, out: *mut *mut c_char) -> i32 {
    guard(|| put_string(out, io::to_pretty(&io::diagram_to_json(&obj(d)?.0))))
}

/// # Safety
/// `d` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn cb_diagram_free(d: *mut CbDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

// ---------------------------------------------------------------------------
// Grassmannians and the acceptance suite

/// Check the valuation/g-vector identity for every Plücker index of the grid with
/// `k` columns; writes the number of indices and how many passed.
///
/// # Safety
/// `total` and `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_gr_verify(
    k: usize,
    n: usize,
    total: *mut usize,
    passed: *mut usize,
) -> i32 {
    guard(|| {
        let rep = verify_val_gv(&GrData::new(k, n)?);
        if total.is_null() || passed.is_null() {
            return Err(Fail::Null);
        }
        *total = rep.entries.len();
        *passed = rep.passed();
        Ok(())
    })
}

/// Run one acceptance criterion and write its JSON report.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cb_accept_run(id: u32, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let rep = clusterbody::accept::run(id)?;
        put_string(out, io::to_pretty(&rep.to_json()))
    })
}
