//! C ABI for the locdiv library.
//!
//! Handles are opaque pointers created and destroyed by the paired
//! `_new`/`_free` functions; result payloads are UTF-8 JSON strings that the
//! caller must release with `locdiv_string_free`. Every entry point catches
//! panics and maps them to the `Internal` status; `locdiv_last_error_message`
//! returns a description of the most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;
use serde_json::json;

use locdiv::divisibility::{global_divide, local_divide_test, GlobalOutcome, LocalMethod};
use locdiv::elliptic::{parse_curve, parse_point, RationalCurve};
use locdiv::frobenius::{
    enumerate_set, estimate_density, frobenius_coordinate, PersistentSetSpec,
};
use locdiv::padic::{Membership, SetSpec};
use locdiv::pipeline::{run_check, DivisibilityReport};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocdivStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// The computed report is inconsistent.
    Inconsistent = 2,
    /// The oracle could not decide within its budget.
    Inconclusive = 3,
    /// Invalid input (parse or domain error).
    InvalidInput = 4,
    /// Internal error (a panic was caught).
    Internal = 5,
}

/// Opaque persistent-prime-set handle.
pub struct LocdivSet {
    spec: PersistentSetSpec,
}

/// Opaque elliptic-curve handle.
pub struct LocdivCurve {
    curve: RationalCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn fail(status: LocdivStatus, msg: &str) -> LocdivStatus {
    set_last_error(msg);
    status
}

fn error_status(_e: &locdiv::Error) -> LocdivStatus {
    LocdivStatus::InvalidInput
}

/// Message describing the most recent error on this thread. The pointer is
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn locdiv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn write_string(out: *mut *mut c_char, s: String) -> LocdivStatus {
    if out.is_null() {
        return fail(LocdivStatus::NullArgument, "output pointer is null");
    }
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            LocdivStatus::Ok
        }
        Err(_) => fail(LocdivStatus::Internal, "payload contained a NUL byte"),
    }
}

fn guarded(f: impl FnOnce() -> LocdivStatus) -> LocdivStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(LocdivStatus::Internal, "internal panic"),
    }
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn locdiv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a set record such as "p=5 rule=const:1 depth=8" into a handle.
#[no_mangle]
pub unsafe extern "C" fn locdiv_set_new(
    record: *const c_char,
    out: *mut *mut LocdivSet,
) -> LocdivStatus {
    guarded(|| {
        let Some(record) = read_str(record) else {
            return fail(LocdivStatus::NullArgument, "set record is null or not UTF-8");
        };
        if out.is_null() {
            return fail(LocdivStatus::NullArgument, "output pointer is null");
        }
        match SetSpec::parse_record(record) {
            Ok(spec) => {
                let handle = Box::new(LocdivSet {
                    spec: PersistentSetSpec::new(spec),
                });
                *out = Box::into_raw(handle);
                LocdivStatus::Ok
            }
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn locdiv_set_free(set: *mut LocdivSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Parse a curve description such as "a=0 b=1" into a handle.
#[no_mangle]
pub unsafe extern "C" fn locdiv_curve_new(
    desc: *const c_char,
    out: *mut *mut LocdivCurve,
) -> LocdivStatus {
    guarded(|| {
        let Some(desc) = read_str(desc) else {
            return fail(LocdivStatus::NullArgument, "curve is null or not UTF-8");
        };
        if out.is_null() {
            return fail(LocdivStatus::NullArgument, "output pointer is null");
        }
        match parse_curve(desc) {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(LocdivCurve { curve }));
                LocdivStatus::Ok
            }
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn locdiv_curve_free(curve: *mut LocdivCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Frobenius coordinate of a prime q, written to `out` as a decimal string.
#[no_mangle]
pub unsafe extern "C" fn locdiv_frobenius_coordinate(
    set: *const LocdivSet,
    q: u64,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(set) = set.as_ref() else {
            return fail(LocdivStatus::NullArgument, "set handle is null");
        };
        match frobenius_coordinate(q, &set.spec) {
            Ok(coord) => write_string(out, coord.to_string()),
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}

/// Density of the set among primes up to `limit`, as JSON.
#[no_mangle]
pub unsafe extern "C" fn locdiv_density_json(
    set: *const LocdivSet,
    limit: u64,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(set) = set.as_ref() else {
            return fail(LocdivStatus::NullArgument, "set handle is null");
        };
        let d = estimate_density(&set.spec, limit, None);
        write_string(out, d.to_json().to_string())
    })
}

/// Members of the set up to `limit`, as a JSON array.
#[no_mangle]
pub unsafe extern "C" fn locdiv_set_members_json(
    set: *const LocdivSet,
    limit: u64,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(set) = set.as_ref() else {
            return fail(LocdivStatus::NullArgument, "set handle is null");
        };
        let rows: Vec<_> = enumerate_set(&set.spec, limit)
            .iter()
            .map(|m| {
                json!({
                    "q": m.q,
                    "verdict": match m.verdict {
                        Membership::In => "in",
                        Membership::Out => "out",
                        Membership::Unknown => "unknown",
                    },
                    "coordinate": m.coordinate.as_ref().map(|c| c.to_string()),
                })
            })
            .collect();
        write_string(out, json!(rows).to_string())
    })
}

/// Local p^n-divisibility of a point at a good odd prime l, as JSON
/// {divisible, method, witness?}.
#[no_mangle]
pub unsafe extern "C" fn locdiv_local_test_json(
    curve: *const LocdivCurve,
    point: *const c_char,
    p: u64,
    n: u32,
    ell: u64,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(curve) = curve.as_ref() else {
            return fail(LocdivStatus::NullArgument, "curve handle is null");
        };
        let Some(point) = read_str(point) else {
            return fail(LocdivStatus::NullArgument, "point is null or not UTF-8");
        };
        let point = match parse_point(point) {
            Ok(pt) => pt,
            Err(e) => return fail(error_status(&e), &e.to_string()),
        };
        match local_divide_test(&curve.curve, &point, p, n, ell, LocalMethod::Structural) {
            Ok(v) => write_string(
                out,
                json!({
                    "divisible": v.divisible,
                    "method": v.method.name(),
                    "witness": v.witness.map(|w| w.to_string()),
                })
                .to_string(),
            ),
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}

/// Exact global p^n-divisibility, as JSON {outcome, witness?}. Returns
/// `Inconclusive` when the oracle's search budget is exhausted.
#[no_mangle]
pub unsafe extern "C" fn locdiv_global_test_json(
    curve: *const LocdivCurve,
    point: *const c_char,
    p: u64,
    n: u32,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(curve) = curve.as_ref() else {
            return fail(LocdivStatus::NullArgument, "curve handle is null");
        };
        let Some(point) = read_str(point) else {
            return fail(LocdivStatus::NullArgument, "point is null or not UTF-8");
        };
        let point = match parse_point(point) {
            Ok(pt) => pt,
            Err(e) => return fail(error_status(&e), &e.to_string()),
        };
        match global_divide(&curve.curve, &point, p, n) {
            Ok(outcome) => {
                let label = DivisibilityReport::global_outcome_label(&outcome);
                let witness = match &outcome {
                    GlobalOutcome::Divisible(q) => Some(q.to_string()),
                    _ => None,
                };
                let status = write_string(
                    out,
                    json!({"outcome": label, "witness": witness}).to_string(),
                );
                if status != LocdivStatus::Ok {
                    return status;
                }
                if matches!(outcome, GlobalOutcome::Inconclusive) {
                    LocdivStatus::Inconclusive
                } else {
                    LocdivStatus::Ok
                }
            }
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}

/// Full local-global check along the set, as a JSON report. Returns
/// `Inconsistent` or `Inconclusive` alongside the report when applicable.
#[no_mangle]
pub unsafe extern "C" fn locdiv_check_json(
    curve: *const LocdivCurve,
    point: *const c_char,
    p: u64,
    n: u32,
    set: *const LocdivSet,
    limit: u64,
    sample: usize,
    out: *mut *mut c_char,
) -> LocdivStatus {
    guarded(|| {
        let Some(curve) = curve.as_ref() else {
            return fail(LocdivStatus::NullArgument, "curve handle is null");
        };
        let Some(set) = set.as_ref() else {
            return fail(LocdivStatus::NullArgument, "set handle is null");
        };
        let Some(point) = read_str(point) else {
            return fail(LocdivStatus::NullArgument, "point is null or not UTF-8");
        };
        let point = match parse_point(point) {
            Ok(pt) => pt,
            Err(e) => return fail(error_status(&e), &e.to_string()),
        };
        let sample = if sample == 0 { None } else { Some(sample) };
        match run_check(&curve.curve, &point, p, n, &set.spec, limit, sample) {
            Ok(report) => {
                let status = write_string(out, serde_json::to_string(&report).unwrap());
                if status != LocdivStatus::Ok {
                    return status;
                }
                if !report.consistent {
                    LocdivStatus::Inconsistent
                } else if report.global == "inconclusive" {
                    LocdivStatus::Inconclusive
                } else {
                    LocdivStatus::Ok
                }
            }
            Err(e) => fail(error_status(&e), &e.to_string()),
        }
    })
}
