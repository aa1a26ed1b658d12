//! C ABI over oltsp-core.
//!
//! Instances and outcomes are opaque heap handles, released with their
//! `_free` functions. Every fallible call returns an [`OltspStatus`]; the
//! message of the most recent failure on the calling thread is available
//! from [`oltsp_last_error`]. Strings returned through out-pointers are owned
//! by the caller and released with [`oltsp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oltsp_core::algorithms::policy_by_name;
use oltsp_core::engine::{simulate, Outcome, Scenario, SimError};
use oltsp_core::instance::{decode, encode, generate_random, GenParams, Instance, Variant};
use oltsp_core::metric::SpaceKind;
use oltsp_core::oracle::opt_makespan;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OltspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInstance = 4,
    UnknownName = 5,
    Incompatible = 6,
    Simulation = 7,
    Oracle = 8,
    Generate = 9,
    Panic = 10,
}

/// A request sequence in a metric space.
pub struct OltspInstance(Instance);

/// The result of one simulation.
pub struct OltspOutcome(Outcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: OltspStatus, msg: impl ToString) -> OltspStatus {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
    status
}

fn guard(f: impl FnOnce() -> OltspStatus) -> OltspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(OltspStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, OltspStatus> {
    if p.is_null() {
        return Err(fail(OltspStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(OltspStatus::InvalidUtf8, e))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oltsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn oltsp_status_name(status: OltspStatus) -> *const c_char {
    let s: &'static CStr = match status {
        OltspStatus::Ok => c"ok",
        OltspStatus::NullPointer => c"null pointer",
        OltspStatus::InvalidUtf8 => c"invalid utf-8",
        OltspStatus::Parse => c"parse error",
        OltspStatus::InvalidInstance => c"invalid instance",
        OltspStatus::UnknownName => c"unknown name",
        OltspStatus::Incompatible => c"incompatible policy",
        OltspStatus::Simulation => c"simulation error",
        OltspStatus::Oracle => c"oracle error",
        OltspStatus::Generate => c"generation error",
        OltspStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Parses and validates an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oltsp_instance_from_json(json: *const c_char, out: *mut *mut OltspInstance) -> OltspStatus {
    guard(|| {
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let inst = match decode(text) {
            Ok(i) => i,
            Err(e) => return fail(OltspStatus::Parse, e),
        };
        if let Some(v) = inst.validate().first() {
            return fail(OltspStatus::InvalidInstance, v);
        }
        *out = Box::into_raw(Box::new(OltspInstance(inst)));
        OltspStatus::Ok
    })
}

/// Random instance of `n` requests. `kind` is one of semiline, line, ring,
/// star, general; `variant` is open or closed.
///
/// # Safety
/// `kind` and `variant` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oltsp_instance_generate(
    kind: *const c_char,
    variant: *const c_char,
    n: usize,
    seed: u64,
    horizon: f64,
    out: *mut *mut OltspInstance,
) -> OltspStatus {
    guard(|| {
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        let (kind, variant) = match (read_str(kind), read_str(variant)) {
            (Ok(k), Ok(v)) => (k, v),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let Some(kind) = SpaceKind::from_name(kind) else {
            return fail(OltspStatus::UnknownName, format!("unknown space kind: {kind}"));
        };
        let Some(variant) = Variant::from_name(variant) else {
            return fail(OltspStatus::UnknownName, format!("unknown variant: {variant}"));
        };
        let params = GenParams::new(kind, n, seed).horizon(horizon).variant(variant);
        match generate_random(&params) {
            Ok(inst) => {
                *out = Box::into_raw(Box::new(OltspInstance(inst)));
                OltspStatus::Ok
            }
            Err(e) => fail(OltspStatus::Generate, e),
        }
    })
}

/// Number of requests, 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oltsp_instance_len(inst: *const OltspInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.len())
}

/// Canonical JSON text of the instance.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oltsp_instance_to_json(inst: *const OltspInstance, out: *mut *mut c_char) -> OltspStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(OltspStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        *out = into_c_string(encode(&inst.0));
        OltspStatus::Ok
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oltsp_instance_free(inst: *mut OltspInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Runs the named policy on the instance.
///
/// # Safety
/// `inst` must be a live handle, `policy` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn oltsp_simulate(
    inst: *const OltspInstance,
    policy: *const c_char,
    out: *mut *mut OltspOutcome,
) -> OltspStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(OltspStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        let name = match read_str(policy) {
            Ok(n) => n,
            Err(s) => return s,
        };
        let mut p = match policy_by_name(name) {
            Ok(p) => p,
            Err(e) => return fail(OltspStatus::UnknownName, e),
        };
        match simulate(Scenario::Fixed(&inst.0), p.as_mut()) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(OltspOutcome(o)));
                OltspStatus::Ok
            }
            Err(e @ SimError::Incompatible(_)) => fail(OltspStatus::Incompatible, e),
            Err(e) => fail(OltspStatus::Simulation, e),
        }
    })
}

/// Completion time, NaN for null.
///
/// # Safety
/// `outcome` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oltsp_outcome_completion(outcome: *const OltspOutcome) -> f64 {
    outcome.as_ref().map_or(f64::NAN, |o| o.0.completion)
}

/// Trajectory and service times as JSON.
///
/// # Safety
/// `outcome` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oltsp_outcome_to_json(outcome: *const OltspOutcome, out: *mut *mut c_char) -> OltspStatus {
    guard(|| {
        let Some(o) = outcome.as_ref() else {
            return fail(OltspStatus::NullPointer, "null outcome");
        };
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        *out = into_c_string(o.0.to_json());
        OltspStatus::Ok
    })
}

/// # Safety
/// `outcome` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oltsp_outcome_free(outcome: *mut OltspOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// Offline optimum makespan.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oltsp_opt_makespan(inst: *const OltspInstance, out: *mut f64) -> OltspStatus {
    guard(|| {
        let Some(inst) = inst.as_ref() else {
            return fail(OltspStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(OltspStatus::NullPointer, "null out pointer");
        }
        match opt_makespan(&inst.0) {
            Ok(r) => {
                *out = r.makespan;
                OltspStatus::Ok
            }
            Err(e) => fail(OltspStatus::Oracle, e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oltsp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
