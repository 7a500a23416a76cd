//! C ABI over `invquot`.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `_free`. Every fallible call returns an `IqStatus`; on failure the message
//! is available from `iq_last_error` on the same thread. Strings returned
//! through out-parameters are released with `iq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use invquot::cli::{self, parse_spec};
use invquot::group::Representation;
use invquot::invariants::{generators, InvariantBasis};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ComputeError = 4,
    Panic = 5,
}

/// A closed finite matrix group.
pub struct IqRepresentation(Representation);

/// Generators of an invariant ring.
pub struct IqInvariantBasis(InvariantBasis);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior nul"));
}

fn guard(f: impl FnOnce() -> Result<(), (IqStatus, String)>) -> IqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IqStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IqStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (IqStatus, String)> {
    if p.is_null() {
        return Err((IqStatus::NullPointer, format!("{} is null", what)));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (IqStatus::InvalidUtf8, format!("{} is not UTF-8", what)))
}

fn out_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn null_out<T>(out: *mut T, what: &str) -> Result<(), (IqStatus, String)> {
    if out.is_null() {
        Err((IqStatus::NullPointer, format!("{} is null", what)))
    } else {
        Ok(())
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn iq_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn iq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a spec JSON document and closes the group.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_representation_from_json(
    json: *const c_char,
    out: *mut *mut IqRepresentation,
) -> IqStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let rep = parse_spec(text).map_err(|e| (IqStatus::InvalidInput, e.to_string()))?;
        *out = Box::into_raw(Box::new(IqRepresentation(rep)));
        Ok(())
    })
}

/// # Safety
/// `rep` must come from `iq_representation_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iq_representation_free(rep: *mut IqRepresentation) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// # Safety
/// `rep` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_representation_order(rep: *const IqRepresentation, out: *mut usize) -> IqStatus {
    guard(|| {
        null_out(out, "out")?;
        let rep = rep.as_ref().ok_or((IqStatus::NullPointer, "rep is null".to_string()))?;
        *out = rep.0.order();
        Ok(())
    })
}

/// Computes generators of the invariant ring; `cap == 0` means |G|.
///
/// # Safety
/// `rep` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_invariants_compute(
    rep: *const IqRepresentation,
    cap: u32,
    out: *mut *mut IqInvariantBasis,
) -> IqStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let rep = rep.as_ref().ok_or((IqStatus::NullPointer, "rep is null".to_string()))?;
        let cap = (cap > 0).then_some(cap as usize);
        let basis = generators(&rep.0, cap).map_err(|e| (IqStatus::ComputeError, e.to_string()))?;
        *out = Box::into_raw(Box::new(IqInvariantBasis(basis)));
        Ok(())
    })
}

/// # Safety
/// `basis` must come from `iq_invariants_compute` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iq_invariants_free(basis: *mut IqInvariantBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Number of generators.
///
/// # Safety
/// `basis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_invariants_len(basis: *const IqInvariantBasis, out: *mut usize) -> IqStatus {
    guard(|| {
        null_out(out, "out")?;
        let b = basis.as_ref().ok_or((IqStatus::NullPointer, "basis is null".to_string()))?;
        *out = b.0.len();
        Ok(())
    })
}

/// Copies up to `len` generator degrees into `degrees`.
///
/// # Safety
/// `degrees` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn iq_invariants_degrees(
    basis: *const IqInvariantBasis,
    degrees: *mut u32,
    len: usize,
) -> IqStatus {
    guard(|| {
        let b = basis.as_ref().ok_or((IqStatus::NullPointer, "basis is null".to_string()))?;
        let d = b.0.degrees();
        if d.len() > len {
            return Err((IqStatus::InvalidInput, format!("buffer holds {} degrees, need {}", len, d.len())));
        }
        if !d.is_empty() {
            null_out(degrees, "degrees")?;
            ptr::copy_nonoverlapping(d.as_ptr(), degrees, d.len());
        }
        Ok(())
    })
}

/// Generators as JSON: {"degrees": [...], "generators": [[{"coeff", "exps"}]]}.
///
/// # Safety
/// `basis` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn iq_invariants_to_json(basis: *const IqInvariantBasis, out: *mut *mut c_char) -> IqStatus {
    guard(|| {
        null_out(out, "out")?;
        *out = ptr::null_mut();
        let b = basis.as_ref().ok_or((IqStatus::NullPointer, "basis is null".to_string()))?;
        let v = serde_json::json!({
            "degrees": b.0.degrees(),
            "generators": b.0.gens().iter().map(|p| p.to_json_terms()).collect::<Vec<_>>(),
        });
        *out = out_string(v.to_string());
        Ok(())
    })
}

/// Runs a command-line invocation given as a JSON array of arguments
/// (without the program name). Writes the exit code, and the report or the
/// diagnostic text.
///
/// # Safety
/// `args_json` must be a valid string; `out_code` and `out_text` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn iq_run(
    args_json: *const c_char,
    out_code: *mut i32,
    out_text: *mut *mut c_char,
) -> IqStatus {
    guard(|| {
        null_out(out_code, "out_code")?;
        null_out(out_text, "out_text")?;
        *out_text = ptr::null_mut();
        let text = read_str(args_json, "args_json")?;
        let args: Vec<String> = serde_json::from_str(text)
            .map_err(|e| (IqStatus::InvalidInput, format!("args_json: {}", e)))?;
        let outcome = cli::run(std::iter::once("invquot".to_string()).chain(args));
        *out_code = outcome.code;
        *out_text = out_string(if outcome.stdout.is_empty() { outcome.stderr } else { outcome.stdout });
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn iq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
