//! C ABI over the `stabent` library.
//!
//! States are opaque `StabentState` handles created by [`stabent_state_parse`]
//! and released with [`stabent_state_free`]. Every fallible call returns a
//! [`StabentStatus`]; on failure [`stabent_last_error`] describes the cause.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stabent::cli::{parse_state, serialize_state};
use stabent::extraction::{decompose_tripartite, extract_ghz, tripartite_signature, verify_decomposition, ExtractionError};
use stabent::stabilizer::{subgroup_profile, subset_entropy, PartitionedStabilizerState};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabentStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The state is well formed but the operation does not apply to it
    /// (wrong party count, qubit out of range).
    Unsupported = 4,
    Internal = 5,
}

/// Opaque multipartite stabilizer state.
pub struct StabentState {
    inner: PartitionedStabilizerState,
}

/// Tripartite normal form: `zeros` per party, EPR counts `a` (B-C), `b` (A-C),
/// `c` (A-B) and GHZ count `p`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StabentCounts {
    pub zeros: [usize; 3],
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub p: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), (StabentStatus, String)>) -> StabentStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StabentStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside stabent");
            StabentStatus::Internal
        }
    }
}

fn null(what: &str) -> (StabentStatus, String) {
    (StabentStatus::NullArgument, format!("{what} is null"))
}

fn extraction_failure(e: ExtractionError) -> (StabentStatus, String) {
    let status = match e {
        ExtractionError::Invariant(_) => StabentStatus::Internal,
        _ => StabentStatus::Unsupported,
    };
    (status, e.to_string())
}

unsafe fn state_ref<'a>(state: *const StabentState) -> Result<&'a PartitionedStabilizerState, (StabentStatus, String)> {
    state.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next stabent call on the same thread.
#[no_mangle]
pub extern "C" fn stabent_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stabent_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a state file. On success `*out` owns a new handle.
#[no_mangle]
pub unsafe extern "C" fn stabent_state_parse(text: *const c_char, out: *mut *mut StabentState) -> StabentStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (StabentStatus::InvalidUtf8, e.to_string()))?;
        let inner = parse_state(text).map_err(|e| (StabentStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(StabentState { inner }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn stabent_state_free(state: *mut StabentState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

#[no_mangle]
pub unsafe extern "C" fn stabent_state_num_qubits(state: *const StabentState, out: *mut usize) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.num_qubits();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn stabent_state_num_parties(state: *const StabentState, out: *mut usize) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.partition().num_parties();
        Ok(())
    })
}

/// Serialize to the state file format. Free the result with [`stabent_string_free`].
#[no_mangle]
pub unsafe extern "C" fn stabent_state_to_string(state: *const StabentState, out: *mut *mut c_char) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        let text = CString::new(serialize_state(s)).map_err(|e| (StabentStatus::Internal, e.to_string()))?;
        *slot = text.into_raw();
        Ok(())
    })
}

/// Free a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn stabent_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// GHZ yield `n - dim S_loc`.
#[no_mangle]
pub unsafe extern "C" fn stabent_delta(state: *const StabentState, out: *mut usize) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        *out.as_mut().ok_or_else(|| null("out"))? = subgroup_profile(s).delta;
        Ok(())
    })
}

/// Entropy (in bits) of the qubits `qubits[0..len]` (0-based).
#[no_mangle]
pub unsafe extern "C" fn stabent_subset_entropy(
    state: *const StabentState,
    qubits: *const usize,
    len: usize,
    out: *mut usize,
) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        let subset: &[usize] = if len == 0 {
            &[]
        } else if qubits.is_null() {
            return Err(null("qubits"));
        } else {
            std::slice::from_raw_parts(qubits, len)
        };
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        *slot = subset_entropy(s, subset).map_err(|e| (StabentStatus::Unsupported, e.to_string()))?;
        Ok(())
    })
}

/// Number of GHZ states extractable by local unitaries (at least three parties).
/// The extraction circuits are verified before returning.
#[no_mangle]
pub unsafe extern "C" fn stabent_ghz_yield(state: *const StabentState, out: *mut usize) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        let (p, report, _) = extract_ghz(s).map_err(extraction_failure)?;
        if !verify_decomposition(s, &report).map_err(extraction_failure)? {
            return Err((StabentStatus::Internal, "extraction circuits failed verification".into()));
        }
        *slot = p;
        Ok(())
    })
}

/// Normal form of a three-party state, checked against synthesized circuits.
#[no_mangle]
pub unsafe extern "C" fn stabent_decompose3(state: *const StabentState, out: *mut StabentCounts) -> StabentStatus {
    guard(|| {
        let s = state_ref(state)?;
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        let (zeros, a, b, c, p) = tripartite_signature(s).map_err(extraction_failure)?;
        let report = decompose_tripartite(s).map_err(extraction_failure)?;
        if !verify_decomposition(s, &report).map_err(extraction_failure)? {
            return Err((StabentStatus::Internal, "decomposition circuits failed verification".into()));
        }
        *slot = StabentCounts { zeros: [zeros[0], zeros[1], zeros[2]], a, b, c, p };
        Ok(())
    })
}

/// Whether two three-party states are related by local Clifford unitaries.
#[no_mangle]
pub unsafe extern "C" fn stabent_equivalent3(
    first: *const StabentState,
    second: *const StabentState,
    out: *mut bool,
) -> StabentStatus {
    guard(|| {
        let (s1, s2) = (state_ref(first)?, state_ref(second)?);
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        let sig1 = tripartite_signature(s1).map_err(extraction_failure)?;
        let sig2 = tripartite_signature(s2).map_err(extraction_failure)?;
        *slot = sig1 == sig2;
        Ok(())
    })
}
