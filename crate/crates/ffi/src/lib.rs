//! C ABI bindings for the core library: orbit handles with operation
//! evaluation, RICH, and network verification/DOT export. Every entry point
//! is panic-safe and reports through `GisStatus`; strings cross the boundary
//! as NUL-terminated UTF-8.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gis_core::contextual::{ti_orbit, TiOrbit};
use gis_core::netio::{
    export_dot, parse_network, verify_network, DotStyle, OpExpr, ResolvedSystem,
};
use gis_core::pcmath::{Modulus, PcSegment};
use gis_core::serial::rich;
use gis_core::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GisStatus {
    /// Success.
    Ok = 0,
    /// A network document parsed but failed verification.
    VerificationFailed = 1,
    /// A pointer argument was null or a value was malformed.
    InvalidArgument = 2,
    /// The inputs were well-formed but mathematically inadmissible
    /// (degenerate seed, segment outside an orbit, modulus mismatch).
    DomainError = 3,
    /// Text input could not be parsed.
    ParseError = 4,
    /// The output buffer is too small.
    BufferTooSmall = 5,
    /// An internal invariant failed; this is a library bug.
    InternalError = 6,
}

fn status_of(e: &Error) -> GisStatus {
    match e {
        Error::Parse { .. } => GisStatus::ParseError,
        Error::InvalidModulus(_) | Error::InvalidArgument(_) | Error::EmptySegment => {
            GisStatus::InvalidArgument
        }
        Error::Internal(_) => GisStatus::InternalError,
        _ => GisStatus::DomainError,
    }
}

/// An opaque handle to the `T/I`-orbit of a seed segment, together with the
/// contextual-operation context needed to evaluate expressions on it.
pub struct GisOrbit {
    orbit: TiOrbit,
    system: ResolvedSystem,
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().ok()
}

fn write_buffer(text: &str, buf: *mut c_char, buf_len: usize) -> GisStatus {
    if buf.is_null() {
        return GisStatus::InvalidArgument;
    }
    let bytes = text.as_bytes();
    if bytes.len() + 1 > buf_len {
        return GisStatus::BufferTooSmall;
    }
    unsafe {
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    GisStatus::Ok
}

fn guarded(f: impl FnOnce() -> GisStatus) -> GisStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(GisStatus::InternalError)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gis_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Build the `T/I`-orbit of `seed` (text such as `0,4,7`) mod `modulus` and
/// store a handle in `out`. The handle must be released with
/// `gis_orbit_free`.
///
/// # Safety
/// `seed` must be null or point to a NUL-terminated string; `out` must be a
/// valid pointer to pointer.
#[no_mangle]
pub unsafe extern "C" fn gis_orbit_new(
    modulus: u32,
    seed: *const c_char,
    out: *mut *mut GisOrbit,
) -> GisStatus {
    guarded(|| {
        if out.is_null() {
            return GisStatus::InvalidArgument;
        }
        unsafe { *out = ptr::null_mut() };
        let Some(seed) = (unsafe { cstr_arg(seed) }) else {
            return GisStatus::InvalidArgument;
        };
        let m = match Modulus::new(modulus) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        let seed = match PcSegment::parse(seed, m) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match ti_orbit(&seed) {
            Ok(orbit) => {
                let system = ResolvedSystem::TiOrbit(orbit.clone());
                let handle = Box::new(GisOrbit { orbit, system });
                unsafe { *out = Box::into_raw(handle) };
                GisStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release an orbit handle. Null is ignored.
///
/// # Safety
/// `orbit` must be null or a pointer previously returned by
/// `gis_orbit_new` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gis_orbit_free(orbit: *mut GisOrbit) {
    if !orbit.is_null() {
        drop(unsafe { Box::from_raw(orbit) });
    }
}

/// Number of segments in the orbit; 0 for a null handle.
///
/// # Safety
/// `orbit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gis_orbit_size(orbit: *const GisOrbit) -> usize {
    if orbit.is_null() {
        return 0;
    }
    unsafe { &*orbit }.orbit.len()
}

/// Evaluate an operation expression (grammar as in the network format, e.g.
/// `(13)*R`, `Q3`, `aff(7,7)`) at `segment` in the orbit context, writing
/// the image as text into `buf`.
///
/// # Safety
/// `orbit` must be a live handle; `op` and `segment` NUL-terminated strings;
/// `buf` must point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gis_orbit_apply(
    orbit: *const GisOrbit,
    op: *const c_char,
    segment: *const c_char,
    buf: *mut c_char,
    buf_len: usize,
) -> GisStatus {
    guarded(|| {
        if orbit.is_null() {
            return GisStatus::InvalidArgument;
        }
        let handle = unsafe { &*orbit };
        let (Some(op), Some(segment)) = (unsafe { cstr_arg(op) }, unsafe { cstr_arg(segment) })
        else {
            return GisStatus::InvalidArgument;
        };
        let expr = match OpExpr::parse(op) {
            Ok(e) => e,
            Err(e) => return status_of(&e),
        };
        let segment = match PcSegment::parse(segment, handle.orbit.modulus()) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match expr.eval(&handle.system, &segment) {
            Ok(image) => write_buffer(&image.to_string(), buf, buf_len),
            Err(e) => status_of(&e),
        }
    })
}

/// Retrograde inversion enchaining of a bare segment, written into `buf`.
///
/// # Safety
/// `segment` must be a NUL-terminated string; `buf` must point to `buf_len`
/// writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gis_rich(
    modulus: u32,
    segment: *const c_char,
    buf: *mut c_char,
    buf_len: usize,
) -> GisStatus {
    guarded(|| {
        let Some(segment) = (unsafe { cstr_arg(segment) }) else {
            return GisStatus::InvalidArgument;
        };
        let m = match Modulus::new(modulus) {
            Ok(m) => m,
            Err(e) => return status_of(&e),
        };
        let segment = match PcSegment::parse(segment, m) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        match rich(&segment) {
            Ok(image) => write_buffer(&image.to_string(), buf, buf_len),
            Err(e) => status_of(&e),
        }
    })
}

/// Parse and verify a network document given as JSON text. Returns `Ok` when
/// every edge and square passes, `VerificationFailed` when some check fails,
/// and a parse/domain status when the document is malformed.
///
/// # Safety
/// `json` must be null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gis_network_verify(json: *const c_char) -> GisStatus {
    guarded(|| {
        let Some(json) = (unsafe { cstr_arg(json) }) else {
            return GisStatus::InvalidArgument;
        };
        match parse_network(json) {
            Ok(network) => {
                if verify_network(&network).pass() {
                    GisStatus::Ok
                } else {
                    GisStatus::VerificationFailed
                }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Render a network document as DOT. On success `*out` owns a NUL-terminated
/// string to be released with `gis_string_free`.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be a valid
/// pointer to pointer.
#[no_mangle]
pub unsafe extern "C" fn gis_network_to_dot(
    json: *const c_char,
    out: *mut *mut c_char,
) -> GisStatus {
    guarded(|| {
        if out.is_null() {
            return GisStatus::InvalidArgument;
        }
        unsafe { *out = ptr::null_mut() };
        let Some(json) = (unsafe { cstr_arg(json) }) else {
            return GisStatus::InvalidArgument;
        };
        match parse_network(json) {
            Ok(network) => {
                let dot = export_dot(&network, &DotStyle::default());
                match CString::new(dot) {
                    Ok(c) => {
                        unsafe { *out = c.into_raw() };
                        GisStatus::Ok
                    }
                    Err(_) => GisStatus::InternalError,
                }
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must be null or a pointer returned by `gis_network_to_dot` that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gis_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
