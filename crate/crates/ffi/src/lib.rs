//! C interface to `netswitch`.
//!
//! Networks cross the boundary as opaque `NsNetwork` handles created by
//! `ns_network_new` or `ns_network_load` and released with
//! `ns_network_free`. Matrices are passed row-major. Every fallible call
//! returns an `NsStatus`; on failure `ns_last_error` describes the cause
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use netswitch::design::{spnopt, AlternatingOptions, Method, SpnoptOptions};
use netswitch::io::load_network;
use netswitch::linalg::spectral_abscissa;
use netswitch::optswitch::opt_switch;
use netswitch::{Error, ErrorClass, Network};

/// Result codes. The numeric values of the library classes match the exit
/// codes of the command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or an out-of-range argument.
    InvalidArgument = 1,
    Parse = 2,
    Precondition = 3,
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

/// Opaque network handle.
pub struct NsNetwork {
    inner: Network,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsSwitchResult {
    pub improvable: bool,
    pub unique: bool,
    pub k_star: f64,
    pub alpha_star: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsMethod {
    Mccormick = 0,
    Alternating = 1,
}

/// Design settings; `ns_design_options_default` fills in the defaults.
/// A zero `order` or a non-positive `bound_a` selects the automatic value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NsDesignOptions {
    pub method: NsMethod,
    pub gamma_low: f64,
    pub gamma_high: f64,
    pub bound_a: f64,
    pub order: usize,
    pub restarts: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NsDesignResult {
    pub k_star: f64,
    pub alpha_star: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub objective: f64,
    pub nonzeros: usize,
    pub pattern_size: usize,
    pub improvable: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NsStatus {
    match e.class() {
        ErrorClass::Parse => NsStatus::Parse,
        ErrorClass::Precondition => NsStatus::Precondition,
        ErrorClass::Numerical => NsStatus::Numerical,
    }
}

/// Runs `f`, recording any error or panic for `ns_last_error`.
fn guard(f: impl FnOnce() -> Result<(), (NsStatus, String)>) -> NsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NsStatus::Internal
        }
    }
}

fn lib(e: Error) -> (NsStatus, String) {
    (status_of(&e), e.to_string())
}

fn invalid(msg: &str) -> (NsStatus, String) {
    (NsStatus::InvalidArgument, msg.to_string())
}

unsafe fn network<'a>(h: *const NsNetwork) -> Result<&'a Network, (NsStatus, String)> {
    h.as_ref().map(|n| &n.inner).ok_or_else(|| invalid("null network handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, (NsStatus, String)> {
    p.as_mut().ok_or_else(|| invalid("null output pointer"))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn ns_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ns_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a network from `n * n` row-major weights.
///
/// # Safety
/// `weights` must point to `n * n` readable doubles and `out` to writable
/// storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ns_network_new(n: usize, weights: *const f64, out: *mut *mut NsNetwork) -> NsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        if weights.is_null() {
            return Err(invalid("null weight array"));
        }
        let len = n.checked_mul(n).ok_or_else(|| invalid("n * n overflows"))?;
        let data = std::slice::from_raw_parts(weights, len);
        let rows: Vec<Vec<f64>> = data.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let net = Network::from_rows(&rows, "network").map_err(lib)?;
        *out = Box::into_raw(Box::new(NsNetwork { inner: net }));
        Ok(())
    })
}

/// Reads a JSON or Matrix Market network, chosen by file extension.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ns_network_load(path: *const c_char, out: *mut *mut NsNetwork) -> NsStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        if path.is_null() {
            return Err(invalid("null path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let net = load_network(Path::new(path), None).map_err(lib)?;
        *out = Box::into_raw(Box::new(NsNetwork { inner: net }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ns_network_free(h: *mut NsNetwork) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_network_size(h: *const NsNetwork) -> usize {
    h.as_ref().map_or(0, |n| n.inner.n())
}

/// Copies the row-major weights into `buf`, which holds `len` doubles.
///
/// # Safety
/// `h` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ns_network_weights(h: *const NsNetwork, buf: *mut f64, len: usize) -> NsStatus {
    guard(|| {
        let net = network(h)?;
        let n = net.n();
        if buf.is_null() || len < n * n {
            return Err(invalid("weight buffer is null or shorter than n * n"));
        }
        let out = std::slice::from_raw_parts_mut(buf, n * n);
        let w = net.weights();
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = w[(i, j)];
            }
        }
        Ok(())
    })
}

/// Spectral abscissa of a network.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ns_spectral_abscissa(h: *const NsNetwork, out: *mut f64) -> NsStatus {
    guard(|| {
        let net = network(h)?;
        *out_ref(out)? = spectral_abscissa(net.weights()).map_err(lib)?;
        Ok(())
    })
}

/// Optimal switching ratio for a commuting pair.
///
/// # Safety
/// `a` and `b` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ns_opt_switch(a: *const NsNetwork, b: *const NsNetwork, out: *mut NsSwitchResult) -> NsStatus {
    guard(|| {
        let (a, b) = (network(a)?, network(b)?);
        let out = out_ref(out)?;
        let c = opt_switch(a, b).map_err(lib)?;
        *out = NsSwitchResult {
            improvable: c.improvable,
            unique: c.uniqueness,
            k_star: c.k_star,
            alpha_star: c.alpha_star,
            lower_bound: c.lower_bound,
            upper_bound: c.upper_bound,
            alpha_a: c.alpha_a,
            alpha_b: c.alpha_b,
        };
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn ns_design_options_default() -> NsDesignOptions {
    let d = SpnoptOptions::default();
    NsDesignOptions {
        method: NsMethod::Mccormick,
        gamma_low: d.gamma_low,
        gamma_high: d.gamma_high,
        bound_a: 0.0,
        order: 0,
        restarts: d.alternating.restarts,
        seed: d.alternating.seed,
    }
}

/// Synthesizes a sparse network commuting with `a`. On success `*out_b`
/// receives a new handle owned by the caller.
///
/// # Safety
/// `a` must be a live handle, `opts` null or readable, `out_b` and
/// `result` writable.
#[no_mangle]
pub unsafe extern "C" fn ns_design(
    a: *const NsNetwork,
    opts: *const NsDesignOptions,
    out_b: *mut *mut NsNetwork,
    result: *mut NsDesignResult,
) -> NsStatus {
    guard(|| {
        let a = network(a)?;
        let out_b = out_ref(out_b)?;
        *out_b = ptr::null_mut();
        let result = out_ref(result)?;
        let o = opts.as_ref().copied().unwrap_or_else(|| ns_design_options_default());
        let sp = SpnoptOptions {
            method: match o.method {
                NsMethod::Mccormick => Method::McCormick,
                NsMethod::Alternating => Method::Alternating,
            },
            gamma_low: o.gamma_low,
            gamma_high: o.gamma_high,
            bound_a: (o.bound_a > 0.0).then_some(o.bound_a),
            order: (o.order > 0).then_some(o.order),
            alternating: AlternatingOptions {
                restarts: o.restarts,
                seed: o.seed,
                ..Default::default()
            },
            ..Default::default()
        };
        let res = spnopt(a, &sp).map_err(lib)?;
        let r = res.result;
        *result = NsDesignResult {
            k_star: r.k_star,
            alpha_star: r.alpha_star,
            alpha_a: r.alpha_a,
            alpha_b: r.alpha_b,
            objective: r.objective,
            nonzeros: r.nonzeros,
            pattern_size: res.pattern.len(),
            improvable: r.certificate.improvable,
        };
        *out_b = Box::into_raw(Box::new(NsNetwork { inner: r.b }));
        Ok(())
    })
}
