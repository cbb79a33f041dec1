//! C ABI over the `veriphoton` library.
//!
//! Every fallible call returns a [`VpStatus`] and writes its result through an
//! out-pointer. On failure, [`vp_last_error`] describes the problem for the
//! calling thread. Instances are opaque handles released with
//! [`vp_instance_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use veriphoton::hamiltonian::InstanceSpec;
use veriphoton::protocol2::{self, AdversarySpec, RunConfig};
use veriphoton::{phasernd, photonics, protocol1};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    Panic = 5,
}

/// Opaque problem instance.
pub struct VpInstance {
    inner: InstanceSpec,
}

/// Acceptance estimate with a 99% confidence half-width.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VpEstimate {
    pub trials: u64,
    pub accepts: u64,
    pub estimate: f64,
    pub half_width: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(VpStatus, String);

impl From<veriphoton::Error> for Failure {
    fn from(e: veriphoton::Error) -> Self {
        Failure(VpStatus::InvalidArgument, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> VpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            VpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            VpStatus::Panic
        }
    }
}

fn null() -> Failure {
    Failure(VpStatus::NullPointer, "null pointer argument".into())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(VpStatus::InvalidUtf8, e.to_string()))
}

unsafe fn instance<'a>(inst: *const VpInstance) -> Result<&'a InstanceSpec, Failure> {
    inst.as_ref().map(|i| &i.inner).ok_or_else(null)
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn vp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vp_instance_from_json(
    json: *const c_char,
    out: *mut *mut VpInstance,
) -> VpStatus {
    guard(|| {
        let text = read_str(json)?;
        if out.is_null() {
            return Err(null());
        }
        let inner = InstanceSpec::from_json(text)
            .map_err(|e| Failure(VpStatus::ParseError, e.to_string()))?;
        write(out, Box::into_raw(Box::new(VpInstance { inner })))
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from [`vp_instance_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn vp_instance_free(inst: *mut VpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vp_instance_n_qubits(
    inst: *const VpInstance,
    out: *mut usize,
) -> VpStatus {
    guard(|| write(out, instance(inst)?.n_qubits()))
}

/// Smallest eigenvalue of the instance Hamiltonian.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vp_ground_energy(inst: *const VpInstance, out: *mut f64) -> VpStatus {
    guard(|| write(out, instance(inst)?.hamiltonian.ground_energy()?.energy))
}

/// Exact honest acceptance probability of the qubit protocol.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vp_exact_pacc_honest(inst: *const VpInstance, out: *mut f64) -> VpStatus {
    guard(|| write(out, protocol1::exact_pacc_honest(instance(inst)?)?))
}

/// Monte Carlo acceptance estimate of the photonic protocol. A null
/// `adversary_json` selects the honest prover.
///
/// # Safety
/// `inst` must be a live handle, `adversary_json` null or NUL-terminated, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn vp_estimate_pacc(
    inst: *const VpInstance,
    adversary_json: *const c_char,
    m: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    out: *mut VpEstimate,
) -> VpStatus {
    guard(|| {
        let inst = instance(inst)?.clone();
        let adversary = if adversary_json.is_null() {
            AdversarySpec::Honest {}
        } else {
            serde_json::from_str(read_str(adversary_json)?)
                .map_err(|e| Failure(VpStatus::ParseError, e.to_string()))?
        };
        let cfg = RunConfig::new(inst, m, alpha, trials, seed, adversary)?;
        let est = protocol2::estimate_pacc(&cfg)?.pacc;
        write(
            out,
            VpEstimate {
                trials: est.trials as u64,
                accepts: est.accepts as u64,
                estimate: est.estimate,
                half_width: est.half_width,
            },
        )
    })
}

/// # Safety
/// Out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_recommended_params(
    n: usize,
    f: f64,
    out_m: *mut usize,
    out_alpha: *mut f64,
) -> VpStatus {
    guard(|| {
        if out_m.is_null() || out_alpha.is_null() {
            return Err(null());
        }
        let p = protocol2::recommended_params(n, f)?;
        write(out_m, p.m)?;
        write(out_alpha, p.alpha)
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_gap_lower_bound(n: usize, f: f64, out: *mut f64) -> VpStatus {
    guard(|| write(out, protocol2::gap_lower_bound(n, f)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_required_r(m: usize, n: usize, f: f64, out: *mut usize) -> VpStatus {
    guard(|| write(out, phasernd::required_r(m, n, f)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_f_min(m: usize, n: usize, r: usize, out: *mut f64) -> VpStatus {
    guard(|| write(out, phasernd::f_min(m, n, r)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_fidelity_series(
    r: usize,
    m: usize,
    n: usize,
    out: *mut f64,
) -> VpStatus {
    guard(|| write(out, phasernd::fidelity_series(r, m, n)?))
}

/// Whether `m0` vacuum reports pass the threshold for `m` pulses at `alpha`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vp_threshold_check(
    m0: usize,
    m: usize,
    alpha: f64,
    out: *mut bool,
) -> VpStatus {
    guard(|| {
        photonics::PulseParams::new(m, alpha)?;
        write(out, photonics::threshold_check(m0, m, alpha))
    })
}
