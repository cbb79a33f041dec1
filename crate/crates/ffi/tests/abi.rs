use std::ffi::{CStr, CString};
use std::ptr;

use veriphoton_ffi::*;

const SINGLET: &str = r#"{"n": 2, "terms": [{"i": 0, "j": 1, "p": 1.0, "c": 1}],
  "a": 0.0, "b": 0.1, "f": 10,
  "witness": [[0,0],[0.7071067811865476,0],[-0.7071067811865476,0],[0,0]]}"#;

fn last_error() -> String {
    unsafe { CStr::from_ptr(vp_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn load(json: &str) -> *mut VpInstance {
    let text = CString::new(json).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { vp_instance_from_json(text.as_ptr(), &mut inst) },
        VpStatus::Ok
    );
    assert!(!inst.is_null());
    inst
}

#[test]
fn instance_lifecycle() {
    let inst = load(SINGLET);
    let mut n = 0usize;
    let mut e = f64::NAN;
    let mut p = f64::NAN;
    unsafe {
        assert_eq!(vp_instance_n_qubits(inst, &mut n), VpStatus::Ok);
        assert_eq!(vp_ground_energy(inst, &mut e), VpStatus::Ok);
        assert_eq!(vp_exact_pacc_honest(inst, &mut p), VpStatus::Ok);
        vp_instance_free(inst);
        vp_instance_free(ptr::null_mut());
    }
    assert_eq!(n, 2);
    assert!(e.abs() < 1e-9);
    assert!((p - 1.0).abs() < 1e-9);
}

#[test]
fn estimate_through_the_abi() {
    let inst = load(SINGLET);
    let mut est = VpEstimate {
        trials: 0,
        accepts: 0,
        estimate: 0.0,
        half_width: 0.0,
    };
    let adv = CString::new(r#"{"kind": "random-outcomes"}"#).unwrap();
    unsafe {
        assert_eq!(
            vp_estimate_pacc(inst, ptr::null(), 75, 1.0, 1000, 3, &mut est),
            VpStatus::Ok
        );
        assert_eq!(est.trials, 1000);
        assert!(est.estimate > 0.95);
        assert_eq!(
            vp_estimate_pacc(inst, adv.as_ptr(), 75, 1.0, 1000, 3, &mut est),
            VpStatus::Ok
        );
        assert!(est.estimate < 0.95);
        assert_eq!(
            vp_estimate_pacc(inst, ptr::null(), 75, 1.5, 1000, 3, &mut est),
            VpStatus::InvalidArgument
        );
        vp_instance_free(inst);
    }
    assert!(last_error().contains("alpha"), "{}", last_error());
}

#[test]
fn scalar_functions() {
    let (mut m, mut alpha, mut gap, mut fmin, mut fs) = (0usize, 0.0, 0.0, 0.0, 0.0);
    let mut r = 0usize;
    let mut pass = false;
    unsafe {
        assert_eq!(
            vp_recommended_params(2, 10.0, &mut m, &mut alpha),
            VpStatus::Ok
        );
        assert_eq!(vp_gap_lower_bound(2, 10.0, &mut gap), VpStatus::Ok);
        assert_eq!(vp_required_r(75, 2, 10.0, &mut r), VpStatus::Ok);
        assert_eq!(vp_f_min(75, 2, 9, &mut fmin), VpStatus::Ok);
        assert_eq!(vp_fidelity_series(16, 75, 2, &mut fs), VpStatus::Ok);
        assert_eq!(vp_threshold_check(10, 75, 1.0, &mut pass), VpStatus::Ok);
    }
    assert_eq!((m, alpha), (76, 1.0));
    assert!((gap - 0.025).abs() < 1e-15);
    assert_eq!(r, 16);
    assert!((fmin - 0.946_696).abs() < 1e-6);
    assert!(fs >= fmin);
    assert!(pass);
    assert_eq!(last_error(), "");
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("{\"n\": 2}").unwrap();
    let mut inst = ptr::null_mut();
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            vp_instance_from_json(bad.as_ptr(), &mut inst),
            VpStatus::ParseError
        );
        assert!(inst.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            vp_instance_from_json(ptr::null(), &mut inst),
            VpStatus::NullPointer
        );
        assert_eq!(
            vp_ground_energy(ptr::null(), &mut out),
            VpStatus::NullPointer
        );
        assert_eq!(vp_f_min(75, 2, 8, &mut out), VpStatus::InvalidArgument);
        assert_eq!(
            vp_gap_lower_bound(2, 10.0, ptr::null_mut()),
            VpStatus::NullPointer
        );
    }
    let v = unsafe { CStr::from_ptr(vp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/veriphoton.h"))
            .unwrap();
    for name in [
        "typedef struct VpInstance VpInstance",
        "vp_instance_from_json",
        "vp_instance_free",
        "vp_estimate_pacc",
        "vp_required_r",
        "VP_STATUS_OK",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
