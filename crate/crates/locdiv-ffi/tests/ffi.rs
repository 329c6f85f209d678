//! Exercises the C entry points the way a foreign caller would.

use std::ffi::{CStr, CString};
use std::ptr;

use libc::c_char;
use locdiv_ffi::*;

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_owned();
    unsafe { locdiv_string_free(ptr) };
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(locdiv_last_error_message()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn set_density_and_frobenius() {
    let record = CString::new("p=5 rule=const:1 depth=4").unwrap();
    let mut set: *mut LocdivSet = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_set_new(record.as_ptr(), &mut set) },
        LocdivStatus::Ok
    );

    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_density_json(set, 100_000, &mut out) },
        LocdivStatus::Ok
    );
    let density: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    let ratio = density["ratio_num"].as_str().unwrap().parse::<f64>().unwrap()
        / density["ratio_den"].as_str().unwrap().parse::<f64>().unwrap();
    assert!(ratio > 0.2 && ratio < 0.3);
    assert_eq!(density["limit"], 100_000);

    let mut coord: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_frobenius_coordinate(set, 7, &mut coord) },
        LocdivStatus::Ok
    );
    let coord = take_string(coord);
    assert!(coord.parse::<u64>().is_ok());

    let mut members: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_set_members_json(set, 1000, &mut members) },
        LocdivStatus::Ok
    );
    let members: serde_json::Value = serde_json::from_str(&take_string(members)).unwrap();
    assert!(members.as_array().unwrap().len() > 10);

    unsafe { locdiv_set_free(set) };
}

#[test]
fn local_and_global_tests() {
    let desc = CString::new("a=0 b=-2").unwrap();
    let mut curve: *mut LocdivCurve = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_curve_new(desc.as_ptr(), &mut curve) },
        LocdivStatus::Ok
    );

    // (129/100, -383/1000) = 2*(3, 5) on y^2 = x^3 - 2.
    let double = CString::new("x=129/100 y=-383/1000").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_global_test_json(curve, double.as_ptr(), 2, 1, &mut out) },
        LocdivStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["outcome"], "divisible");
    assert!(v["witness"].as_str().unwrap().contains("x="));

    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_local_test_json(curve, double.as_ptr(), 2, 1, 7, &mut out) },
        LocdivStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(v["divisible"], true);
    assert_eq!(v["method"], "structural");

    unsafe { locdiv_curve_free(curve) };
}

#[test]
fn check_report_round_trip() {
    let record = CString::new("p=3 rule=const:1 depth=4").unwrap();
    let mut set: *mut LocdivSet = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_set_new(record.as_ptr(), &mut set) },
        LocdivStatus::Ok
    );
    let desc = CString::new("a=0 b=-2").unwrap();
    let mut curve: *mut LocdivCurve = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_curve_new(desc.as_ptr(), &mut curve) },
        LocdivStatus::Ok
    );

    let point = CString::new("x=129/100 y=-383/1000").unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_check_json(curve, point.as_ptr(), 2, 1, set, 3000, 5, &mut out) },
        LocdivStatus::Ok
    );
    let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(report["consistent"], true);
    assert_eq!(report["global"], "divisible");
    assert_eq!(report["all_local_divisible"], true);

    unsafe {
        locdiv_curve_free(curve);
        locdiv_set_free(set);
    }
}

#[test]
fn error_paths() {
    let mut set: *mut LocdivSet = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_set_new(ptr::null(), &mut set) },
        LocdivStatus::NullArgument
    );
    assert!(!last_error().is_empty());

    let bad = CString::new("p=4 rule=const:1 depth=4").unwrap();
    assert_eq!(
        unsafe { locdiv_set_new(bad.as_ptr(), &mut set) },
        LocdivStatus::InvalidInput
    );
    assert!(!last_error().is_empty());

    let singular = CString::new("a=0 b=0").unwrap();
    let mut curve: *mut LocdivCurve = ptr::null_mut();
    assert_eq!(
        unsafe { locdiv_curve_new(singular.as_ptr(), &mut curve) },
        LocdivStatus::InvalidInput
    );

    // Freeing null is a no-op.
    unsafe {
        locdiv_set_free(ptr::null_mut());
        locdiv_curve_free(ptr::null_mut());
        locdiv_string_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("locdiv.h");
    let text = std::fs::read_to_string(header).unwrap();
    for symbol in [
        "locdiv_set_new",
        "locdiv_curve_new",
        "locdiv_density_json",
        "locdiv_local_test_json",
        "locdiv_global_test_json",
        "locdiv_check_json",
        "locdiv_string_free",
        "locdiv_last_error_message",
        "LocdivStatus",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}
