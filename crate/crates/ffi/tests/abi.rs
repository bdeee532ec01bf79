use std::ffi::{CStr, CString};
use std::ptr;

use tauconv_ffi::*;

const Z2_Z3: &str = r#"{"format": 1, "H": {"kind": "cyclic", "n": 2}, "K": {"kind": "cyclic", "n": 3}, "tau": {"kind": "inversion"}}"#;

fn group(json: &str) -> (TcStatus, *mut TcGroup) {
    let text = CString::new(json).unwrap();
    let mut g = ptr::null_mut();
    let s = unsafe { tc_group_from_json(text.as_ptr(), &mut g) };
    (s, g)
}

fn function(g: *const TcGroup, re: &[f64]) -> *mut TcFunction {
    let mut f = ptr::null_mut();
    let s = unsafe { tc_function_new(g, re.as_ptr(), ptr::null(), re.len(), &mut f) };
    assert_eq!(s, TcStatus::Ok);
    f
}

fn values(f: *const TcFunction) -> Vec<f64> {
    let n = unsafe { tc_function_len(f) };
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let s = unsafe { tc_function_values(f, re.as_mut_ptr(), im.as_mut_ptr(), n) };
    assert_eq!(s, TcStatus::Ok);
    assert!(im.iter().all(|&x| x == 0.0));
    re
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tc_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn tconv_of_point_masses() {
    let (s, g) = group(Z2_Z3);
    assert_eq!(s, TcStatus::Ok);
    unsafe {
        assert_eq!(tc_group_order(g), 6);
        assert_eq!(tc_group_h_order(g), 2);
        assert_eq!(tc_group_k_order(g), 3);
    }
    let e = function(g, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let u = function(g, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tc_convolve(TcOp::Tconv, e, u, &mut out) }, TcStatus::Ok);
    assert_eq!(values(out), vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0]);
    let mut n = 0.0;
    assert_eq!(unsafe { tc_norm(out, 1.0, &mut n) }, TcStatus::Ok);
    assert_eq!(n, 1.0);
    let mut t = [0.0; 3];
    assert_eq!(unsafe { tc_tilde(out, t.as_mut_ptr(), ptr::null_mut(), 3) }, TcStatus::Ok);
    assert_eq!(t, [1.0, 0.0, 0.0]);
    unsafe {
        tc_function_free(out);
        tc_function_free(e);
        tc_function_free(u);
        tc_group_free(g);
    }
}

#[test]
fn involution_twice_is_identity() {
    let (_, g) = group(Z2_Z3);
    let f = function(g, &[1.0, -2.0, 0.5, 3.0, 0.0, 7.0]);
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(tc_involution(f, &mut a), TcStatus::Ok);
        assert_eq!(tc_involution(a, &mut b), TcStatus::Ok);
    }
    assert_eq!(values(a), vec![1.0, 0.5, -2.0, 3.0, 7.0, 0.0]);
    assert_eq!(values(b), values(f));
    unsafe {
        tc_function_free(a);
        tc_function_free(b);
        tc_function_free(f);
        tc_group_free(g);
    }
}

#[test]
fn error_codes() {
    let (s, g) = group("{not json");
    assert_eq!(s, TcStatus::Parse);
    assert!(g.is_null());
    let broken = r#"{"H": {"kind": "cyclic", "n": 1}, "K": {"kind": "table", "cayley": [[0,1,2],[1,1,0],[2,0,1]]}, "tau": {"kind": "trivial"}}"#;
    let (s, g) = group(broken);
    assert_eq!(s, TcStatus::InvalidGroup);
    assert!(g.is_null());
    assert!(!last_error().is_empty());

    let (_, g) = group(Z2_Z3);
    let mut f = ptr::null_mut();
    let re = [1.0; 5];
    assert_eq!(unsafe { tc_function_new(g, re.as_ptr(), ptr::null(), 5, &mut f) }, TcStatus::Shape);
    assert!(f.is_null());
    let a = function(g, &[1.0; 6]);
    let mut n = 0.0;
    assert_eq!(unsafe { tc_norm(a, 0.5, &mut n) }, TcStatus::InvalidArgument);
    assert_eq!(unsafe { tc_norm(a, f64::INFINITY, &mut n) }, TcStatus::Ok);
    assert_eq!(n, 1.0);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { tc_convolve(TcOp::Rconv, a, ptr::null(), &mut out) }, TcStatus::NullPointer);

    let (_, other) = group(r#"{"H": {"kind": "cyclic", "n": 1}, "K": {"kind": "cyclic", "n": 6}, "tau": {"kind": "trivial"}}"#);
    let b = function(other, &[1.0; 6]);
    assert_eq!(unsafe { tc_convolve(TcOp::Rconv, a, b, &mut out) }, TcStatus::GroupMismatch);
    unsafe {
        tc_function_free(a);
        tc_function_free(b);
        tc_group_free(g);
        tc_group_free(other);
    }
}

#[test]
fn verify_report() {
    let (_, g) = group(Z2_Z3);
    let mut json = ptr::null_mut();
    let mut passed = 0;
    assert_eq!(unsafe { tc_verify_json(g, 3, 10, 1, &mut json, &mut passed) }, TcStatus::Ok);
    assert_eq!(passed, 1);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 16);
    assert_eq!(v["backend"], "exact");
    unsafe {
        tc_string_free(json);
        tc_group_free(g);
    }
}
