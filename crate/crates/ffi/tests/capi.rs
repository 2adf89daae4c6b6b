use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use netswitch_ffi::*;

const FIVE_NODE: [f64; 25] = [
    0.0, 1.0, 0.0, 0.0, 0.0, //
    0.0, 0.0, 1.0, 0.0, 0.0, //
    0.0, 0.0, 0.0, 1.0, 0.0, //
    0.0, 0.0, 0.0, 0.0, 1.0, //
    -150.0, -260.0, -187.0, -69.0, -13.0,
];

fn new_network(n: usize, w: &[f64]) -> *mut NsNetwork {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ns_network_new(n, w.as_ptr(), &mut h) }, NsStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = ns_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn network_round_trip() {
    let h = new_network(5, &FIVE_NODE);
    assert_eq!(unsafe { ns_network_size(h) }, 5);
    let mut buf = [0.0; 25];
    assert_eq!(unsafe { ns_network_weights(h, buf.as_mut_ptr(), buf.len()) }, NsStatus::Ok);
    assert_eq!(buf, FIVE_NODE);
    assert_eq!(unsafe { ns_network_weights(h, buf.as_mut_ptr(), 3) }, NsStatus::InvalidArgument);
    let mut alpha = 0.0;
    assert_eq!(unsafe { ns_spectral_abscissa(h, &mut alpha) }, NsStatus::Ok);
    assert!((alpha + 2.0).abs() < 1e-9);
    unsafe { ns_network_free(h) };
}

#[test]
fn null_and_invalid_arguments() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ns_network_new(2, ptr::null(), &mut h) }, NsStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("null"));
    let nan = [f64::NAN, 0.0, 0.0, 0.0];
    assert_eq!(unsafe { ns_network_new(2, nan.as_ptr(), &mut h) }, NsStatus::Precondition);
    assert!(!last_error().is_empty());
    let mut alpha = 0.0;
    assert_eq!(unsafe { ns_spectral_abscissa(ptr::null(), &mut alpha) }, NsStatus::InvalidArgument);
    assert_eq!(unsafe { ns_network_size(ptr::null()) }, 0);
    unsafe { ns_network_free(ptr::null_mut()) };
}

#[test]
fn load_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"n": 2, "matrix": [[1]]}"#).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ns_network_load(c.as_ptr(), &mut h) }, NsStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("row"));
}

#[test]
fn design_then_switch() {
    let a = new_network(5, &FIVE_NODE);
    let mut opts = ns_design_options_default();
    opts.order = 5;
    let mut b = ptr::null_mut();
    let mut res = NsDesignResult::default();
    assert_eq!(unsafe { ns_design(a, &opts, &mut b, &mut res) }, NsStatus::Ok, "{}", last_error());
    assert_eq!(res.pattern_size, 16);
    assert!((res.k_star - 3.0 / 7.0).abs() < 1e-3);
    assert!((res.alpha_star + 18.0 / 7.0).abs() < 1e-3);
    let mut sw = NsSwitchResult::default();
    assert_eq!(unsafe { ns_opt_switch(a, b, &mut sw) }, NsStatus::Ok);
    assert!(sw.improvable && sw.unique);
    assert!((sw.k_star - res.k_star).abs() < 1e-9);
    assert!(sw.lower_bound <= sw.alpha_star + 1e-12 && sw.alpha_star < sw.upper_bound);
    unsafe {
        ns_network_free(a);
        ns_network_free(b);
    }
}

#[test]
fn non_commuting_pair_is_a_precondition_failure() {
    let a = new_network(2, &[-1.0, 1.0, 0.0, -2.0]);
    let b = new_network(2, &[-1.0, 0.0, 1.0, -2.0]);
    let mut sw = NsSwitchResult::default();
    assert_eq!(unsafe { ns_opt_switch(a, b, &mut sw) }, NsStatus::Precondition);
    assert!(!last_error().is_empty());
    unsafe {
        ns_network_free(a);
        ns_network_free(b);
    }
}

// Compiles a small C program against the generated header and the static
// library, then runs it.
#[test]
fn c_program_links_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = crate_dir.join("include");
    assert!(header_dir.join("netswitch.h").exists());
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let built = Command::new(cargo)
        .args(["build", "--quiet", "-p", "netswitch-ffi", "--lib"])
        .current_dir(&crate_dir)
        .status()
        .expect("cargo available");
    assert!(built.success());
    let exe = std::env::current_exe().unwrap();
    let target_dir = exe.ancestors().nth(3).unwrap();
    let lib = target_dir.join("debug").join("libnetswitch_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "netswitch.h"
int main(void) {
    double w[25] = {0,1,0,0,0, 0,0,1,0,0, 0,0,0,1,0, 0,0,0,0,1, -150,-260,-187,-69,-13};
    NsNetwork *a = NULL;
    if (ns_network_new(5, w, &a) != NS_STATUS_OK) return 1;
    double alpha = 0.0;
    if (ns_spectral_abscissa(a, &alpha) != NS_STATUS_OK) return 2;
    if (ns_spectral_abscissa(NULL, &alpha) != NS_STATUS_INVALID_ARGUMENT) return 3;
    if (ns_last_error() == NULL) return 4;
    printf("%.6f\n", alpha);
    ns_network_free(a);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "-2.000000");
}
