use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use gmac_secrecy::channels::deterministic_example;
use gmac_secrecy::entropy::h;
use gmac_secrecy::oracle::deterministic_private_corner_code;
use gmac_secrecy_ffi::*;

fn last_error() -> String {
    let p = gmac_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalars() {
    assert_eq!(gmac_binary_entropy(0.5), 1.0);
    assert_eq!(gmac_star(0.3, 0.5), 0.5);
    let mut a = -1.0;
    assert_eq!(unsafe { gmac_binary_entropy_inv(h(0.11), &mut a) }, GmacStatus::Ok);
    assert!((a - 0.11).abs() < 1e-9);
}

#[test]
fn binary_capacity_and_membership() {
    let (mut r1, mut alpha) = (0.0, 0.0);
    assert_eq!(unsafe { gmac_binary_secrecy_capacity(0.0, 0.2, &mut r1, &mut alpha) }, GmacStatus::Ok);
    assert!((r1 - h(0.2)).abs() < 1e-12);
    assert_eq!(alpha, 0.5);
    assert_eq!(unsafe { gmac_binary_secrecy_capacity(0.3, 0.2, &mut r1, ptr::null_mut()) }, GmacStatus::Ok);

    let mut m = false;
    assert_eq!(unsafe { gmac_binary_secrecy_member(0.3, r1 - 1e-6, 0.2, &mut m) }, GmacStatus::Ok);
    assert!(m);
    assert_eq!(unsafe { gmac_binary_secrecy_member(0.3, r1 + 1e-3, 0.2, &mut m) }, GmacStatus::Ok);
    assert!(!m);
}

#[test]
fn domain_errors_set_message() {
    let mut r1 = 0.0;
    assert_eq!(unsafe { gmac_binary_secrecy_capacity(0.1, 0.7, &mut r1, ptr::null_mut()) }, GmacStatus::Domain);
    assert!(last_error().contains("[0, 1/2]"));
    assert_eq!(
        unsafe { gmac_gaussian_secrecy_capacity(1.0, 1.0, 1.0, 0.5, 0.0, &mut r1, ptr::null_mut()) },
        GmacStatus::Domain
    );
}

#[test]
fn null_out_pointer() {
    assert_eq!(unsafe { gmac_binary_entropy_inv(0.5, ptr::null_mut()) }, GmacStatus::NullPointer);
    assert!(last_error().contains("out"));
    let mut d = false;
    assert_eq!(unsafe { gmac_channel_is_degraded(ptr::null(), &mut d, ptr::null_mut()) }, GmacStatus::NullPointer);
}

#[test]
fn gaussian_capacity() {
    let (mut r1, mut alpha) = (0.0, 0.0);
    let s = unsafe { gmac_gaussian_secrecy_capacity(1.0, 1.0, 1.0, 2.0, 0.0, &mut r1, &mut alpha) };
    assert_eq!(s, GmacStatus::Ok);
    assert!((r1 - (0.5 - 0.5 * 1.5f64.log2())).abs() < 1e-12);
}

#[test]
fn corner_code_through_handles() {
    unsafe {
        let mut ch = ptr::null_mut();
        assert_eq!(gmac_channel_new_deterministic(&mut ch), GmacStatus::Ok);
        let mut code = ptr::null_mut();
        assert_eq!(gmac_codebook_new_private_corner(&mut code), GmacStatus::Ok);
        let mut four = ptr::null_mut();
        assert_eq!(gmac_codebook_repeat(code, 4, &mut four), GmacStatus::Ok);

        let mut r = GmacOracleReport::default();
        assert_eq!(gmac_oracle_evaluate(four, ch, &mut r), GmacStatus::Ok);
        assert_eq!(r.equivocation_bits, 4.0);
        assert_eq!(r.error_prob, 0.0);
        assert!(r.perfect_secrecy);

        let mut degraded = true;
        let mut violation = 0.0;
        assert_eq!(gmac_channel_is_degraded(ch, &mut degraded, &mut violation), GmacStatus::Ok);
        assert!(!degraded);
        assert!(violation > 0.0);

        gmac_codebook_free(four);
        gmac_codebook_free(code);
        gmac_channel_free(ch);
    }
}

#[test]
fn json_handles() {
    let ch_json = CString::new(deterministic_example().to_json()).unwrap();
    let code_json = CString::new(deterministic_private_corner_code().to_json()).unwrap();
    unsafe {
        let (mut ch, mut code) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(gmac_channel_from_json(ch_json.as_ptr(), &mut ch), GmacStatus::Ok);
        assert_eq!(gmac_codebook_from_json(code_json.as_ptr(), &mut code), GmacStatus::Ok);
        let mut r = GmacOracleReport::default();
        assert_eq!(gmac_oracle_evaluate(code, ch, &mut r), GmacStatus::Ok);
        assert_eq!(r.equivocation_bits, 1.0);
        gmac_codebook_free(code);
        gmac_channel_free(ch);

        let bad = CString::new("{\"alphabets\": [").unwrap();
        assert_eq!(gmac_channel_from_json(bad.as_ptr(), &mut ch), GmacStatus::Parse);
        assert_eq!(gmac_codebook_from_json(ptr::null(), &mut code), GmacStatus::NullPointer);
    }
}

#[test]
fn binary_channel_handle() {
    unsafe {
        let mut ch = ptr::null_mut();
        assert_eq!(gmac_channel_new_binary(0.6, &mut ch), GmacStatus::Domain);
        assert_eq!(gmac_channel_new_binary(0.2, &mut ch), GmacStatus::Ok);
        let mut d = false;
        assert_eq!(gmac_channel_is_degraded(ch, &mut d, ptr::null_mut()), GmacStatus::Ok);
        assert!(d);
        gmac_channel_free(ch);
    }
}

#[test]
fn curves() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(gmac_curve_new_binary(0.2, 11, &mut c), GmacStatus::Ok);
        assert_eq!(gmac_curve_len(c), 11);
        let (mut r0, mut r1) = (0.0, 0.0);
        assert_eq!(gmac_curve_sample(c, 0, &mut r0, &mut r1, ptr::null_mut()), GmacStatus::Ok);
        assert_eq!(r0, 0.0);
        assert!((r1 - h(0.2)).abs() < 1e-12);
        assert_eq!(gmac_curve_sample(c, 11, &mut r0, &mut r1, ptr::null_mut()), GmacStatus::Shape);
        assert!(last_error().contains("out of range"));
        gmac_curve_free(c);

        assert_eq!(gmac_curve_new_gaussian(1.0, 1.0, 1.0, 2.0, 5, &mut c), GmacStatus::Ok);
        assert_eq!(gmac_curve_len(c), 5);
        gmac_curve_free(c);

        assert_eq!(gmac_curve_len(ptr::null()), 0);
        gmac_curve_free(ptr::null_mut());
    }
}

#[test]
fn convexity_check() {
    let mut d = 0.0;
    assert_eq!(unsafe { gmac_verify_convexity(0.2, 1e-3, &mut d) }, GmacStatus::Ok);
    assert!(d > 0.0);
    assert_eq!(unsafe { gmac_verify_convexity(0.7, 1e-3, &mut d) }, GmacStatus::Domain);
}

#[test]
fn errors_are_thread_local() {
    let mut v = 0.0;
    assert_eq!(unsafe { gmac_binary_entropy_inv(3.0, &mut v) }, GmacStatus::Domain);
    std::thread::spawn(|| assert!(gmac_last_error_message().is_null())).join().unwrap();
    assert!(!gmac_last_error_message().is_null());
}

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gmac_secrecy.h")
}

#[test]
fn header_declares_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "typedef struct GmacChannel GmacChannel;",
        "GMAC_STATUS_OK = 0",
        "GMAC_STATUS_PANIC",
        "gmac_last_error_message(void)",
        "gmac_oracle_evaluate(",
        "gmac_curve_sample(",
        "gmac_channel_free(",
    ] {
        assert!(text.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let Ok(o) = Command::new(&cc).args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"]).arg(header()).output() else {
        eprintln!("skipping: {cc} not available");
        return;
    };
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
