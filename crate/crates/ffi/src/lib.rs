//! C ABI over `gmac-secrecy`.
//!
//! Every fallible call returns a [`GmacStatus`] and writes results through out
//! pointers. After a non-`GMAC_STATUS_OK` return, [`gmac_last_error_message`]
//! describes the failure on the calling thread. Handles are created by
//! `*_new_*`/`*_from_*` functions and released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gmac_secrecy::channels::{binary_gmac, deterministic_example, FiniteGmac, GaussianGmac};
use gmac_secrecy::curves::{sweep_secrecy_curve, Model, RegionCurve};
use gmac_secrecy::entropy::{h, h_inv, star};
use gmac_secrecy::lemmas::verify_lemma2;
use gmac_secrecy::oracle::{deterministic_private_corner_code, evaluate, repeat_code, Codebook};
use gmac_secrecy::regions::{binary_secrecy_capacity, binary_secrecy_member, gaussian_secrecy_capacity, SecrecyPoint};
use gmac_secrecy::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmacStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Shape = 3,
    Resource = 4,
    Config = 5,
    Parse = 6,
    Io = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

impl From<&Error> for GmacStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => GmacStatus::Domain,
            Error::Shape(_) => GmacStatus::Shape,
            Error::Resource(_) => GmacStatus::Resource,
            Error::Config(_) => GmacStatus::Config,
            Error::Parse(_) => GmacStatus::Parse,
            Error::Csv(_) | Error::Io(_) => GmacStatus::Io,
        }
    }
}

/// A finite-alphabet channel.
pub struct GmacChannel {
    inner: FiniteGmac,
}

/// A finite-blocklength code.
pub struct GmacCodebook {
    inner: Codebook,
}

/// A sampled secrecy capacity boundary.
pub struct GmacCurve {
    inner: RegionCurve,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GmacOracleReport {
    pub equivocation_bits: f64,
    pub equivocation_rate: f64,
    pub error_prob: f64,
    pub perfect_secrecy: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GmacStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GmacStatus::NullPointer, format!("{what} is NULL"))
}

/// Runs `f`, converting errors and panics into a status and the thread's last
/// error message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GmacStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GmacStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            GmacStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(GmacStatus::InvalidUtf8, format!("{what} is not UTF-8: {e}")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_point(p: SecrecyPoint, out_r1: *mut f64, out_alpha: *mut f64) -> Result<(), Failure> {
    write(out_r1, p.r1, "out_r1")?;
    if !out_alpha.is_null() {
        out_alpha.write(p.alpha_star);
    }
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn gmac_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Binary entropy in bits.
#[no_mangle]
pub extern "C" fn gmac_binary_entropy(a: f64) -> f64 {
    h(a)
}

/// `a(1-b) + (1-a)b`.
#[no_mangle]
pub extern "C" fn gmac_star(a: f64, b: f64) -> f64 {
    star(a, b)
}

/// Inverse of the binary entropy onto `[0, 1/2]`.
///
/// # Safety
/// `out` must be NULL or valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_binary_entropy_inv(c: f64, out: *mut f64) -> GmacStatus {
    guard(|| write(out, h_inv(c)?, "out"))
}

/// Secrecy capacity `R1` of the binary GMAC at common rate `r0`.
/// `out_alpha` may be NULL.
///
/// # Safety
/// Non-NULL out pointers must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_binary_secrecy_capacity(r0: f64, p: f64, out_r1: *mut f64, out_alpha: *mut f64) -> GmacStatus {
    guard(|| write_point(binary_secrecy_capacity(r0, p)?, out_r1, out_alpha))
}

/// Whether `(r0, r1)` is in the binary secrecy capacity region.
///
/// # Safety
/// `out` must be NULL or valid for one `bool` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_binary_secrecy_member(r0: f64, r1: f64, p: f64, out: *mut bool) -> GmacStatus {
    guard(|| write(out, binary_secrecy_member(r0, r1, p)?, "out"))
}

/// Secrecy capacity `R1` of the Gaussian GMAC at common rate `r0`.
/// `out_alpha` may be NULL.
///
/// # Safety
/// Non-NULL out pointers must be valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_gaussian_secrecy_capacity(
    p1: f64,
    p2: f64,
    n: f64,
    n2: f64,
    r0: f64,
    out_r1: *mut f64,
    out_alpha: *mut f64,
) -> GmacStatus {
    guard(|| {
        let g = GaussianGmac::new(p1, p2, n, n2)?;
        write_point(gaussian_secrecy_capacity(r0, &g)?, out_r1, out_alpha)
    })
}

/// Smallest interior second difference of `h(rho * h^-1(u))` on a grid of
/// step `step`.
///
/// # Safety
/// `out` must be NULL or valid for one `double` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_verify_convexity(rho: f64, step: f64, out: *mut f64) -> GmacStatus {
    guard(|| write(out, verify_lemma2(rho, step)?, "out"))
}

unsafe fn emit<T>(value: T, out: *mut *mut T) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(value)), "out")
}

/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_channel_new_deterministic(out: *mut *mut GmacChannel) -> GmacStatus {
    guard(|| emit(GmacChannel { inner: deterministic_example() }, out))
}

/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_channel_new_binary(p: f64, out: *mut *mut GmacChannel) -> GmacStatus {
    guard(|| emit(GmacChannel { inner: binary_gmac(p)? }, out))
}

/// Parses the channel JSON layout `{alphabets, transition}`.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or valid
/// for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_channel_from_json(json: *const c_char, out: *mut *mut GmacChannel) -> GmacStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        emit(GmacChannel { inner: FiniteGmac::from_json(text)? }, out)
    })
}

/// Physical degradedness test. `out_violation` may be NULL.
///
/// # Safety
/// `ch` must be NULL or a live channel handle; non-NULL out pointers must be
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gmac_channel_is_degraded(ch: *const GmacChannel, out_degraded: *mut bool, out_violation: *mut f64) -> GmacStatus {
    guard(|| {
        let d = handle(ch, "ch")?.inner.degradedness();
        write(out_degraded, d.degraded, "out_degraded")?;
        if !out_violation.is_null() {
            out_violation.write(d.max_violation);
        }
        Ok(())
    })
}

/// # Safety
/// `ch` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmac_channel_free(ch: *mut GmacChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Parses the codebook JSON layout `{n, M0, M1, encoder1, encoder2}`.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or valid
/// for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_codebook_from_json(json: *const c_char, out: *mut *mut GmacCodebook) -> GmacStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        emit(GmacCodebook { inner: Codebook::from_json(text)? }, out)
    })
}

/// One-symbol code sending a private bit on the deterministic example with
/// `x2 = 1`.
///
/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_codebook_new_private_corner(out: *mut *mut GmacCodebook) -> GmacStatus {
    guard(|| emit(GmacCodebook { inner: deterministic_private_corner_code() }, out))
}

/// `k` independent uses of `code`.
///
/// # Safety
/// `code` must be NULL or a live codebook handle; `out` must be NULL or valid
/// for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_codebook_repeat(code: *const GmacCodebook, k: usize, out: *mut *mut GmacCodebook) -> GmacStatus {
    guard(|| {
        let c = repeat_code(&handle(code, "code")?.inner, k)?;
        emit(GmacCodebook { inner: c }, out)
    })
}

/// # Safety
/// `code` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmac_codebook_free(code: *mut GmacCodebook) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Exact equivocation and MAP error probability of `code` on `ch`.
///
/// # Safety
/// Handles must be NULL or live; `out` must be NULL or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gmac_oracle_evaluate(
    code: *const GmacCodebook,
    ch: *const GmacChannel,
    out: *mut GmacOracleReport,
) -> GmacStatus {
    guard(|| {
        let r = evaluate(&handle(code, "code")?.inner, &handle(ch, "ch")?.inner)?;
        write(
            out,
            GmacOracleReport {
                equivocation_bits: r.equivocation_bits,
                equivocation_rate: r.equivocation_rate,
                error_prob: r.error_prob,
                perfect_secrecy: r.perfect_secrecy,
            },
            "out",
        )
    })
}

/// Binary secrecy boundary sampled at `n_points` common rates.
///
/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_curve_new_binary(p: f64, n_points: usize, out: *mut *mut GmacCurve) -> GmacStatus {
    guard(|| {
        binary_gmac(p)?;
        emit(GmacCurve { inner: sweep_secrecy_curve(Model::Binary { p }, n_points)? }, out)
    })
}

/// Gaussian secrecy boundary sampled at `n_points` common rates.
///
/// # Safety
/// `out` must be NULL or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gmac_curve_new_gaussian(
    p1: f64,
    p2: f64,
    n: f64,
    n2: f64,
    n_points: usize,
    out: *mut *mut GmacCurve,
) -> GmacStatus {
    guard(|| {
        let g = GaussianGmac::new(p1, p2, n, n2)?;
        emit(GmacCurve { inner: sweep_secrecy_curve(Model::Gaussian(g), n_points)? }, out)
    })
}

/// Number of samples, or 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live curve handle.
#[no_mangle]
pub unsafe extern "C" fn gmac_curve_len(curve: *const GmacCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.inner.samples.len())
}

/// Sample `i` of the curve. `out_alpha` may be NULL.
///
/// # Safety
/// `curve` must be NULL or live; non-NULL out pointers must be valid for one
/// `double` write.
#[no_mangle]
pub unsafe extern "C" fn gmac_curve_sample(
    curve: *const GmacCurve,
    i: usize,
    out_r0: *mut f64,
    out_r1: *mut f64,
    out_alpha: *mut f64,
) -> GmacStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        let s = c.inner.samples.get(i).ok_or_else(|| {
            Failure(GmacStatus::Shape, format!("sample index {i} out of range (len {})", c.inner.samples.len()))
        })?;
        write(out_r0, s.r0, "out_r0")?;
        write(out_r1, s.r1, "out_r1")?;
        if !out_alpha.is_null() {
            out_alpha.write(s.alpha_star);
        }
        Ok(())
    })
}

/// # Safety
/// `curve` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gmac_curve_free(curve: *mut GmacCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panic_becomes_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, GmacStatus::Panic);
        let msg = unsafe { CStr::from_ptr(gmac_last_error_message()) }.to_str().unwrap();
        assert_eq!(msg, "panic: boom");
    }

    #[test]
    fn success_clears_message() {
        let mut v = 0.0;
        assert_eq!(unsafe { gmac_binary_entropy_inv(2.0, &mut v) }, GmacStatus::Domain);
        assert!(!gmac_last_error_message().is_null());
        assert_eq!(unsafe { gmac_binary_entropy_inv(1.0, &mut v) }, GmacStatus::Ok);
        assert!(gmac_last_error_message().is_null());
        assert_eq!(v, 0.5);
    }
}
