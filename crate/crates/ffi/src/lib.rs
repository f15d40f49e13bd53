//! C interface to `gatefid`.
//!
//! Channels are passed around as opaque `GfChoi` handles created by one of
//! the `gf_choi_*` constructors and released with [`gf_choi_free`]. Every
//! fallible function returns a [`GfStatus`]; on failure a description is
//! available from [`gf_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gatefid::cli::choi_file::{read_choi, write_choi};
use gatefid::fidelity::{
    average_fidelity_choi, constant_fidelity, equal_fidelity, gate_fidelity_at,
    min_gate_fidelity_with, MinFidelityOptions,
};
use gatefid::sampling::random_channel;
use gatefid::{CMat, Choi, Error, MinFidelityMethod, PureState, RngStream, C64};

/// Opaque channel handle.
pub struct GfChoi(Choi);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfStatus {
    Ok = 0,
    NullPointer = 1,
    DimensionMismatch = 2,
    NonFinite = 3,
    NotHermitian = 4,
    NotSymmetric = 5,
    NotPsd = 6,
    InvalidChannel = 7,
    InvalidState = 8,
    InvalidArgument = 9,
    PatternViolation = 10,
    NonConvergence = 11,
    Breakdown = 12,
    Parse = 13,
    Io = 14,
    Panic = 15,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GfMethod {
    SdpExact = 0,
    PptAndSeesaw = 1,
    Grid = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GfValidation {
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    pub min_eigenvalue: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GfFidelityReport {
    pub average: f64,
    pub lambda1: f64,
    pub minimum: f64,
    pub interval_lower: f64,
    pub interval_upper: f64,
    /// Method actually used (`SdpExact` falls back for `n ≥ 3`).
    pub method: GfMethod,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> GfStatus {
    match e {
        Error::DimensionMismatch(_) => GfStatus::DimensionMismatch,
        Error::NonFinite => GfStatus::NonFinite,
        Error::NotHermitian { .. } => GfStatus::NotHermitian,
        Error::NotSymmetric { .. } => GfStatus::NotSymmetric,
        Error::NotPsd { .. } => GfStatus::NotPsd,
        Error::InvalidChannel(_) => GfStatus::InvalidChannel,
        Error::InvalidState(_) => GfStatus::InvalidState,
        Error::InvalidArgument(_) => GfStatus::InvalidArgument,
        Error::PatternViolation { .. } => GfStatus::PatternViolation,
        Error::NonConvergence { .. } => GfStatus::NonConvergence,
        Error::Breakdown(_) => GfStatus::Breakdown,
        Error::Parse { .. } => GfStatus::Parse,
        Error::Io(_) => GfStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GfStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            GfStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            GfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Error::InvalidArgument("path is not valid UTF-8".into()).into())
}

fn boxed(c: Choi) -> *mut GfChoi {
    Box::into_raw(Box::new(GfChoi(c)))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a channel on `C^n` from its `n² × n²` Choi matrix given as
/// row-major real and imaginary parts. `im` may be NULL for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n⁴` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_from_matrix(
    n: usize,
    re: *const f64,
    im: *const f64,
    out_choi: *mut *mut GfChoi,
) -> GfStatus {
    guard(|| {
        let slot = out(out_choi, "out")?;
        *slot = ptr::null_mut();
        if re.is_null() {
            return Err(Failure::Null("re"));
        }
        let nn = n
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidArgument(format!("dimension {n} is too large")))?;
        let len = nn
            .checked_mul(nn)
            .ok_or_else(|| Error::InvalidArgument(format!("dimension {n} is too large")))?;
        let re = std::slice::from_raw_parts(re, len);
        let data: Vec<C64> = if im.is_null() {
            re.iter().map(|&x| C64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()
        };
        *slot = boxed(Choi::new(n, CMat::from_vec(nn, nn, data)?)?);
        Ok(())
    })
}

/// Reads a channel in the `CHOI n` text format.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_read_file(
    path: *const c_char,
    out_choi: *mut *mut GfChoi,
) -> GfStatus {
    guard(|| {
        let slot = out(out_choi, "out")?;
        *slot = ptr::null_mut();
        *slot = boxed(read_choi(path_arg(path)?)?);
        Ok(())
    })
}

/// # Safety
/// `choi` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_write_file(choi: *const GfChoi, path: *const c_char) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        write_choi(path_arg(path)?, &c.0)?;
        Ok(())
    })
}

/// Draws a random channel on `C^n` (Kraus rank `n`) from stream `stream`
/// of `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_random_channel(
    n: usize,
    seed: u64,
    stream: u64,
    out_choi: *mut *mut GfChoi,
) -> GfStatus {
    guard(|| {
        let slot = out(out_choi, "out")?;
        *slot = ptr::null_mut();
        if n == 0 || n > 16 {
            return Err(Error::InvalidArgument(format!("dimension {n} outside 1..=16")).into());
        }
        let mut rng = RngStream::new(seed, stream);
        *slot = boxed(random_channel(n, &mut rng));
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `choi` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_free(choi: *mut GfChoi) {
    if !choi.is_null() {
        drop(Box::from_raw(choi));
    }
}

/// Local dimension `n`, or 0 for NULL.
///
/// # Safety
/// `choi` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_dim(choi: *const GfChoi) -> usize {
    choi.as_ref().map_or(0, |c| c.0.n())
}

/// Copies the Choi matrix out, row-major. Either buffer may be NULL.
///
/// # Safety
/// Non-null buffers must hold `n⁴` doubles.
#[no_mangle]
pub unsafe extern "C" fn gf_choi_entries(
    choi: *const GfChoi,
    re: *mut f64,
    im: *mut f64,
) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        let data = c.0.mat().as_slice();
        if !re.is_null() {
            let re = std::slice::from_raw_parts_mut(re, data.len());
            for (o, z) in re.iter_mut().zip(data) {
                *o = z.re;
            }
        }
        if !im.is_null() {
            let im = std::slice::from_raw_parts_mut(im, data.len());
            for (o, z) in im.iter_mut().zip(data) {
                *o = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `choi` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_validate(
    choi: *const GfChoi,
    tol: f64,
    report: *mut GfValidation,
) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        let slot = out(report, "report")?;
        let r = gatefid::channel::validate(&c.0, tol)?;
        *slot = GfValidation {
            cp: r.cp,
            tp: r.tp,
            unital: r.unital,
            min_eigenvalue: r.min_eigenvalue,
        };
        Ok(())
    })
}

/// # Safety
/// `choi` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_average_fidelity(choi: *const GfChoi, value: *mut f64) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        *out(value, "value")? = average_fidelity_choi(&c.0)?;
        Ok(())
    })
}

/// Minimum gate fidelity with a certified interval. `tol` is the target
/// SDP gap; `seed` drives see-saw restarts.
///
/// # Safety
/// `choi` must be a live handle; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_min_gate_fidelity(
    choi: *const GfChoi,
    method: GfMethod,
    tol: f64,
    seed: u64,
    report: *mut GfFidelityReport,
) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        let slot = out(report, "report")?;
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")).into());
        }
        let method = match method {
            GfMethod::SdpExact => MinFidelityMethod::SdpExact,
            GfMethod::PptAndSeesaw => MinFidelityMethod::PptAndSeesaw,
            GfMethod::Grid => MinFidelityMethod::Grid,
        };
        let r = min_gate_fidelity_with(
            &c.0,
            &MinFidelityOptions {
                method,
                tolerance: tol,
                seed,
                ..Default::default()
            },
        )?;
        *slot = GfFidelityReport {
            average: r.average,
            lambda1: r.lambda1,
            minimum: r.minimum,
            interval_lower: r.certified_interval.0,
            interval_upper: r.certified_interval.1,
            method: match r.method {
                MinFidelityMethod::SdpExact => GfMethod::SdpExact,
                MinFidelityMethod::PptAndSeesaw => GfMethod::PptAndSeesaw,
                MinFidelityMethod::Grid => GfMethod::Grid,
            },
        };
        Ok(())
    })
}

/// # Safety
/// `a`, `b` must be live handles; `equal` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_equal_fidelity(
    a: *const GfChoi,
    b: *const GfChoi,
    tol: f64,
    equal: *mut bool,
) -> GfStatus {
    guard(|| {
        let a = deref(a, "a")?;
        let b = deref(b, "b")?;
        *out(equal, "equal")? = equal_fidelity(&a.0, &b.0, tol)?;
        Ok(())
    })
}

/// Sets `*is_constant` and, when true, `*value` to the constant fidelity.
///
/// # Safety
/// `choi` must be a live handle; `is_constant` must be writable; `value`
/// may be NULL.
#[no_mangle]
pub unsafe extern "C" fn gf_constant_fidelity(
    choi: *const GfChoi,
    tol: f64,
    is_constant: *mut bool,
    value: *mut f64,
) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        let flag = out(is_constant, "is_constant")?;
        let v = constant_fidelity(&c.0, tol);
        *flag = v.is_some();
        if let (Some(v), Some(slot)) = (v, value.as_mut()) {
            *slot = v;
        }
        Ok(())
    })
}

/// Gate fidelity at the pure state with amplitudes `re + i·im` (length `n`,
/// normalized internally). `im` may be NULL.
///
/// # Safety
/// `choi` must be a live handle; `re` (and non-null `im`) must hold `len`
/// doubles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gf_gate_fidelity_at(
    choi: *const GfChoi,
    re: *const f64,
    im: *const f64,
    len: usize,
    value: *mut f64,
) -> GfStatus {
    guard(|| {
        let c = deref(choi, "choi")?;
        let slot = out(value, "value")?;
        if re.is_null() {
            return Err(Failure::Null("re"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let amps: Vec<C64> = if im.is_null() {
            re.iter().map(|&x| C64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect()
        };
        *slot = gate_fidelity_at(&c.0, &PureState::normalized(amps)?)?;
        Ok(())
    })
}
