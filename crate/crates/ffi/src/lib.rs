//! C ABI over the `polyhom` solver.
//!
//! Systems and solutions are opaque handles owned by the caller and released
//! with the matching `*_free`. Every fallible call returns a [`PhStatus`]; on
//! failure [`ph_last_error_message`] describes the cause on the calling thread.
//! Points are passed as split real/imaginary `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use polyhom::conditioning;
use polyhom::polyspace::{affine_zero_of, PolySystem, ProjectivePoint};
use polyhom::startsys;
use polyhom::tracker::{self, great_circle, TrackResult, TrackStatus, TrackerConfig};
use polyhom::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Shape = 5,
    Numerical = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStart {
    /// Single well-conditioned start zero.
    Shsm = 0,
    /// Roots-of-unity start system with all Bézout-many zeros.
    Bc = 1,
    /// Random start pair drawn from the seed.
    Bp = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhPathStatus {
    Success = 0,
    StepLimit = 1,
    SingularEncounter = 2,
    Uncertified = 3,
}

/// Summary of one tracked path.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhPathInfo {
    pub status: PhPathStatus,
    pub certified: bool,
    pub mu: f64,
    pub residual: f64,
    pub steps: usize,
    pub rejections: usize,
}

/// Opaque polynomial system.
pub struct PhSystem(PolySystem);

/// Opaque set of tracked paths.
pub struct PhSolution(Vec<TrackResult>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PhStatus {
    match e {
        Error::Parse(_) => PhStatus::Parse,
        Error::Shape(_) => PhStatus::Shape,
        Error::InvalidInput(_) | Error::DegreeViolation { .. } | Error::TooManyZeros { .. } => PhStatus::InvalidInput,
        _ => PhStatus::Numerical,
    }
}

fn fail(status: PhStatus, msg: &str) -> PhStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> PhStatus) -> PhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PhStatus::Panic, "internal panic"),
    }
}

fn from_result(r: polyhom::Result<()>) -> PhStatus {
    match r {
        Ok(()) => PhStatus::Ok,
        Err(e) => fail(status_of(&e), &e.to_string()),
    }
}

unsafe fn read_point(re: *const f64, im: *const f64, len: usize) -> Option<Vec<Complex64>> {
    if re.is_null() || im.is_null() {
        return None;
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    Some(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

unsafe fn write_point(z: &[Complex64], re: *mut f64, im: *mut f64) {
    for (k, c) in z.iter().enumerate() {
        *re.add(k) = c.re;
        *im.add(k) = c.im;
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ph_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ph_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a system from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ph_system_from_json(json: *const c_char, out: *mut *mut PhSystem) -> PhStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(PhStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(PhStatus::InvalidUtf8, "system JSON is not UTF-8");
        };
        match PolySystem::from_json(text) {
            Ok(h) => {
                *out = Box::into_raw(Box::new(PhSystem(h)));
                PhStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `sys` must come from [`ph_system_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ph_system_free(sys: *mut PhSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Number of equations `n`; the system has `n + 1` homogeneous variables.
///
/// # Safety
/// `sys` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ph_system_n(sys: *const PhSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.n())
}

/// Bombieri–Weyl norm of the system.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_system_bw_norm(sys: *const PhSystem, out: *mut f64) -> PhStatus {
    guard(|| match (sys.as_ref(), out.is_null()) {
        (Some(s), false) => {
            *out = s.0.bw_norm();
            PhStatus::Ok
        }
        _ => fail(PhStatus::NullPointer, "null argument"),
    })
}

/// Evaluate the system at a homogeneous point of length `n + 1`, writing `n`
/// values.
///
/// # Safety
/// Input arrays must hold `len` doubles and output arrays `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ph_system_evaluate(
    sys: *const PhSystem,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PhStatus {
    guard(|| {
        let Some(s) = sys.as_ref() else {
            return fail(PhStatus::NullPointer, "null system");
        };
        let Some(x) = read_point(re, im, len) else {
            return fail(PhStatus::NullPointer, "null point");
        };
        if out_re.is_null() || out_im.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        if len != s.0.nvars() {
            return fail(PhStatus::Shape, &format!("point has {len} coordinates, system has {}", s.0.nvars()));
        }
        write_point(&s.0.evaluate(&x), out_re, out_im);
        PhStatus::Ok
    })
}

/// Condition number `μ(h, z)` at a homogeneous point (infinite on the
/// singular locus).
///
/// # Safety
/// Input arrays must hold `len` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn ph_mu(sys: *const PhSystem, re: *const f64, im: *const f64, len: usize, out: *mut f64) -> PhStatus {
    guard(|| {
        let Some(s) = sys.as_ref() else {
            return fail(PhStatus::NullPointer, "null system");
        };
        let Some(x) = read_point(re, im, len) else {
            return fail(PhStatus::NullPointer, "null point");
        };
        if out.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        if len != s.0.nvars() {
            return fail(PhStatus::Shape, &format!("point has {len} coordinates, system has {}", s.0.nvars()));
        }
        match ProjectivePoint::new(x) {
            Ok(z) => {
                *out = conditioning::mu(&s.0, &z);
                PhStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// Track from the chosen start system to `sys` along the great circle.
/// With `all` set every start zero is followed (only valid for
/// [`PhStart::Bc`]); otherwise only the first. `seed` matters for
/// [`PhStart::Bp`] only.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_solve(sys: *const PhSystem, start: PhStart, all: bool, seed: u64, out: *mut *mut PhSolution) -> PhStatus {
    guard(|| {
        let Some(s) = sys.as_ref() else {
            return fail(PhStatus::NullPointer, "null system");
        };
        if out.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        *out = ptr::null_mut();
        if all && start != PhStart::Bc {
            return fail(PhStatus::InvalidInput, "all zeros are only known for the BC start system");
        }
        let h = &s.0;
        let pair = match start {
            PhStart::Shsm => Ok(startsys::shsm_pair(h.degrees())),
            PhStart::Bc => startsys::bc_pair(h.degrees()),
            PhStart::Bp => Ok(startsys::bp_sample(h.degrees(), seed)),
        };
        let run = pair.and_then(|mut p| {
            if !all {
                p.zeros.truncate(1);
            }
            let path = great_circle(&p.g, h)?;
            let cfg = TrackerConfig::default();
            Ok(p.zeros.iter().map(|z| tracker::track(&path, z, &cfg)).collect::<Vec<_>>())
        });
        match run {
            Ok(results) => {
                *out = Box::into_raw(Box::new(PhSolution(results)));
                PhStatus::Ok
            }
            Err(e) => fail(status_of(&e), &e.to_string()),
        }
    })
}

/// # Safety
/// `sol` must come from [`ph_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ph_solution_free(sol: *mut PhSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Number of tracked paths.
///
/// # Safety
/// `sol` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn ph_solution_len(sol: *const PhSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.len())
}

unsafe fn path_at<'a>(sol: *const PhSolution, i: usize) -> Result<&'a TrackResult, PhStatus> {
    let s = sol.as_ref().ok_or_else(|| fail(PhStatus::NullPointer, "null solution"))?;
    s.0.get(i)
        .ok_or_else(|| fail(PhStatus::OutOfRange, &format!("path {i} of {}", s.0.len())))
}

/// Status and diagnostics of path `i`.
///
/// # Safety
/// `sol` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ph_solution_path(sol: *const PhSolution, i: usize, out: *mut PhPathInfo) -> PhStatus {
    guard(|| {
        if out.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        match path_at(sol, i) {
            Ok(r) => {
                *out = PhPathInfo {
                    status: match r.status {
                        TrackStatus::Success => PhPathStatus::Success,
                        TrackStatus::StepLimit => PhPathStatus::StepLimit,
                        TrackStatus::SingularEncounter => PhPathStatus::SingularEncounter,
                        TrackStatus::Uncertified => PhPathStatus::Uncertified,
                    },
                    certified: r.certificate.certified,
                    mu: r.mu_end,
                    residual: r.residual,
                    steps: r.steps,
                    rejections: r.rejections,
                };
                PhStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Unit homogeneous endpoint of path `i` (`n + 1` coordinates).
///
/// # Safety
/// Output arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ph_solution_point(sol: *const PhSolution, i: usize, re: *mut f64, im: *mut f64, len: usize) -> PhStatus {
    guard(|| {
        let r = match path_at(sol, i) {
            Ok(r) => r,
            Err(s) => return s,
        };
        if re.is_null() || im.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        let z = r.endpoint.rep();
        if len != z.len() {
            return fail(PhStatus::Shape, &format!("buffer holds {len}, point has {}", z.len()));
        }
        write_point(z, re, im);
        PhStatus::Ok
    })
}

/// Affine coordinates `z_i / z_0` of the endpoint of path `i` (`n` values);
/// fails with [`PhStatus::Numerical`] for zeros at infinity.
///
/// # Safety
/// Output arrays must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ph_solution_affine(sol: *const PhSolution, i: usize, re: *mut f64, im: *mut f64, len: usize) -> PhStatus {
    guard(|| {
        let r = match path_at(sol, i) {
            Ok(r) => r,
            Err(s) => return s,
        };
        if re.is_null() || im.is_null() {
            return fail(PhStatus::NullPointer, "null output");
        }
        let n = r.endpoint.dim() - 1;
        if len != n {
            return fail(PhStatus::Shape, &format!("buffer holds {len}, affine point has {n}"));
        }
        from_result(affine_zero_of(&r.endpoint).map(|z| write_point(&z, re, im)))
    })
}
