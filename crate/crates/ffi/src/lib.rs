//! C ABI over orbitlab.
//!
//! Instances are opaque handles created by one of the `orbitlab_instance_*`
//! constructors and released with [`orbitlab_instance_free`]. Every fallible
//! call returns an [`OrbitlabStatus`]; on failure a message is available from
//! [`orbitlab_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use orbitlab::forge::PeriodicCoreConfig;
use orbitlab::harness::{verify, VerifyOptions};
use orbitlab::instance::Instance;
use orbitlab::stability::{perturbations, ShadowingProfile, StabilityProfile};
use orbitlab::{Error, PointSet, Provenance, Rational};

/// Opaque instance handle.
pub struct OrbitlabInstance {
    inner: Instance,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitlabStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidRational = 3,
    /// Schema, metric-axiom, bijection or relation failure while building an instance.
    InvalidInstance = 4,
    InvalidArgument = 5,
    /// Enumeration cap, sampling saturation or unsaturated orbit.
    Computation = 6,
    BufferTooSmall = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitlabMode {
    Exhaustive = 0,
    Sampled = 1,
}

/// Scale and perturbation source. `epsilon` and `delta` are `"p/q"` strings;
/// `seed` and `count` are read only in sampled mode.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OrbitlabScale {
    pub epsilon: *const c_char,
    pub delta: *const c_char,
    pub radius: usize,
    pub mode: OrbitlabMode,
    pub seed: u64,
    pub count: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OrbitlabStatus {
    match e {
        Error::ParseRational(_) => OrbitlabStatus::InvalidRational,
        Error::NonSquare { .. }
        | Error::Metric(_)
        | Error::NotBijective { .. }
        | Error::Relation(_)
        | Error::Schema(_)
        | Error::Json(_) => OrbitlabStatus::InvalidInstance,
        Error::Argument(_) | Error::DegenerateScale => OrbitlabStatus::InvalidArgument,
        Error::EnumerationCap { .. } | Error::SamplingSaturated { .. } | Error::RadiusTooSmall { .. } => {
            OrbitlabStatus::Computation
        }
        Error::Io(_) => OrbitlabStatus::Io,
    }
}

struct Fail(OrbitlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OrbitlabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrbitlabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OrbitlabStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(OrbitlabStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(OrbitlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn instance_arg<'a>(p: *const OrbitlabInstance) -> Result<&'a Instance, Fail> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Fail(OrbitlabStatus::NullArgument, "instance is null".into()))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(OrbitlabStatus::NullArgument, format!("{what} is null")))
}

struct ParsedScale {
    epsilon: Rational,
    delta: Rational,
    radius: usize,
    mode: Provenance,
}

unsafe fn scale_arg(p: *const OrbitlabScale) -> Result<ParsedScale, Fail> {
    let s = p
        .as_ref()
        .ok_or_else(|| Fail(OrbitlabStatus::NullArgument, "scale is null".into()))?;
    let parse = |q: *const c_char, what: &str| -> Result<Rational, Fail> {
        let text = str_arg(q, what)?;
        text.parse()
            .map_err(|e: orbitlab::error::ParseRationalError| Fail(OrbitlabStatus::InvalidRational, e.to_string()))
    };
    Ok(ParsedScale {
        epsilon: parse(s.epsilon, "epsilon")?,
        delta: parse(s.delta, "delta")?,
        radius: s.radius,
        mode: match s.mode {
            OrbitlabMode::Exhaustive => Provenance::Exhaustive,
            OrbitlabMode::Sampled => Provenance::Sampled {
                seed: s.seed,
                count: s.count,
            },
        },
    })
}

fn hand_out(inst: Instance, out: &mut *mut OrbitlabInstance) {
    *out = Box::into_raw(Box::new(OrbitlabInstance { inner: inst }));
}

unsafe fn write_points(set: &PointSet, buf: *mut usize, cap: usize, len: *mut usize) -> Result<(), Fail> {
    *out_arg(len, "len")? = set.len();
    if set.len() > cap {
        return Err(Fail(
            OrbitlabStatus::BufferTooSmall,
            format!("{} points do not fit in a buffer of {cap}", set.len()),
        ));
    }
    if !set.is_empty() && buf.is_null() {
        return Err(Fail(OrbitlabStatus::NullArgument, "buffer is null".into()));
    }
    for (i, &x) in set.iter().enumerate() {
        *buf.add(i) = x;
    }
    Ok(())
}

/// Loads an instance file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_load(
    path: *const c_char,
    out: *mut *mut OrbitlabInstance,
) -> OrbitlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inst = Instance::load(Path::new(str_arg(path, "path")?))?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Parses an instance from JSON text.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_from_json(
    json: *const c_char,
    out: *mut *mut OrbitlabInstance,
) -> OrbitlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inst = Instance::from_json(str_arg(json, "json")?)?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Builds a named fixture: `"L3"` or `"C6"`.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_named(
    name: *const c_char,
    out: *mut *mut OrbitlabInstance,
) -> OrbitlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inst = Instance::named(str_arg(name, "name")?)?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Builds the periodic-core example with period `t` and depth `k`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_periodic_core(
    t: usize,
    k: usize,
    out: *mut *mut OrbitlabInstance,
) -> OrbitlabStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inst = Instance::periodic_core(&PeriodicCoreConfig::new(t, k))?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_free(inst: *mut OrbitlabInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_instance_point_count(inst: *const OrbitlabInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.action.len())
}

/// Writes the persistent points, ascending, into `buf`. `*len` receives the
/// set size even when the buffer is too small.
///
/// # Safety
/// `inst` and `scale` must be valid; `buf` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_persistent_points(
    inst: *const OrbitlabInstance,
    scale: *const OrbitlabScale,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> OrbitlabStatus {
    guard(|| {
        let inst = instance_arg(inst)?;
        let s = scale_arg(scale)?;
        let ps = perturbations(&inst.action, &s.delta, s.radius, s.mode)?;
        let set = ShadowingProfile::compute(&inst.action, &s.epsilon, &ps)?.persistent();
        write_points(&set, buf, cap, len)
    })
}

/// Writes the topologically stable points, ascending, into `buf`.
///
/// # Safety
/// As for [`orbitlab_persistent_points`].
#[no_mangle]
pub unsafe extern "C" fn orbitlab_stable_points(
    inst: *const OrbitlabInstance,
    scale: *const OrbitlabScale,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> OrbitlabStatus {
    guard(|| {
        let inst = instance_arg(inst)?;
        let s = scale_arg(scale)?;
        let ps = perturbations(&inst.action, &s.delta, s.radius, s.mode)?;
        let set = StabilityProfile::compute(&inst.action, &s.epsilon, &ps)?.set.members;
        write_points(&set, buf, cap, len)
    })
}

/// Runs the verification suite. `*report` receives the JSON report, to be
/// released with [`orbitlab_string_free`]; `*all_passed` is 1 when no check
/// failed and 0 otherwise.
///
/// # Safety
/// `inst` and `scale` must be valid; `report` and `all_passed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_verify(
    inst: *const OrbitlabInstance,
    scale: *const OrbitlabScale,
    trials: usize,
    report: *mut *mut c_char,
    all_passed: *mut c_int,
) -> OrbitlabStatus {
    guard(|| {
        let inst = instance_arg(inst)?;
        let s = scale_arg(scale)?;
        let report = out_arg(report, "report")?;
        let all_passed = out_arg(all_passed, "all_passed")?;
        let seed = match s.mode {
            Provenance::Sampled { seed, .. } => seed,
            Provenance::Exhaustive => 0,
        };
        let rep = verify(
            inst,
            &VerifyOptions {
                epsilon: s.epsilon,
                delta: s.delta,
                radius: s.radius,
                mode: s.mode,
                trials,
                seed,
                timings: false,
            },
        )?;
        *all_passed = rep.all_passed() as c_int;
        *report = CString::new(rep.to_json()).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn orbitlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn orbitlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
