//! C ABI over `vtcp-core`.
//!
//! Every entry point returns a [`VtcpStatus`]; on failure the message is available from
//! [`vtcp_last_error_message`] on the same thread. Instances and solve reports are opaque
//! handles released with their `_free` function. Strings returned through `char **`
//! out-parameters are owned by the caller and released with [`vtcp_string_free`].
//!
//! Panics never cross the boundary: they are reported as [`VtcpStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use vtcp_core::classes::{analyze, SearchConfig, TensorClass, TensorPair};
use vtcp_core::solvers::{self, Method, SolveReport, SolverConfig, Status};
use vtcp_core::workbench::{self, GenKind, InstanceMeta};
use vtcp_core::{DenseTensor, VtcpError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VtcpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    Unknown = 5,
    Precondition = 6,
    NotConverged = 7,
    Domain = 8,
    BufferTooSmall = 9,
    Panic = 99,
}

/// Solver selector for [`vtcp_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VtcpMethod {
    Newton = 0,
    Homotopy = 1,
    Mtensor = 2,
    Oracle = 3,
}

/// Termination state stored in a solve report.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VtcpSolveStatus {
    Converged = 0,
    MaxIters = 1,
    Diverged = 2,
    PreconditionFailed = 3,
}

/// A problem instance: two tensors and two vectors.
pub struct VtcpInstance {
    inner: solvers::VtcpInstance,
}

/// Outcome of one solver run.
pub struct VtcpReport {
    inner: SolveReport,
}

const DEFAULT_CLASSES: [TensorClass; 7] = [
    TensorClass::Vr0,
    TensorClass::Ve,
    TensorClass::Vp,
    TensorClass::Vp1,
    TensorClass::Vp2,
    TensorClass::StrongVp,
    TensorClass::SemiPositive,
];

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(VtcpStatus, String);

impl From<VtcpError> for Failure {
    fn from(e: VtcpError) -> Self {
        let status = match &e {
            VtcpError::Dimension(_)
            | VtcpError::InvalidTensor(_)
            | VtcpError::InvalidField { .. }
            | VtcpError::DimensionTooLarge { .. } => VtcpStatus::InvalidArgument,
            VtcpError::Parse { .. } | VtcpError::FormatVersion(_) => VtcpStatus::Parse,
            VtcpError::Io(_) => VtcpStatus::Io,
            VtcpError::UnknownClass(_) | VtcpError::Unknown { .. } => VtcpStatus::Unknown,
            VtcpError::Precondition(_) => VtcpStatus::Precondition,
            VtcpError::NotConverged { .. } => VtcpStatus::NotConverged,
            VtcpError::Domain(_) => VtcpStatus::Domain,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(VtcpStatus::Domain, format!("serialization failed: {e}"))
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Outcome) -> VtcpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VtcpStatus::Ok,
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
            VtcpStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(VtcpStatus::NullPointer, format!("`{name}` is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(VtcpStatus::InvalidArgument, msg.into())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Outcome<&'a mut T> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{name}` is not valid UTF-8")))
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Outcome<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn give_string(s: String, dst: &mut *mut c_char) -> Outcome {
    let c = CString::new(s).map_err(|_| invalid("string contains a NUL byte"))?;
    *dst = c.into_raw();
    Ok(())
}

fn give_instance(inner: solvers::VtcpInstance, dst: &mut *mut VtcpInstance) {
    *dst = Box::into_raw(Box::new(VtcpInstance { inner }));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn vtcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer stays valid until
/// the next failing call or [`vtcp_clear_error`] on the same thread.
#[no_mangle]
pub extern "C" fn vtcp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn vtcp_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn vtcp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an instance from row-major tensor entries. `a1` and `a2` hold `dim^order`
/// values, `q1` and `q2` hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_new(
    order: usize,
    dim: usize,
    a1: *const f64,
    a2: *const f64,
    q1: *const f64,
    q2: *const f64,
    out_instance: *mut *mut VtcpInstance,
) -> VtcpStatus {
    guard(|| {
        let dst = out(out_instance, "out_instance")?;
        let len = u32::try_from(order)
            .ok()
            .and_then(|m| dim.checked_pow(m))
            .ok_or_else(|| invalid("dim^order overflows"))?;
        let t1 = DenseTensor::new(order, dim, slice(a1, len, "a1")?.to_vec())?;
        let t2 = DenseTensor::new(order, dim, slice(a2, len, "a2")?.to_vec())?;
        let q1 = slice(q1, dim, "q1")?.to_vec();
        let q2 = slice(q2, dim, "q2")?.to_vec();
        give_instance(solvers::VtcpInstance::new(TensorPair::new(t1, t2)?, q1, q2)?, dst);
        Ok(())
    })
}

/// Parses an instance from JSON text in the instance file format.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_from_json(json: *const c_char, out_instance: *mut *mut VtcpInstance) -> VtcpStatus {
    guard(|| {
        let dst = out(out_instance, "out_instance")?;
        let (inst, _) = workbench::parse_instance(string(json, "json")?)?;
        give_instance(inst, dst);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_load(path: *const c_char, out_instance: *mut *mut VtcpInstance) -> VtcpStatus {
    guard(|| {
        let dst = out(out_instance, "out_instance")?;
        give_instance(workbench::load_instance(string(path, "path")?)?, dst);
        Ok(())
    })
}

/// Instance of a registered worked example, such as `"4.1"`. Examples recorded without
/// vectors get `q1 = q2 = 0`.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_example(id: *const c_char, out_instance: *mut *mut VtcpInstance) -> VtcpStatus {
    guard(|| {
        let dst = out(out_instance, "out_instance")?;
        let id = string(id, "id")?;
        give_instance(workbench::generate_instance(GenKind::PaperExample, 0, 0, 0, Some(id))?, dst);
        Ok(())
    })
}

/// Seeded random instance. `kind` is `"z-semipositive-pair"` or `"random-dense-pair"`.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_generate(
    kind: *const c_char,
    order: usize,
    dim: usize,
    seed: u64,
    out_instance: *mut *mut VtcpInstance,
) -> VtcpStatus {
    guard(|| {
        let dst = out(out_instance, "out_instance")?;
        let kind: GenKind = string(kind, "kind")?.parse()?;
        if kind == GenKind::PaperExample {
            return Err(invalid("use vtcp_instance_example for registered examples"));
        }
        give_instance(workbench::generate_instance(kind, order, dim, seed, None)?, dst);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_save(instance: *const VtcpInstance, path: *const c_char) -> VtcpStatus {
    guard(|| {
        let inst = deref(instance, "instance")?;
        workbench::save_instance(&inst.inner, &InstanceMeta::default(), string(path, "path")?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_to_json(instance: *const VtcpInstance, out_json: *mut *mut c_char) -> VtcpStatus {
    guard(|| {
        let inst = deref(instance, "instance")?;
        let dst = out(out_json, "out_json")?;
        give_string(workbench::instance_to_json(&inst.inner, &InstanceMeta::default()), dst)
    })
}

/// Tensor order, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_order(instance: *const VtcpInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.order())
}

/// Dimension, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_dim(instance: *const VtcpInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.dim())
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_instance_free(instance: *mut VtcpInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Writes `min(q1 + A1 x^(m-1), q2 + A2 x^(m-1))` into `out_residual`. Both buffers hold
/// `dim` values.
#[no_mangle]
pub unsafe extern "C" fn vtcp_residual(instance: *const VtcpInstance, x: *const f64, out_residual: *mut f64) -> VtcpStatus {
    guard(|| {
        let inst = &deref(instance, "instance")?.inner;
        let n = inst.dim();
        let r = solvers::residual(inst, slice(x, n, "x")?)?;
        if out_residual.is_null() {
            return Err(null("out_residual"));
        }
        std::slice::from_raw_parts_mut(out_residual, n).copy_from_slice(&r);
        Ok(())
    })
}

/// Checks feasibility, complementarity and the residual at `x` (length `dim`) within `tol`.
#[no_mangle]
pub unsafe extern "C" fn vtcp_verify(
    instance: *const VtcpInstance,
    x: *const f64,
    tol: f64,
    out_passed: *mut bool,
) -> VtcpStatus {
    guard(|| {
        let inst = &deref(instance, "instance")?.inner;
        let dst = out(out_passed, "out_passed")?;
        if tol.is_nan() || tol < 0.0 {
            return Err(invalid("`tol` must be non-negative"));
        }
        *dst = solvers::verify_solution(inst, slice(x, inst.dim(), "x")?, tol)?.passed;
        Ok(())
    })
}

/// Runs a solver. `method` is a [`VtcpMethod`] value. `x0` may be NULL and is only
/// accepted by Newton. `tol <= 0` and `max_iters == 0` select the defaults.
#[no_mangle]
pub unsafe extern "C" fn vtcp_solve(
    instance: *const VtcpInstance,
    method: i32,
    x0: *const f64,
    tol: f64,
    max_iters: usize,
    seed: u64,
    out_report: *mut *mut VtcpReport,
) -> VtcpStatus {
    guard(|| {
        let inst = &deref(instance, "instance")?.inner;
        let dst = out(out_report, "out_report")?;
        let method = match method {
            0 => Method::Newton,
            1 => Method::Homotopy,
            2 => Method::Mtensor,
            3 => Method::Oracle,
            other => return Err(invalid(format!("unknown method code {other}"))),
        };
        let mut cfg = SolverConfig {
            seed,
            ..Default::default()
        };
        if tol > 0.0 {
            cfg.tol_residual = tol;
        }
        if max_iters > 0 {
            cfg.max_iters = max_iters;
        }
        let start = if x0.is_null() { None } else { Some(slice(x0, inst.dim(), "x0")?) };
        let report = solvers::solve(inst, method, start, &cfg)?;
        *dst = Box::into_raw(Box::new(VtcpReport { inner: report }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_report_status(report: *const VtcpReport, out_status: *mut VtcpSolveStatus) -> VtcpStatus {
    guard(|| {
        let r = deref(report, "report")?;
        *out(out_status, "out_status")? = match r.inner.status {
            Status::Converged => VtcpSolveStatus::Converged,
            Status::MaxIters => VtcpSolveStatus::MaxIters,
            Status::Diverged => VtcpSolveStatus::Diverged,
            Status::PreconditionFailed => VtcpSolveStatus::PreconditionFailed,
        };
        Ok(())
    })
}

/// Length of the final iterate, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn vtcp_report_dim(report: *const VtcpReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.x.len())
}

/// Copies the final iterate into `out_x`, which must hold at least `len` values.
#[no_mangle]
pub unsafe extern "C" fn vtcp_report_x(report: *const VtcpReport, out_x: *mut f64, len: usize) -> VtcpStatus {
    guard(|| {
        let x = &deref(report, "report")?.inner.x;
        if len < x.len() {
            return Err(Failure(
                VtcpStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", x.len()),
            ));
        }
        if out_x.is_null() {
            return Err(null("out_x"));
        }
        std::slice::from_raw_parts_mut(out_x, x.len()).copy_from_slice(x);
        Ok(())
    })
}

/// Infinity norm of the residual at the final iterate, or NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn vtcp_report_residual(report: *const VtcpReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.residual_inf_norm)
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_report_iterations(report: *const VtcpReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.iterations)
}

/// Full report as JSON, including traces and oracle solutions.
#[no_mangle]
pub unsafe extern "C" fn vtcp_report_to_json(report: *const VtcpReport, out_json: *mut *mut c_char) -> VtcpStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let dst = out(out_json, "out_json")?;
        give_string(serde_json::to_string(&r.inner)?, dst)
    })
}

#[no_mangle]
pub unsafe extern "C" fn vtcp_report_free(report: *mut VtcpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

fn search_config(seed: u64, starts: usize) -> SearchConfig {
    let mut cfg = SearchConfig::with_seed(seed);
    if starts > 0 {
        cfg.num_starts = starts;
    }
    cfg
}

/// Class verdicts as a JSON array. `classes` is a comma-separated list such as
/// `"vp,vp1,z"`, or NULL for the pair classes. `starts == 0` selects the default.
#[no_mangle]
pub unsafe extern "C" fn vtcp_analyze_json(
    instance: *const VtcpInstance,
    classes: *const c_char,
    seed: u64,
    starts: usize,
    out_json: *mut *mut c_char,
) -> VtcpStatus {
    guard(|| {
        let inst = &deref(instance, "instance")?.inner;
        let dst = out(out_json, "out_json")?;
        let list = if classes.is_null() {
            DEFAULT_CLASSES.to_vec()
        } else {
            string(classes, "classes")?
                .split(',')
                .map(|s| s.trim().parse::<TensorClass>())
                .collect::<Result<Vec<_>, _>>()?
        };
        let verdicts = analyze(inst.pair(), &list, &search_config(seed, starts))?;
        give_string(serde_json::to_string(&verdicts)?, dst)
    })
}

/// Re-checks the facts recorded for worked example `id`, or for every example when `id`
/// is NULL. Writes the reports as a JSON array and whether every fact held.
#[no_mangle]
pub unsafe extern "C" fn vtcp_reproduce_json(
    id: *const c_char,
    seed: u64,
    starts: usize,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> VtcpStatus {
    guard(|| {
        let dst = out(out_json, "out_json")?;
        let passed = out(out_passed, "out_passed")?;
        let search = search_config(seed, starts);
        let solver = SolverConfig::default();
        let reports = if id.is_null() {
            workbench::reproduce_all(&search, &solver)?
        } else {
            vec![workbench::reproduce(string(id, "id")?, &search, &solver)?]
        };
        *passed = reports.iter().all(|r| r.passed);
        give_string(serde_json::to_string(&reports)?, dst)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_codes() {
        let f: Failure = VtcpError::Parse {
            line: 1,
            column: 2,
            message: "x".into(),
        }
        .into();
        assert_eq!(f.0, VtcpStatus::Parse);
        let f: Failure = VtcpError::UnknownClass("vq".into()).into();
        assert_eq!(f.0, VtcpStatus::Unknown);
        let f: Failure = VtcpError::Io("p: gone".into()).into();
        assert_eq!(f.0, VtcpStatus::Io);
    }

    #[test]
    fn panics_become_status() {
        vtcp_clear_error();
        let s = guard(|| panic!("boom"));
        assert_eq!(s, VtcpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(vtcp_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(vtcp_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
