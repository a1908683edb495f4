//! C ABI over `sace-kit`.
//!
//! Projects are opened into an opaque [`SaceProject`] handle. Every call
//! returns a [`SaceStatus`]; on failure a description is available from
//! [`sace_last_error_message`] on the same thread. Results come back as
//! NUL-terminated UTF-8 strings (JSON unless noted) that the caller releases
//! with [`sace_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sace_kit::assemble::assemble;
use sace_kit::gsn::to_dot;
use sace_kit::hazard::{analyse, DecisionFile};
use sace_kit::lint::lint;
use sace_kit::odm::{evaluate_trace, read_trace_csv, BoundaryRecognizerSpec};
use sace_kit::patterns::{get_pattern, PatternId};
use sace_kit::project::{Project, ProjectError};
use sace_kit::registry::RegistryError;
use sace_kit::req::parse;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaceStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The project directory or its manifest could not be read.
    NotFound = 3,
    /// A document or argument could not be parsed.
    ParseError = 4,
    /// The input parsed but was rejected.
    InvalidInput = 5,
    /// An unexpected internal failure, including a caught panic.
    Internal = 6,
}

/// An opened project. Only ever handled through a pointer.
pub struct SaceProject {
    project: Project,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: SaceStatus,
    message: String,
}

impl Failure {
    fn new(status: SaceStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<ProjectError> for Failure {
    fn from(e: ProjectError) -> Self {
        let status = match &e {
            ProjectError::Registry(RegistryError::Io { .. }) => SaceStatus::NotFound,
            ProjectError::Registry(RegistryError::Manifest { .. }) | ProjectError::Parse { .. } => {
                SaceStatus::ParseError
            }
            _ => SaceStatus::InvalidInput,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<&str>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("NUL bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, recording its error and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SaceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SaceStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(Some(&failure.message));
            failure.status
        }
        Err(_) => {
            set_last_error(Some("internal panic"));
            SaceStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(
            SaceStatus::NullArgument,
            format!("{what} is null"),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(SaceStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const SaceProject) -> Result<&'a SaceProject, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(SaceStatus::NullArgument, "project handle is null"))
}

unsafe fn write_out(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text)
        .map_err(|_| Failure::new(SaceStatus::Internal, "result contains a NUL byte"))?;
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Failure::new(SaceStatus::Internal, e.to_string()))
}

/// Clears `*out` and rejects a null out-pointer before any other work.
unsafe fn prepare_out(out: *mut *mut c_char) -> Option<SaceStatus> {
    if out.is_null() {
        set_last_error(Some("output pointer is null"));
        return Some(SaceStatus::NullArgument);
    }
    *out = ptr::null_mut();
    None
}

/// Opens the project rooted at `root` (a directory holding `sace.json`).
///
/// # Safety
/// `root` must be a valid NUL-terminated string and `out` a valid pointer.
/// The handle written to `*out` must be released with [`sace_project_free`].
#[no_mangle]
pub unsafe extern "C" fn sace_project_open(
    root: *const c_char,
    out: *mut *mut SaceProject,
) -> SaceStatus {
    if out.is_null() {
        set_last_error(Some("output pointer is null"));
        return SaceStatus::NullArgument;
    }
    *out = ptr::null_mut();
    guard(|| {
        let root = read_str(root, "root")?;
        let project = Project::load(root)?;
        *out = Box::into_raw(Box::new(SaceProject { project }));
        Ok(())
    })
}

/// Releases a project handle. Null is ignored.
///
/// # Safety
/// `project` must come from [`sace_project_open`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sace_project_free(project: *mut SaceProject) {
    if !project.is_null() {
        drop(Box::from_raw(project));
    }
}

/// Lint findings as a JSON array of `{code, severity, locus, message}`.
///
/// # Safety
/// `project` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_project_lint_json(
    project: *const SaceProject,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let p = handle(project)?;
        let findings = lint(&p.project)?;
        write_out(out, to_json(&findings)?)
    })
}

/// The assembled assurance case as Graphviz DOT text.
///
/// # Safety
/// `project` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_project_assemble_dot(
    project: *const SaceProject,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let p = handle(project)?;
        let assembly = assemble(&p.project)?;
        let dot = to_dot(&assembly.argument.graph)
            .map_err(|e| Failure::new(SaceStatus::Internal, e.to_string()))?;
        write_out(out, dot)
    })
}

/// Readiness of one process stage. Pass a negative `tier` for stages that
/// are not tier-indexed.
///
/// # Safety
/// `project` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_project_stage_readiness_json(
    project: *const SaceProject,
    stage: u8,
    tier: i32,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let p = handle(project)?;
        let tier = u32::try_from(tier).ok();
        let report = p
            .project
            .registry
            .stage_readiness(stage, tier)
            .map_err(|e| Failure::new(SaceStatus::InvalidInput, e.to_string()))?;
        write_out(out, to_json(&report)?)
    })
}

/// Hazardous scenarios derived from the project's decision points.
///
/// # Safety
/// `project` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_project_hazards_json(
    project: *const SaceProject,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let p = handle(project)?;
        let (_, scenarios) = p.project.hazard_analysis()?;
        write_out(out, to_json(&scenarios)?)
    })
}

/// Classified decision tables and scenarios for a `decisions.json` document
/// given as text. The result is `{"tables": [...], "scenarios": [...]}`.
///
/// # Safety
/// `decisions` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_enumerate_json(
    decisions: *const c_char,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let text = read_str(decisions, "decisions")?;
        let file: DecisionFile = serde_json::from_str(text)
            .map_err(|e| Failure::new(SaceStatus::ParseError, e.to_string()))?;
        let (tables, scenarios) =
            analyse(&file).map_err(|e| Failure::new(SaceStatus::InvalidInput, e.to_string()))?;
        let value = serde_json::json!({ "tables": tables, "scenarios": scenarios });
        write_out(out, to_json(&value)?)
    })
}

/// Parses one structured requirement into its clauses and template.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_requirement_parse_json(
    text: *const c_char,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let text = read_str(text, "text")?;
        let r = parse(text).map_err(|e| Failure::new(SaceStatus::ParseError, e.to_string()))?;
        write_out(out, to_json(&r)?)
    })
}

/// Runs a boundary recognizer (JSON) over a `t,value,truth_inside` CSV trace
/// and returns the trace metrics.
///
/// # Safety
/// `spec` and `csv` must be valid NUL-terminated strings and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_boundary_eval_json(
    spec: *const c_char,
    csv: *const c_char,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let spec: BoundaryRecognizerSpec = serde_json::from_str(read_str(spec, "spec")?)
            .map_err(|e| Failure::new(SaceStatus::ParseError, e.to_string()))?;
        let (trace, truth) = read_trace_csv(read_str(csv, "csv")?.as_bytes())
            .map_err(|e| Failure::new(SaceStatus::ParseError, e.to_string()))?;
        let metrics = evaluate_trace(&spec, &trace, &truth)
            .map_err(|e| Failure::new(SaceStatus::InvalidInput, e.to_string()))?;
        write_out(out, to_json(&metrics)?)
    })
}

/// A built-in argument pattern, by name (`N-SOC`) or artifact letter (`N`).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sace_pattern_json(
    name: *const c_char,
    out: *mut *mut c_char,
) -> SaceStatus {
    if let Some(s) = prepare_out(out) {
        return s;
    }
    guard(|| {
        let id: PatternId =
            read_str(name, "name")?
                .parse()
                .map_err(|e: sace_kit::patterns::UnknownPattern| {
                    Failure::new(SaceStatus::InvalidInput, e.to_string())
                })?;
        write_out(out, to_json(&get_pattern(id))?)
    })
}

/// Message for the last failed call on this thread, or null after a
/// successful call. The pointer stays valid until the next call on the
/// same thread.
#[no_mangle]
pub extern "C" fn sace_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sace_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
