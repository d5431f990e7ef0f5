//! C ABI over `cfr_core`.
//!
//! Programs, property sets and refinement results are opaque heap handles
//! released with their `*_free` function. Every fallible call returns a
//! [`CfrStatus`]; on anything but `CFR_STATUS_OK` a description is available
//! from [`cfr_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`cfr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cfr_core::domain::{derive_properties, parse_properties, print_properties};
use cfr_core::equiv::{differential, sample_goals};
use cfr_core::interp::{check_property_soundness, solve, OutcomeKind};
use cfr_core::specialize::{emit, specialize};
use cfr_core::syntax::{parse_goal, parse_program, print_program};
use cfr_core::{Entry, Program, PropertySet, ResidualProgram, SpecConfig};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invalid = 4,
    Runtime = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfrOutcome {
    Success = 0,
    Failure = 1,
    BudgetExhausted = 2,
}

/// Result of [`cfr_run`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct CfrRunResult {
    pub outcome: CfrOutcome,
    /// Number of calls made, including those undone by backtracking.
    pub steps: u64,
    /// Whether every recorded call's properties hold at its values.
    pub properties_sound: bool,
}

/// Result of [`cfr_check_equiv`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CfrEquivReport {
    pub trials: u64,
    pub agreements: u64,
    pub disagreements: u64,
    pub budget_exhausted: u64,
}

pub struct CfrProgram(Program);

pub struct CfrProperties(PropertySet);

pub struct CfrResidual(ResidualProgram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(CfrStatus, String);

type FfiResult<T> = Result<T, Fail>;

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Run `f`, record any error, and turn panics into `CFR_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> CfrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfrStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            CfrStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Fail(CfrStatus::NullArgument, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CfrStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Fail(CfrStatus::NullArgument, format!("{what} is NULL")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Fail(CfrStatus::NullArgument, format!("{what} is NULL")))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NULs removed").into_raw()
}

fn parse_err(e: impl std::fmt::Display) -> Fail {
    Fail(CfrStatus::Parse, e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> Fail {
    Fail(CfrStatus::Invalid, e.to_string())
}

/// Message for the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cfr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse a program in clause syntax.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out_program` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_program_parse(source: *const c_char, out_program: *mut *mut CfrProgram) -> CfrStatus {
    guard(|| {
        let slot = out(out_program, "out_program")?;
        let program = parse_program(text(source, "source")?).map_err(parse_err)?;
        *slot = Box::into_raw(Box::new(CfrProgram(program)));
        Ok(())
    })
}

/// # Safety
/// `program` must be a live handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_program_print(program: *const CfrProgram, out_text: *mut *mut c_char) -> CfrStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = c_string(print_program(&handle(program, "program")?.0));
        Ok(())
    })
}

/// # Safety
/// `program` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfr_program_free(program: *mut CfrProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Properties read off the clause guards of `program`.
///
/// # Safety
/// `program` must be a live handle and `out_props` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_properties_derive(
    program: *const CfrProgram,
    out_props: *mut *mut CfrProperties,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_props, "out_props")?;
        let psi = derive_properties(&handle(program, "program")?.0);
        *slot = Box::into_raw(Box::new(CfrProperties(psi)));
        Ok(())
    })
}

/// Parse a properties file for the predicates of `program`.
///
/// # Safety
/// `source` must be a NUL-terminated string, `program` a live handle and
/// `out_props` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_properties_parse(
    source: *const c_char,
    program: *const CfrProgram,
    out_props: *mut *mut CfrProperties,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_props, "out_props")?;
        let program = handle(program, "program")?;
        let psi = parse_properties(text(source, "source")?, &program.0).map_err(parse_err)?;
        *slot = Box::into_raw(Box::new(CfrProperties(psi)));
        Ok(())
    })
}

/// # Safety
/// `props` must be a live handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_properties_print(props: *const CfrProperties, out_text: *mut *mut c_char) -> CfrStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = c_string(print_properties(&handle(props, "props")?.0));
        Ok(())
    })
}

/// # Safety
/// `props` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfr_properties_free(props: *mut CfrProperties) {
    if !props.is_null() {
        drop(Box::from_raw(props));
    }
}

/// Refine `program` from the entry predicate `entry`. `prefix` may be NULL
/// for the default `solve__`.
///
/// # Safety
/// Handles must be live, strings NUL-terminated (or `prefix` NULL) and
/// `out_residual` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_refine(
    program: *const CfrProgram,
    props: *const CfrProperties,
    entry: *const c_char,
    prefix: *const c_char,
    strengthen: bool,
    out_residual: *mut *mut CfrResidual,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_residual, "out_residual")?;
        let program = handle(program, "program")?;
        let props = handle(props, "props")?;
        let mut cfg = SpecConfig::new(Entry::Predicate(text(entry, "entry")?.to_owned()));
        cfg.strengthen = strengthen;
        if !prefix.is_null() {
            cfg.prefix = text(prefix, "prefix")?.to_owned();
        }
        let residual = specialize(&program.0, &props.0, &cfg).map_err(invalid)?;
        *slot = Box::into_raw(Box::new(CfrResidual(residual)));
        Ok(())
    })
}

/// The refined program in clause syntax.
///
/// # Safety
/// `residual` must be a live handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_residual_emit(residual: *const CfrResidual, out_text: *mut *mut c_char) -> CfrStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = c_string(emit(&handle(residual, "residual")?.0));
        Ok(())
    })
}

/// Number of versions, or 0 for a NULL handle.
///
/// # Safety
/// `residual` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfr_residual_version_count(residual: *const CfrResidual) -> usize {
    residual.as_ref().map_or(0, |r| r.0.versions().len())
}

/// Name of the entry version.
///
/// # Safety
/// `residual` must be a live handle and `out_name` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_residual_entry_name(
    residual: *const CfrResidual,
    out_name: *mut *mut c_char,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_name, "out_name")?;
        let name = handle(residual, "residual")?
            .0
            .entry_name()
            .expect("a refinement has an entry version");
        *slot = c_string(name.to_owned());
        Ok(())
    })
}

/// # Safety
/// `residual` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cfr_residual_free(residual: *mut CfrResidual) {
    if !residual.is_null() {
        drop(Box::from_raw(residual));
    }
}

/// Run the ground goal `goal` (e.g. `"while0(5,3,10)"`) for at most
/// `max_steps` calls.
///
/// # Safety
/// Handles must be live, `goal` NUL-terminated and `out_result` valid.
#[no_mangle]
pub unsafe extern "C" fn cfr_run(
    program: *const CfrProgram,
    props: *const CfrProperties,
    goal: *const c_char,
    max_steps: u64,
    out_result: *mut CfrRunResult,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let program = handle(program, "program")?;
        let props = handle(props, "props")?;
        let goal = parse_goal(text(goal, "goal")?).map_err(parse_err)?;
        let budget = usize::try_from(max_steps).unwrap_or(usize::MAX);
        let outcome =
            solve(&goal, &props.0, &program.0, budget).map_err(|e| Fail(CfrStatus::Runtime, e.to_string()))?;
        *slot = CfrRunResult {
            outcome: match outcome.kind() {
                OutcomeKind::Success => CfrOutcome::Success,
                OutcomeKind::Failure => CfrOutcome::Failure,
                OutcomeKind::BudgetExhausted => CfrOutcome::BudgetExhausted,
            },
            steps: outcome.trace().step_count as u64,
            properties_sound: check_property_soundness(outcome.trace(), &props.0),
        };
        Ok(())
    })
}

/// Compare `original` from `entry` against `refined` from `entry_version`
/// on `trials` goals with integer arguments in `[lo, hi]` drawn from `seed`.
///
/// # Safety
/// Handles must be live, strings NUL-terminated and `out_report` valid.
#[no_mangle]
pub unsafe extern "C" fn cfr_check_equiv(
    original: *const CfrProgram,
    refined: *const CfrProgram,
    props: *const CfrProperties,
    entry: *const c_char,
    entry_version: *const c_char,
    trials: u64,
    lo: i64,
    hi: i64,
    seed: u64,
    max_steps: u64,
    out_report: *mut CfrEquivReport,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        let original = handle(original, "original")?;
        let refined = handle(refined, "refined")?;
        let props = handle(props, "props")?;
        let entry = text(entry, "entry")?;
        let entry_version = text(entry_version, "entry_version")?;
        let arity = original
            .0
            .arity(entry)
            .ok_or_else(|| invalid(format!("unknown entry predicate `{entry}`")))?;
        if lo > hi {
            return Err(invalid(format!("empty range {lo}..{hi}")));
        }
        if max_steps == 0 {
            return Err(invalid("max_steps must be positive"));
        }
        let n = usize::try_from(trials).map_err(invalid)?;
        let goals = sample_goals(entry, arity, lo, hi, n, seed);
        let budget = usize::try_from(max_steps).unwrap_or(usize::MAX);
        let report = differential(&original.0, &refined.0, entry_version, &goals, &props.0, budget)
            .map_err(|e| Fail(CfrStatus::Runtime, e.to_string()))?;
        *slot = CfrEquivReport {
            trials: report.trials as u64,
            agreements: report.agreements as u64,
            disagreements: report.disagreements.len() as u64,
            budget_exhausted: report.budget_exhausted as u64,
        };
        Ok(())
    })
}

/// Copy of a residual program as a plain program handle, e.g. to pass to
/// [`cfr_check_equiv`] or [`cfr_run`].
///
/// # Safety
/// `residual` must be a live handle and `out_program` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cfr_residual_program(
    residual: *const CfrResidual,
    out_program: *mut *mut CfrProgram,
) -> CfrStatus {
    guard(|| {
        let slot = out(out_program, "out_program")?;
        let program = handle(residual, "residual")?.0.program().clone();
        *slot = Box::into_raw(Box::new(CfrProgram(program)));
        Ok(())
    })
}
