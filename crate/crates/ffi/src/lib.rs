//! C ABI over the `stcode` library.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns an [`StcStatus`]; on failure a message is kept
//! per thread and can be read with [`stc_last_error_message`]. Strings
//! returned by the library are owned by the caller and released with
//! [`stc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stcode::decode::{Experiment, NoiseModel, DEFAULT_TABLE_BUDGET};
use stcode::outcome_code::{self, compute_outcome_code, linearize};
use stcode::{BitVec, Circuit, Error, FaultOperator, OutcomeCode, OutputStabilizerGroup, SpacetimeCode};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    BudgetExceeded = 5,
    OutOfRange = 6,
    DimensionMismatch = 7,
    InvariantViolation = 8,
    Panic = 9,
}

pub struct StcCircuit {
    inner: Circuit,
}

pub struct StcOutcomeCode {
    code: OutcomeCode,
    group: OutputStabilizerGroup,
}

pub struct StcSpacetimeCode {
    inner: SpacetimeCode,
}

/// Monte Carlo counts.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StcTrialReport {
    pub trials: u64,
    pub successes: u64,
    pub outcome_failures: u64,
    pub residual_failures: u64,
    pub misses: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> StcStatus {
    match e {
        Error::Syntax { .. } | Error::PauliSyntax { .. } => StcStatus::ParseError,
        Error::Invalid(_) | Error::Precondition(_) | Error::NonLinear => StcStatus::ValidationError,
        Error::Budget(_) => StcStatus::BudgetExceeded,
        Error::OutOfRange { .. } => StcStatus::OutOfRange,
        Error::Dimension { .. } => StcStatus::DimensionMismatch,
        Error::Invariant(_) => StcStatus::InvariantViolation,
    }
}

struct Fail(StcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> StcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StcStatus::Ok,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            StcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(StcStatus::NullArgument, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(StcStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_bits(bits: &BitVec, out: *mut u8, len: usize) -> Result<(), Fail> {
    if len != bits.len() {
        return Err(Fail(
            StcStatus::DimensionMismatch,
            format!("buffer holds {len} bits, need {}", bits.len()),
        ));
    }
    if len > 0 && out.is_null() {
        return Err(null("bit buffer"));
    }
    for i in 0..len {
        *out.add(i) = bits.get(i) as u8;
    }
    Ok(())
}

unsafe fn read_bits(p: *const u8, len: usize) -> Result<BitVec, Fail> {
    if len > 0 && p.is_null() {
        return Err(null("bit buffer"));
    }
    let s = if len == 0 { &[][..] } else { std::slice::from_raw_parts(p, len) };
    Ok(BitVec::from_bools(&s.iter().map(|&b| b != 0).collect::<Vec<_>>()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next library call on the same thread.
#[no_mangle]
pub extern "C" fn stc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn stc_status_string(status: StcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        StcStatus::Ok => c"ok",
        StcStatus::NullArgument => c"null argument",
        StcStatus::InvalidUtf8 => c"invalid UTF-8",
        StcStatus::ParseError => c"parse error",
        StcStatus::ValidationError => c"validation error",
        StcStatus::BudgetExceeded => c"budget exceeded",
        StcStatus::OutOfRange => c"index out of range",
        StcStatus::DimensionMismatch => c"dimension mismatch",
        StcStatus::InvariantViolation => c"internal invariant violated",
        StcStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn stc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates circuit text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_parse(text: *const c_char, out: *mut *mut StcCircuit) -> StcStatus {
    guard(|| {
        let t = read_str(text, "text")?;
        let c = stcode::parse_circuit(t)?;
        write_out(out, StcCircuit { inner: c })
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_free(c: *mut StcCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_num_qubits(c: *const StcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.inner.n())
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_depth(c: *const StcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.inner.depth())
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_num_measurements(c: *const StcCircuit) -> usize {
    c.as_ref().map_or(0, |c| c.inner.num_measurements())
}

/// Canonical text of the circuit; free with `stc_string_free`.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_to_text(c: *const StcCircuit) -> *mut c_char {
    c.as_ref().map_or(ptr::null_mut(), |c| into_c_string(c.inner.to_text()))
}

/// Copy of the circuit with measurement signs fixed so every check is linear.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_circuit_linearize(c: *const StcCircuit, out: *mut *mut StcCircuit) -> StcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        write_out(out, StcCircuit { inner: linearize(&c.inner) })
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_compute(
    c: *const StcCircuit,
    out: *mut *mut StcOutcomeCode,
) -> StcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        let (code, group) = compute_outcome_code(&c.inner);
        write_out(out, StcOutcomeCode { code, group })
    })
}

/// # Safety
/// `oc` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_free(oc: *mut StcOutcomeCode) {
    if !oc.is_null() {
        drop(Box::from_raw(oc));
    }
}

/// # Safety
/// `oc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_m(oc: *const StcOutcomeCode) -> usize {
    oc.as_ref().map_or(0, |o| o.code.m())
}

/// # Safety
/// `oc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_k(oc: *const StcOutcomeCode) -> usize {
    oc.as_ref().map_or(0, |o| o.code.k())
}

/// Number of checks.
///
/// # Safety
/// `oc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_r(oc: *const StcOutcomeCode) -> usize {
    oc.as_ref().map_or(0, |o| o.code.r())
}

/// Writes check `index` as `m` bytes (0 or 1) and its sign bit.
///
/// # Safety
/// `oc` must be a live handle; `u` must hold `m` bytes; `b` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_check(
    oc: *const StcOutcomeCode,
    index: usize,
    u: *mut u8,
    m: usize,
    b: *mut u8,
) -> StcStatus {
    guard(|| {
        let oc = borrow(oc, "outcome code")?;
        let ch = oc.code.checks().get(index).ok_or_else(|| {
            Fail(StcStatus::OutOfRange, format!("check {index} of {}", oc.code.r()))
        })?;
        write_bits(&ch.u, u, m)?;
        if b.is_null() {
            return Err(null("sign pointer"));
        }
        *b = ch.b as u8;
        Ok(())
    })
}

/// Outcome syndrome of `m` outcome bytes into `r` bytes.
///
/// # Safety
/// `oc` must be a live handle; buffers must hold `m` and `r` bytes.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_syndrome(
    oc: *const StcOutcomeCode,
    outcomes: *const u8,
    m: usize,
    syndrome: *mut u8,
    r: usize,
) -> StcStatus {
    guard(|| {
        let oc = borrow(oc, "outcome code")?;
        let o = read_bits(outcomes, m)?;
        let s = oc.code.syndrome(&o)?;
        write_bits(&s, syndrome, r)
    })
}

/// JSON report of checks and output stabilizer group.
///
/// # Safety
/// `oc` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_outcome_code_to_json(oc: *const StcOutcomeCode) -> *mut c_char {
    oc.as_ref()
        .map_or(ptr::null_mut(), |o| into_c_string(outcome_code::to_json(&o.code, &o.group)))
}

/// Spacetime code of the linearized circuit.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_build(
    c: *const StcCircuit,
    out: *mut *mut StcSpacetimeCode,
) -> StcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        let lin = linearize(&c.inner);
        let (oc, _) = compute_outcome_code(&lin);
        let code = SpacetimeCode::build(&lin, &oc)?;
        write_out(out, StcSpacetimeCode { inner: code })
    })
}

/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_free(code: *mut StcSpacetimeCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Number of spacetime qubits `N`.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_num_qubits(code: *const StcSpacetimeCode) -> usize {
    code.as_ref().map_or(0, |c| c.inner.num_qubits())
}

/// Number of logical qubits `K`.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_num_logicals(code: *const StcSpacetimeCode) -> usize {
    code.as_ref().map_or(0, |c| c.inner.num_logicals())
}

/// Number of stabilizer generators.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_r(code: *const StcSpacetimeCode) -> usize {
    code.as_ref().map_or(0, |c| c.inner.r())
}

/// Text of stabilizer generator `index`, or null if out of range.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_stabilizer(
    code: *const StcSpacetimeCode,
    index: usize,
) -> *mut c_char {
    code.as_ref()
        .and_then(|c| c.inner.stabilizers().get(index))
        .map_or(ptr::null_mut(), |f| into_c_string(f.to_string()))
}

/// Syndrome of a fault operator given in text form (`"1.5:X0;2.5:Z1"`).
///
/// # Safety
/// `code` must be a live handle; `fault` nul-terminated; `syndrome` must hold `r` bytes.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_syndrome(
    code: *const StcSpacetimeCode,
    fault: *const c_char,
    syndrome: *mut u8,
    r: usize,
) -> StcStatus {
    guard(|| {
        let code = borrow(code, "spacetime code")?;
        let text = read_str(fault, "fault")?;
        let f = FaultOperator::parse(text, code.inner.n(), code.inner.depth())?;
        let s = code.inner.syndrome(&f)?;
        write_bits(&s, syndrome, r)
    })
}

/// Check matrix in alist format.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_to_alist(code: *const StcSpacetimeCode) -> *mut c_char {
    code.as_ref().map_or(ptr::null_mut(), |c| into_c_string(c.inner.to_alist()))
}

/// JSON export of generators and parameters.
///
/// # Safety
/// `code` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stc_spacetime_code_to_json(code: *const StcSpacetimeCode) -> *mut c_char {
    code.as_ref().map_or(ptr::null_mut(), |c| into_c_string(c.inner.to_json(None)))
}

/// Lookup-decoder Monte Carlo with uniform fault probability `p`.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stc_simulate(
    c: *const StcCircuit,
    p: f64,
    max_faults: usize,
    trials: u64,
    seed: u64,
    out: *mut StcTrialReport,
) -> StcStatus {
    guard(|| {
        let c = borrow(c, "circuit")?;
        if out.is_null() {
            return Err(null("report pointer"));
        }
        let exp = Experiment::new(&c.inner, &NoiseModel::uniform(p), max_faults, DEFAULT_TABLE_BUDGET)?;
        let rep = exp.monte_carlo(trials, seed);
        *out = StcTrialReport {
            trials: rep.trials,
            successes: rep.successes,
            outcome_failures: rep.outcome_failures,
            residual_failures: rep.residual_failures,
            misses: rep.misses,
        };
        Ok(())
    })
}
