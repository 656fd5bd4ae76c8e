//! C interface to `moc`.
//!
//! Machines and register programs are opaque handles owned by the caller
//! and released with the matching `_free` function. Every fallible call
//! returns a [`MocStatus`]; on failure `moc_last_error` describes the
//! error on the calling thread. Strings handed out by the library are
//! NUL-terminated UTF-8 and must be released with `moc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use moc::encodings::{godel_decode, godel_number};
use moc::logic::{halt_formula, solve, SolveResult};
use moc::regmachine::{parse_rm, run_reg, RegProgram};
use moc::turing::{compose, determinize, parse_tm, tensor, TuringMachine};
use moc::{Error, Fuel, RunOutcome, Word};
use num_bigint::BigUint;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MocStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Shape = 3,
    Alphabet = 4,
    Format = 5,
    Decode = 6,
    InvalidMachine = 7,
    Oracle = 8,
    PromiseViolation = 9,
    Resource = 10,
    Unsupported = 11,
    Audit = 12,
    Equivalence = 13,
    Overflow = 14,
    BufferTooSmall = 15,
    Panic = 16,
}

/// How a run ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MocOutcome {
    Halted = 0,
    Rejected = 1,
    FuelExhausted = 2,
}

/// Opaque Turing machine.
pub struct MocMachine(TuringMachine);

/// Opaque register program.
pub struct MocProgram(RegProgram);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MocStatus {
    match e {
        Error::Shape(_) => MocStatus::Shape,
        Error::Alphabet(_) => MocStatus::Alphabet,
        Error::Format { .. } => MocStatus::Format,
        Error::Decode(_) => MocStatus::Decode,
        Error::InvalidMachine(_) => MocStatus::InvalidMachine,
        Error::Oracle(_) => MocStatus::Oracle,
        Error::PromiseViolation(_) => MocStatus::PromiseViolation,
        Error::Resource(_) => MocStatus::Resource,
        Error::Unsupported(_) => MocStatus::Unsupported,
        Error::Audit(_) => MocStatus::Audit,
        Error::Equivalence(_) => MocStatus::Equivalence,
        Error::Overflow(_) => MocStatus::Overflow,
    }
}

struct Fail(MocStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MocStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MocStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            MocStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(MocStatus::NullArgument, format!("{what} is null"))
}

unsafe fn utf8<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(MocStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

unsafe fn words(m: &TuringMachine, inputs: *const *const c_char, n: usize) -> Result<Vec<Word>, Fail> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if inputs.is_null() {
        return Err(null("inputs"));
    }
    (0..n).map(|i| Ok(Word::parse(m.alphabet(), utf8(*inputs.add(i), "input word")?)?)).collect()
}

/// Message for the last failed call on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn moc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn moc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn moc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `.tm` text into a new machine.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_parse(text: *const c_char, out: *mut *mut MocMachine) -> MocStatus {
    guard(|| {
        let m = parse_tm(utf8(text, "text")?)?;
        put(out, Box::into_raw(Box::new(MocMachine(m))), "out")
    })
}

/// Releases a machine. Null is ignored.
///
/// # Safety
/// `m` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_free(m: *mut MocMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Canonical `.tm` text of a machine.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_to_text(m: *const MocMachine, out: *mut *mut c_char) -> MocStatus {
    guard(|| {
        let m = handle(m, "machine")?;
        put(out, owned(m.0.to_string()), "out")
    })
}

/// Runs a machine on `n_inputs` words for at most `fuel` steps. On a
/// halted run `*outputs` receives the output words joined by newlines;
/// otherwise it is set to null. `steps` may be null.
///
/// # Safety
/// `m` must be a live handle, `inputs` must point to `n_inputs`
/// NUL-terminated strings, and the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_run(
    m: *const MocMachine,
    inputs: *const *const c_char,
    n_inputs: usize,
    fuel: u64,
    outcome: *mut MocOutcome,
    outputs: *mut *mut c_char,
    steps: *mut u64,
) -> MocStatus {
    guard(|| {
        let m = &handle(m, "machine")?.0;
        let x = words(m, inputs, n_inputs)?;
        if outcome.is_null() || outputs.is_null() {
            return Err(null("out"));
        }
        let r = m.run(&x, Fuel(fuel), None)?;
        let (kind, text, used) = match r {
            RunOutcome::Halted { outputs, steps_used, .. } => {
                let joined = outputs.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("\n");
                (MocOutcome::Halted, owned(joined), steps_used)
            }
            RunOutcome::Rejected { steps_used, .. } => (MocOutcome::Rejected, ptr::null_mut(), steps_used),
            RunOutcome::FuelExhausted => (MocOutcome::FuelExhausted, ptr::null_mut(), fuel),
        };
        outcome.write(kind);
        outputs.write(text);
        if !steps.is_null() {
            steps.write(used);
        }
        Ok(())
    })
}

unsafe fn binary(
    a: *const MocMachine,
    b: *const MocMachine,
    out: *mut *mut MocMachine,
    op: fn(&TuringMachine, &TuringMachine) -> moc::Result<TuringMachine>,
) -> MocStatus {
    guard(|| {
        let m = op(&handle(a, "first")?.0, &handle(b, "second")?.0)?;
        put(out, Box::into_raw(Box::new(MocMachine(m))), "out")
    })
}

/// Sequential composition: `a`'s outputs feed `b`.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_compose(
    a: *const MocMachine,
    b: *const MocMachine,
    out: *mut *mut MocMachine,
) -> MocStatus {
    binary(a, b, out, compose)
}

/// Parallel composition.
///
/// # Safety
/// `a` and `b` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_tensor(
    a: *const MocMachine,
    b: *const MocMachine,
    out: *mut *mut MocMachine,
) -> MocStatus {
    binary(a, b, out, tensor)
}

/// Deterministic machine with the same breadth-first semantics.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_determinize(m: *const MocMachine, out: *mut *mut MocMachine) -> MocStatus {
    guard(|| {
        let d = determinize(&handle(m, "machine")?.0)?;
        put(out, Box::into_raw(Box::new(MocMachine(d))), "out")
    })
}

/// Gödel number of a machine, in decimal.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_godel(m: *const MocMachine, out: *mut *mut c_char) -> MocStatus {
    guard(|| {
        let n = godel_number(&handle(m, "machine")?.0);
        put(out, owned(n.to_string()), "out")
    })
}

/// Machine denoted by a decimal Gödel number.
///
/// # Safety
/// `number` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_from_godel(number: *const c_char, out: *mut *mut MocMachine) -> MocStatus {
    guard(|| {
        let s = utf8(number, "number")?;
        let n: BigUint = s.parse().map_err(|_| Fail(MocStatus::Decode, format!("{s:?} is not a natural number")))?;
        put(out, Box::into_raw(Box::new(MocMachine(godel_decode(&n)?))), "out")
    })
}

/// Decides whether the machine accepts the inputs within `t_max` steps
/// by solving its bounded acceptance formula.
///
/// # Safety
/// `m` must be a live handle, `inputs` must point to `n_inputs`
/// NUL-terminated strings, and `accepts` must be valid.
#[no_mangle]
pub unsafe extern "C" fn moc_machine_accepts_sat(
    m: *const MocMachine,
    inputs: *const *const c_char,
    n_inputs: usize,
    t_max: usize,
    accepts: *mut bool,
) -> MocStatus {
    guard(|| {
        let m = &handle(m, "machine")?.0;
        let x = words(m, inputs, n_inputs)?;
        let f = halt_formula(m, &x, t_max)?;
        put(accepts, matches!(solve(&f), SolveResult::Sat(_)), "accepts")
    })
}

/// Parses `.rm` text into a new register program.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn moc_program_parse(text: *const c_char, out: *mut *mut MocProgram) -> MocStatus {
    guard(|| {
        let p = parse_rm(utf8(text, "text")?)?;
        put(out, Box::into_raw(Box::new(MocProgram(p))), "out")
    })
}

/// Releases a register program. Null is ignored.
///
/// # Safety
/// `p` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn moc_program_free(p: *mut MocProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs a register program. On a halted run the outputs are written to
/// `values` (capacity `cap`) and their count to `*len`. An output above
/// `u64::MAX` fails with `Overflow`; too many outputs with
/// `BufferTooSmall`, with `*len` still set to the count needed.
///
/// # Safety
/// `p` must be a live handle, `args` must point to `n_args` values,
/// `values` to `cap` writable values, and the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn moc_program_run(
    p: *const MocProgram,
    args: *const u64,
    n_args: usize,
    fuel: u64,
    outcome: *mut MocOutcome,
    values: *mut u64,
    cap: usize,
    len: *mut usize,
) -> MocStatus {
    guard(|| {
        let p = &handle(p, "program")?.0;
        if n_args > 0 && args.is_null() {
            return Err(null("args"));
        }
        if outcome.is_null() || len.is_null() {
            return Err(null("out"));
        }
        let xs: Vec<BigUint> = (0..n_args).map(|i| BigUint::from(*args.add(i))).collect();
        let r = run_reg(p, &xs, Fuel(fuel), None)?;
        let ys = match r {
            RunOutcome::Halted { outputs, .. } => outputs,
            RunOutcome::Rejected { .. } => {
                outcome.write(MocOutcome::Rejected);
                len.write(0);
                return Ok(());
            }
            RunOutcome::FuelExhausted => {
                outcome.write(MocOutcome::FuelExhausted);
                len.write(0);
                return Ok(());
            }
        };
        outcome.write(MocOutcome::Halted);
        len.write(ys.len());
        if ys.len() > cap || (values.is_null() && !ys.is_empty()) {
            return Err(Fail(MocStatus::BufferTooSmall, format!("{} outputs, capacity {cap}", ys.len())));
        }
        for (i, y) in ys.iter().enumerate() {
            let v: u64 = y.try_into().map_err(|_| Fail(MocStatus::Overflow, format!("output {y} exceeds 64 bits")))?;
            values.add(i).write(v);
        }
        Ok(())
    })
}
