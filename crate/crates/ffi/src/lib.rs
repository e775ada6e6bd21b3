//! C ABI over xhail-lite.
//!
//! Every fallible function returns an [`XlStatus`]. On failure the message
//! is available from [`xl_last_error`] on the same thread until the next
//! call into this library. Strings returned through `char **` out
//! parameters are owned by the caller and released with
//! [`xl_string_free`]; handles are released with their `_free` function.
//! Panics never cross the boundary; they come back as `XL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use xhail_lite::bias::parse_mode_file;
use xhail_lite::chunking::{default_bias, parse_gold, parse_tokens, predict};
use xhail_lite::eval::evaluate;
use xhail_lite::harness::scoring::{macro_average, score};
use xhail_lite::harness::stats::paired_t_test_one_tailed;
use xhail_lite::logic::{parse_program, print_program, FactBase, Rule};
use xhail_lite::pipeline::{learn, LearnOptions, LearnReport, LearningTask};
use xhail_lite::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Unsafe = 4,
    NotStratified = 5,
    Mode = 6,
    Corpus = 7,
    InvalidArgument = 8,
    Io = 9,
    Other = 10,
    Panic = 11,
}

impl From<&Error> for XlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Syntax { .. } => XlStatus::Syntax,
            Error::Unsafe { .. } => XlStatus::Unsafe,
            Error::NotStratified(_) => XlStatus::NotStratified,
            Error::Mode(_) | Error::Generalise { .. } => XlStatus::Mode,
            Error::Corpus(_) => XlStatus::Corpus,
            Error::InvalidArgument(_) => XlStatus::InvalidArgument,
            Error::Io(_) => XlStatus::Io,
            _ => XlStatus::Other,
        }
    }
}

struct Failure(XlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure((&e).into(), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> XlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => XlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            XlStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(XlStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(XlStatus::InvalidUtf8, format!("{name}: {e}")))
}

fn check_out<T>(out: *mut T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(XlStatus::NullArgument, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(XlStatus::Other, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// A parsed program.
pub struct XlProgram {
    rules: Vec<Rule>,
}

/// A learning task: background, examples and mode bias.
pub struct XlTask {
    task: LearningTask,
}

/// The outcome of [`xl_learn`].
pub struct XlLearnResult {
    hypothesis: Vec<Rule>,
    report: LearnReport,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XlScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XlTTest {
    pub t: f64,
    pub p: f64,
    pub df: usize,
    pub degenerate: bool,
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn xl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn xl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_program_parse(text: *const c_char, out: *mut *mut XlProgram) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let rules = parse_program(c_str(text, "text")?)?;
        *out = Box::into_raw(Box::new(XlProgram { rules }));
        Ok(())
    })
}

/// # Safety
/// `program` must be null or a live handle from [`xl_program_parse`].
#[no_mangle]
pub unsafe extern "C" fn xl_program_free(program: *mut XlProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of rules, facts included.
///
/// # Safety
/// `program` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xl_program_len(program: *const XlProgram) -> usize {
    program.as_ref().map_or(0, |p| p.rules.len())
}

/// Evaluates the program and writes its model as facts, one per line.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_program_evaluate(program: *const XlProgram, out: *mut *mut c_char) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = program
            .as_ref()
            .ok_or_else(|| Failure(XlStatus::NullArgument, "program is null".into()))?;
        let model = evaluate(&p.rules, &FactBase::new())?;
        write_string(out, model.to_lp())
    })
}

/// Builds a task from mode-file text (`#modeh`, `#modeb`, `#example` and
/// background rules).
///
/// # Safety
/// `mode_text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_task_from_mode_file(mode_text: *const c_char, out: *mut *mut XlTask) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let mf = parse_mode_file(c_str(mode_text, "mode_text")?)?;
        *out = Box::into_raw(Box::new(XlTask {
            task: LearningTask::from_mode_file(mf),
        }));
        Ok(())
    })
}

/// Builds a chunking task from token-file and gold-file text with the
/// built-in chunking modes.
///
/// # Safety
/// Both strings must be valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_task_from_corpus(
    tokens_tsv: *const c_char,
    gold: *const c_char,
    out: *mut *mut XlTask,
) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let sentences = parse_tokens(c_str(tokens_tsv, "tokens_tsv")?)?;
        let chunkings = parse_gold(c_str(gold, "gold")?, &sentences)?;
        let corpus: Vec<_> = sentences.into_iter().zip(chunkings).collect();
        *out = Box::into_raw(Box::new(XlTask {
            task: LearningTask::from_corpus(&corpus, default_bias(), &[]),
        }));
        Ok(())
    })
}

/// # Safety
/// `task` must be null or a live task handle.
#[no_mangle]
pub unsafe extern "C" fn xl_task_free(task: *mut XlTask) {
    if !task.is_null() {
        drop(Box::from_raw(task));
    }
}

/// Runs the learning pipeline. `budget_s` bounds abduction and induction
/// separately; a non-optimal hypothesis is still a success.
///
/// # Safety
/// `task` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_learn(
    task: *const XlTask,
    pr: usize,
    budget_s: f64,
    out: *mut *mut XlLearnResult,
) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let t = task
            .as_ref()
            .ok_or_else(|| Failure(XlStatus::NullArgument, "task is null".into()))?;
        if !budget_s.is_finite() || budget_s < 0.0 {
            return Err(Failure(
                XlStatus::InvalidArgument,
                format!("budget must be a non-negative number of seconds, got {budget_s}"),
            ));
        }
        let opts = LearnOptions {
            pr,
            budget: Duration::from_secs_f64(budget_s),
        };
        let outcome = learn(&t.task, &opts)?;
        *out = Box::into_raw(Box::new(XlLearnResult {
            hypothesis: outcome.induction.hypothesis.clone(),
            report: LearnReport::new(&outcome, &opts),
        }));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a live handle from [`xl_learn`].
#[no_mangle]
pub unsafe extern "C" fn xl_learn_result_free(result: *mut XlLearnResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Writes the learned hypothesis as rule text, one rule per line.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_learn_result_hypothesis(result: *const XlLearnResult, out: *mut *mut c_char) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let r = result
            .as_ref()
            .ok_or_else(|| Failure(XlStatus::NullArgument, "result is null".into()))?;
        write_string(out, print_program(&r.hypothesis))
    })
}

/// Writes the learn report as JSON.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_learn_result_report_json(result: *const XlLearnResult, out: *mut *mut c_char) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let r = result
            .as_ref()
            .ok_or_else(|| Failure(XlStatus::NullArgument, "result is null".into()))?;
        let json = serde_json::to_string(&r.report).map_err(|e| Failure(XlStatus::Other, e.to_string()))?;
        write_string(out, json)
    })
}

/// Whether the search proved its hypothesis optimal.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn xl_learn_result_optimal(result: *const XlLearnResult) -> bool {
    result.as_ref().is_some_and(|r| r.report.optimal)
}

/// Chunks every sentence of `tokens_tsv` with `hypothesis` and writes one
/// bracketed line per sentence.
///
/// # Safety
/// `hypothesis` must be a live handle; `tokens_tsv` a valid C string;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xl_predict(
    hypothesis: *const XlProgram,
    tokens_tsv: *const c_char,
    out: *mut *mut c_char,
) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let h = hypothesis
            .as_ref()
            .ok_or_else(|| Failure(XlStatus::NullArgument, "hypothesis is null".into()))?;
        let mut lines = String::new();
        for s in parse_tokens(c_str(tokens_tsv, "tokens_tsv")?)? {
            lines.push_str(&predict(&h.rules, &s)?.format(&s));
            lines.push('\n');
        }
        write_string(out, lines)
    })
}

/// Macro-averaged precision, recall and F1 of predicted against gold
/// chunkings.
///
/// # Safety
/// The strings must be valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_score(
    pred: *const c_char,
    gold: *const c_char,
    tokens_tsv: *const c_char,
    out: *mut XlScore,
) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        let sentences = parse_tokens(c_str(tokens_tsv, "tokens_tsv")?)?;
        let p = parse_gold(c_str(pred, "pred")?, &sentences)?;
        let g = parse_gold(c_str(gold, "gold")?, &sentences)?;
        let scores: Vec<_> = sentences
            .iter()
            .zip(p.iter().zip(&g))
            .map(|(s, (p, g))| score(p, g, s))
            .collect();
        let avg = macro_average(&scores);
        *out = XlScore {
            precision: avg.precision,
            recall: avg.recall,
            f1: avg.f1,
        };
        Ok(())
    })
}

/// Paired one-tailed t-test of `a` against `b` (alternative: mean of `a`
/// is greater).
///
/// # Safety
/// `a` and `b` must each point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn xl_paired_t_test(a: *const f64, b: *const f64, n: usize, out: *mut XlTTest) -> XlStatus {
    guard(|| {
        check_out(out, "out")?;
        if a.is_null() || b.is_null() {
            return Err(Failure(XlStatus::NullArgument, "sample pointer is null".into()));
        }
        let (a, b) = (std::slice::from_raw_parts(a, n), std::slice::from_raw_parts(b, n));
        let r = paired_t_test_one_tailed(a, b)?;
        *out = XlTTest {
            t: r.t,
            p: r.p,
            df: r.df,
            degenerate: r.degenerate,
        };
        Ok(())
    })
}
