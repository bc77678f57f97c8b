//! C ABI over the core pipeline: parse, transform, run, refinement-check.
//!
//! Conventions:
//! - programs are opaque `TmcfProgram*` handles, freed with `tmcf_program_free`
//! - every fallible call returns a `tmcf_status` code; on failure a
//!   thread-local message is readable via `tmcf_last_error` until the next
//!   fallible call on the same thread
//! - strings returned through out-params are NUL-terminated, UTF-8, and
//!   owned by the caller via `tmcf_string_free`
//!
//! The header mirroring this ABI is maintained by hand in
//! `include/tmc_forge.h`; keep both in sync.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use tmc_forge::lang::{
    check_wf_source, parse_expr_text, parse_program_with, print_expr, print_program, Expr,
    ParseOptions, Program,
};
use tmc_forge::refine::{check_program_refinement, default_suite, Observation, Verdict};
use tmc_forge::semantics::{run, Behavior, Scheduler};
use tmc_forge::tmc::{transform_program, TransformOptions};

pub const TMCF_OK: c_int = 0;
pub const TMCF_ERR_PARSE: c_int = 1;
pub const TMCF_ERR_WF: c_int = 2;
pub const TMCF_ERR_AMBIGUOUS: c_int = 3;
pub const TMCF_ERR_BADARG: c_int = 4;
pub const TMCF_ERR_NULL: c_int = 5;

pub const TMCF_VERDICT_REFINES: c_int = 0;
pub const TMCF_VERDICT_VIOLATION: c_int = 1;
pub const TMCF_VERDICT_INCONCLUSIVE: c_int = 2;

pub const TMCF_BEHAVIOR_CONV: c_int = 0;
pub const TMCF_BEHAVIOR_STUCK: c_int = 1;
pub const TMCF_BEHAVIOR_TIMEOUT: c_int = 2;

/// Opaque program handle.
pub struct TmcfProgram(Program);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NUL stripped"));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::default());
}

/// Last error message on this thread; valid until the next fallible call.
#[no_mangle]
pub extern "C" fn tmcf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_cstr<'a>(p: *const c_char) -> Result<&'a str, c_int> {
    if p.is_null() {
        set_error("null pointer argument");
        return Err(TMCF_ERR_NULL);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("invalid UTF-8");
        TMCF_ERR_PARSE
    })
}

fn out_string(s: String, out: *mut *mut c_char) {
    let c = CString::new(s.replace('\0', " ")).expect("NUL stripped");
    unsafe { *out = c.into_raw() };
}

/// # Safety
/// `src` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmcf_program_parse(
    src: *const c_char,
    ints_enabled: c_int,
    out: *mut *mut TmcfProgram,
) -> c_int {
    clear_error();
    if out.is_null() {
        set_error("null out pointer");
        return TMCF_ERR_NULL;
    }
    *out = ptr::null_mut();
    let text = match read_cstr(src) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let p = match parse_program_with(
        text,
        ParseOptions {
            ints: ints_enabled != 0,
        },
    ) {
        Ok(p) => p,
        Err(e) => {
            set_error(e.to_string());
            return TMCF_ERR_PARSE;
        }
    };
    if let Err(errs) = check_wf_source(&p) {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        set_error(msgs.join("; "));
        return TMCF_ERR_WF;
    }
    *out = Box::into_raw(Box::new(TmcfProgram(p)));
    TMCF_OK
}

/// # Safety
/// `p` must come from this library; passing it again after free is UB.
#[no_mangle]
pub unsafe extern "C" fn tmcf_program_free(p: *mut TmcfProgram) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tmcf_program_print(
    p: *const TmcfProgram,
    out: *mut *mut c_char,
) -> c_int {
    clear_error();
    if p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return TMCF_ERR_NULL;
    }
    out_string(print_program(&(*p).0), out);
    TMCF_OK
}

/// # Safety
/// As for `tmcf_program_print`.
#[no_mangle]
pub unsafe extern "C" fn tmcf_transform(
    p: *const TmcfProgram,
    compression: c_int,
    allow_both_sides: c_int,
    out: *mut *mut TmcfProgram,
) -> c_int {
    clear_error();
    if p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return TMCF_ERR_NULL;
    }
    *out = ptr::null_mut();
    let opts = TransformOptions {
        compression: compression != 0,
        allow_both_sides: allow_both_sides != 0,
    };
    match transform_program(&(*p).0, opts) {
        Ok(t) => {
            *out = Box::into_raw(Box::new(TmcfProgram(t)));
            TMCF_OK
        }
        Err(e) => {
            set_error(e.to_string());
            TMCF_ERR_AMBIGUOUS
        }
    }
}

/// Runs `@fn(arg)` left-first and renders the outcome. `behavior_out`
/// receives one of the TMCF_BEHAVIOR_* codes; `result_out` (optional) the
/// converged value or stuck expression, pretty-printed.
///
/// # Safety
/// `p` live handle, `fn_name`/`arg_text` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn tmcf_run(
    p: *const TmcfProgram,
    fn_name: *const c_char,
    arg_text: *const c_char,
    budget: u64,
    behavior_out: *mut c_int,
    result_out: *mut *mut c_char,
) -> c_int {
    clear_error();
    if p.is_null() || behavior_out.is_null() {
        set_error("null pointer argument");
        return TMCF_ERR_NULL;
    }
    let prog = &(*p).0;
    let fn_name = match read_cstr(fn_name) {
        Ok(s) => s,
        Err(c) => return c,
    };
    if prog.get(fn_name).is_none() {
        set_error(format!("no function {fn_name:?}"));
        return TMCF_ERR_BADARG;
    }
    let arg_text = match read_cstr(arg_text) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let arg: Expr = match parse_expr_text(
        arg_text,
        ParseOptions {
            ints: prog.ints_enabled,
        },
    ) {
        Ok(a) => a,
        Err(e) => {
            set_error(e.to_string());
            return TMCF_ERR_BADARG;
        }
    };
    let call = Expr::call_fn(fn_name, arg);
    let (behavior, _) = run(prog, call, &Scheduler::LeftFirst, budget);
    let (code, rendered) = match behavior {
        Behavior::Conv(v) => (TMCF_BEHAVIOR_CONV, tmc_forge::lang::print_val(&v)),
        Behavior::Stuck(e) => (TMCF_BEHAVIOR_STUCK, print_expr(&e).replace('\n', " ")),
        Behavior::Timeout => (TMCF_BEHAVIOR_TIMEOUT, String::new()),
    };
    *behavior_out = code;
    if !result_out.is_null() {
        out_string(rendered, result_out);
    }
    TMCF_OK
}

/// Checks behavioral refinement of `target` against `source` over the
/// default input suite of sizes 0..=max_size. `verdict_out` receives one
/// of the TMCF_VERDICT_* codes.
///
/// # Safety
/// Both handles live; `verdict_out` valid.
#[no_mangle]
pub unsafe extern "C" fn tmcf_check(
    source: *const TmcfProgram,
    target: *const TmcfProgram,
    max_size: usize,
    budget: u64,
    choice_cap: u64,
    verdict_out: *mut c_int,
) -> c_int {
    clear_error();
    if source.is_null() || target.is_null() || verdict_out.is_null() {
        set_error("null pointer argument");
        return TMCF_ERR_NULL;
    }
    let p_s = &(*source).0;
    let p_t = &(*target).0;
    let suite = default_suite(p_s, max_size);
    match check_program_refinement(p_s, p_t, &suite, budget, choice_cap, Observation::Deep) {
        Ok(report) => {
            *verdict_out = match report.verdict {
                Verdict::Refines => TMCF_VERDICT_REFINES,
                Verdict::Violation { .. } => TMCF_VERDICT_VIOLATION,
                Verdict::Inconclusive { .. } => TMCF_VERDICT_INCONCLUSIVE,
            };
            TMCF_OK
        }
        Err(e) => {
            set_error(e.to_string());
            TMCF_ERR_BADARG
        }
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tmcf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    const MAP_SRC: &str = "@tmc fun map xs =\n  match xs with [] -> [] | y :: ys -> y :: @map ys end\n";

    unsafe fn parse_ok(src: &str) -> *mut TmcfProgram {
        let c = CString::new(src).unwrap();
        let mut p = std::ptr::null_mut();
        assert_eq!(tmcf_program_parse(c.as_ptr(), 0, &mut p), TMCF_OK);
        assert!(!p.is_null());
        p
    }

    #[test]
    fn parse_print_roundtrip() {
        unsafe {
            let p = parse_ok(MAP_SRC);
            let mut s = std::ptr::null_mut();
            assert_eq!(tmcf_program_print(p, &mut s), TMCF_OK);
            let printed = CStr::from_ptr(s).to_str().unwrap().to_string();
            assert!(printed.contains("fun map"));
            tmcf_string_free(s);
            tmcf_program_free(p);
        }
    }

    #[test]
    fn parse_error_sets_message() {
        unsafe {
            let c = CString::new("fun oops").unwrap();
            let mut p = std::ptr::null_mut();
            assert_eq!(tmcf_program_parse(c.as_ptr(), 0, &mut p), TMCF_ERR_PARSE);
            assert!(p.is_null());
            let msg = CStr::from_ptr(tmcf_last_error()).to_str().unwrap();
            assert!(!msg.is_empty());
        }
    }

    #[test]
    fn transform_and_check_refines() {
        unsafe {
            let p = parse_ok(MAP_SRC);
            let mut t = std::ptr::null_mut();
            assert_eq!(tmcf_transform(p, 0, 0, &mut t), TMCF_OK);
            let mut verdict = -1;
            assert_eq!(tmcf_check(p, t, 3, 50_000, 16, &mut verdict), TMCF_OK);
            assert_eq!(verdict, TMCF_VERDICT_REFINES);
            tmcf_program_free(t);
            tmcf_program_free(p);
        }
    }

    #[test]
    fn run_reports_convergence() {
        unsafe {
            let p = parse_ok(MAP_SRC);
            let fn_name = CString::new("map").unwrap();
            let arg = CString::new("[true, false]").unwrap();
            let mut behavior = -1;
            let mut out = std::ptr::null_mut();
            assert_eq!(
                tmcf_run(p, fn_name.as_ptr(), arg.as_ptr(), 10_000, &mut behavior, &mut out),
                TMCF_OK
            );
            assert_eq!(behavior, TMCF_BEHAVIOR_CONV);
            tmcf_string_free(out);
            tmcf_program_free(p);
        }
    }

    #[test]
    fn null_arguments_rejected() {
        unsafe {
            let mut p = std::ptr::null_mut();
            assert_eq!(tmcf_program_parse(std::ptr::null(), 0, &mut p), TMCF_ERR_NULL);
            assert_eq!(tmcf_program_print(std::ptr::null(), &mut std::ptr::null_mut()), TMCF_ERR_NULL);
            tmcf_program_free(std::ptr::null_mut());
            tmcf_string_free(std::ptr::null_mut());
        }
    }
}
