//! Greedy structural shrinking of refinement counterexamples.

use super::check::{check_refinement, Verdict};
use super::similar::Observation;
use crate::lang::*;
use crate::tmc::{transform_program, TransformOptions};

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub program: Program,
    pub fn_name: String,
    pub arg: Expr,
    /// Scheduler bits of the original violating target run.
    pub bits: Vec<bool>,
    pub obs: Observation,
}

#[derive(Debug, Clone, Copy)]
pub struct ShrinkBudget {
    pub run_budget: u64,
    pub choice_cap: u64,
    /// Transform options used to re-derive the target from each candidate.
    pub options: TransformOptions,
}

impl Default for ShrinkBudget {
    fn default() -> Self {
        ShrinkBudget {
            run_budget: 20_000,
            choice_cap: 12,
            options: TransformOptions::default(),
        }
    }
}

/// Repeatedly applies the first still-violating single shrink step until
/// none applies. The violation is re-established by re-transforming and
/// re-checking the candidate, so shrinking is sound by construction.
pub fn shrink(cx: &Counterexample, budget: &ShrinkBudget) -> Counterexample {
    let opts = budget.options;
    shrink_with(cx, budget, &|p| transform_program(p, opts).ok())
}

/// Shrinking against an arbitrary target derivation — lets callers inject
/// bugs into the target (differential testing of the checker itself)
/// while still re-deriving it from every shrunk source.
pub fn shrink_with(
    cx: &Counterexample,
    budget: &ShrinkBudget,
    derive_target: &dyn Fn(&Program) -> Option<Program>,
) -> Counterexample {
    let mut cur = cx.clone();
    loop {
        let mut progressed = false;
        for cand in candidates(&cur) {
            if let Some(bits) = still_violates(&cand, budget, derive_target) {
                cur = Counterexample { bits, ..cand };
                progressed = true;
                break;
            }
        }
        if !progressed {
            return cur;
        }
    }
}

fn still_violates(
    cx: &Counterexample,
    budget: &ShrinkBudget,
    derive_target: &dyn Fn(&Program) -> Option<Program>,
) -> Option<Vec<bool>> {
    if check_wf_source(&cx.program).is_err() {
        return None;
    }
    let p_t = derive_target(&cx.program)?;
    let report = check_refinement(
        &cx.program,
        &p_t,
        &cx.fn_name,
        &cx.arg,
        budget.run_budget,
        budget.choice_cap,
        cx.obs,
    )
    .ok()?;
    match report.verdict {
        Verdict::Violation { replay, .. } => Some(replay),
        _ => None,
    }
}

fn candidates(cx: &Counterexample) -> Vec<Counterexample> {
    let mut out = Vec::new();
    // 1. drop a definition (not the called one)
    for name in cx.program.names().map(str::to_string).collect::<Vec<_>>() {
        if name != cx.fn_name {
            let mut p = cx.program.clone();
            p.remove(&name);
            out.push(Counterexample {
                program: p,
                ..cx.clone()
            });
        }
    }
    // 2. shrink the argument
    for arg in shrink_expr(&cx.arg) {
        out.push(Counterexample {
            arg,
            ..cx.clone()
        });
    }
    // 3. shrink the called function's body (replace subterms with values
    //    or with their own subterms)
    if let Some(def) = cx.program.get(&cx.fn_name) {
        for body in shrink_expr(&def.body) {
            let mut p = cx.program.clone();
            let d = Def {
                body,
                ..def.clone()
            };
            p.remove(&cx.fn_name);
            p.insert(cx.fn_name.clone(), d).unwrap();
            out.push(Counterexample {
                program: p,
                ..cx.clone()
            });
        }
    }
    out
}

/// One-step structural shrinks of an expression, smallest-first.
fn shrink_expr(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    if !e.is_value() {
        out.push(Expr::unit());
    }
    // replace with an immediate subexpression
    match e {
        Expr::Let(_, a, b)
        | Expr::Call(a, b)
        | Expr::Eq(a, b)
        | Expr::Block(_, a, b)
        | Expr::BlockDet(_, a, b)
        | Expr::Load(a, b)
        | Expr::BinOp(_, a, b) => {
            out.push((**a).clone());
            out.push((**b).clone());
        }
        Expr::If(a, b, c) | Expr::Store(a, b, c) => {
            out.push((**a).clone());
            out.push((**b).clone());
            out.push((**c).clone());
        }
        Expr::Annotated(a, _) => out.push((**a).clone()),
        _ => {}
    }
    // shrink one child in place
    match e {
        Expr::Block(t, a, b) => {
            for a2 in shrink_expr(a) {
                out.push(Expr::block(t.clone(), a2, (**b).clone()));
            }
            for b2 in shrink_expr(b) {
                out.push(Expr::block(t.clone(), (**a).clone(), b2));
            }
        }
        Expr::Let(x, a, b) => {
            for a2 in shrink_expr(a) {
                out.push(Expr::let_(x.clone(), a2, (**b).clone()));
            }
            for b2 in shrink_expr(b) {
                out.push(Expr::let_(x.clone(), (**a).clone(), b2));
            }
        }
        Expr::If(a, b, c) => {
            for b2 in shrink_expr(b) {
                out.push(Expr::if_((**a).clone(), b2, (**c).clone()));
            }
            for c2 in shrink_expr(c) {
                out.push(Expr::if_((**a).clone(), (**b).clone(), c2));
            }
        }
        Expr::Call(f, a) => {
            for a2 in shrink_expr(a) {
                out.push(Expr::call((**f).clone(), a2));
            }
        }
        _ => {}
    }
    out
}
