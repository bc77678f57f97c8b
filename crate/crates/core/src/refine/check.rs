//! Bounded behavioral-refinement checking.
//!
//! The transformed program refines the source when every behavior of the
//! target call is matched by some behavior of the source call: converged
//! values must be similar, and any stuck target behavior is matched by any
//! stuck source behavior. Timeouts are never treated as evidence — they
//! downgrade the verdict to Inconclusive.

use super::similar::{similar, Observation};
use crate::lang::*;
use crate::semantics::{behaviors, Behavior, RunStats};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("ill-formed input: {0}")]
    IllFormedInput(String),
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Refines,
    Violation {
        target_behavior: Behavior,
        /// Scheduler bits reproducing the unmatched target run.
        replay: Vec<bool>,
    },
    Inconclusive {
        timeouts: u64,
    },
}

impl Verdict {
    pub fn is_refines(&self) -> bool {
        matches!(self, Verdict::Refines)
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation { .. })
    }
}

#[derive(Debug, Clone)]
pub struct RefinementReport {
    pub verdict: Verdict,
    pub schedules_explored: u64,
    pub stats_source: RunStats,
    pub stats_target: RunStats,
}

/// JSON-facing summary (behaviors and bits flattened to strings).
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub verdict: String,
    pub schedules: u64,
    pub stats_source: RunStats,
    pub stats_target: RunStats,
    pub replay: Option<String>,
}

impl RefinementReport {
    pub fn to_json(&self) -> ReportJson {
        let (verdict, replay) = match &self.verdict {
            Verdict::Refines => ("refines".to_string(), None),
            Verdict::Violation { replay, .. } => (
                "violation".to_string(),
                Some(replay.iter().map(|b| if *b { '1' } else { '0' }).collect()),
            ),
            Verdict::Inconclusive { timeouts } => (format!("inconclusive ({timeouts} timeouts)"), None),
        };
        ReportJson {
            verdict,
            schedules: self.schedules_explored,
            stats_source: self.stats_source,
            stats_target: self.stats_target,
            replay,
        }
    }
}

/// Checks that `@fn_name(arg)` under `p_t` refines the same call under
/// `p_s`, enumerating schedules on both sides.
pub fn check_refinement(
    p_s: &Program,
    p_t: &Program,
    fn_name: &str,
    arg: &Expr,
    budget: u64,
    choice_cap: u64,
    obs: Observation,
) -> Result<RefinementReport, RefineError> {
    check_wf_arg(p_s, arg).map_err(RefineError::IllFormedInput)?;
    if p_s.get(fn_name).is_none() {
        return Err(RefineError::IllFormedInput(format!(
            "undefined function {fn_name}"
        )));
    }
    let call = Expr::call_fn(fn_name, arg.clone());
    let target = behaviors(p_t, call.clone(), budget, choice_cap);
    let source = behaviors(p_s, call, budget, choice_cap);

    let mut timeouts = 0u64;
    let mut unmatched: Option<(Behavior, Vec<bool>)> = None;
    for t in &target {
        match &t.behavior {
            Behavior::Timeout => timeouts += 1,
            Behavior::Conv(v_t) => {
                let ok = source.iter().any(|s| match &s.behavior {
                    Behavior::Conv(v_s) => similar(obs, &s.heap, v_s, &t.heap, v_t).0,
                    _ => false,
                });
                if !ok && unmatched.is_none() {
                    unmatched = Some((t.behavior.clone(), t.bits.clone()));
                }
            }
            Behavior::Stuck(_) => {
                let ok = source
                    .iter()
                    .any(|s| matches!(s.behavior, Behavior::Stuck(_)));
                if !ok && unmatched.is_none() {
                    unmatched = Some((t.behavior.clone(), t.bits.clone()));
                }
            }
        }
    }
    let source_timeouts = source
        .iter()
        .filter(|s| matches!(s.behavior, Behavior::Timeout))
        .count() as u64;

    let verdict = match unmatched {
        Some((target_behavior, replay)) => {
            if source_timeouts > 0 {
                // The matching source behavior may exist beyond the budget.
                Verdict::Inconclusive {
                    timeouts: timeouts + source_timeouts,
                }
            } else {
                Verdict::Violation {
                    target_behavior,
                    replay,
                }
            }
        }
        None if timeouts > 0 => Verdict::Inconclusive { timeouts },
        None => Verdict::Refines,
    };
    Ok(RefinementReport {
        verdict,
        schedules_explored: (target.len() + source.len()) as u64,
        stats_source: source.first().map(|o| o.stats).unwrap_or_default(),
        stats_target: target.first().map(|o| o.stats).unwrap_or_default(),
    })
}

/// A refinement check aggregated over an input suite; the first Violation
/// short-circuits, carrying its call for replay.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub verdict: Verdict,
    pub calls_checked: u64,
    pub schedules_explored: u64,
    pub timeouts: u64,
    /// Set on Violation: the offending (fn, arg).
    pub failing_call: Option<(String, Expr)>,
}

pub fn check_program_refinement(
    p_s: &Program,
    p_t: &Program,
    suite: &[(String, Expr)],
    budget: u64,
    choice_cap: u64,
    obs: Observation,
) -> Result<SuiteReport, RefineError> {
    let mut schedules = 0;
    let mut timeouts = 0;
    let mut calls = 0;
    for (fn_name, arg) in suite {
        let report = check_refinement(p_s, p_t, fn_name, arg, budget, choice_cap, obs)?;
        calls += 1;
        schedules += report.schedules_explored;
        if let Verdict::Inconclusive { timeouts: t } = &report.verdict {
            timeouts += t;
        }
        if report.verdict.is_violation() {
            return Ok(SuiteReport {
                verdict: report.verdict,
                calls_checked: calls,
                schedules_explored: schedules,
                timeouts,
                failing_call: Some((fn_name.clone(), arg.clone())),
            });
        }
    }
    let verdict = if timeouts > 0 {
        Verdict::Inconclusive { timeouts }
    } else {
        Verdict::Refines
    };
    Ok(SuiteReport {
        verdict,
        calls_checked: calls,
        schedules_explored: schedules,
        timeouts,
        failing_call: None,
    })
}

/// The default sampling suite: list-shaped inputs of sizes 0..=max built
/// from booleans, fed to every function whose parameter looks list-shaped.
/// Functions taking a (function, list) pair get `(&helper, list)` instead.
pub fn default_suite(p: &Program, max_size: usize) -> Vec<(String, Expr)> {
    let mut suite = Vec::new();
    let helper = p
        .iter()
        .find(|(_, d)| !d.annotated_tmc && takes_scalar(d))
        .map(|(n, _)| n.to_string());
    for (name, def) in p.iter() {
        if name.contains('.') {
            continue; // transform-generated variants are exercised via their sources
        }
        for n in 0..=max_size {
            let list = bool_list(n);
            let arg = if takes_pair(def) {
                match &helper {
                    Some(h) => Expr::pair(Expr::fnptr(h.clone()), list),
                    None => Expr::pair(list.clone(), bool_list(max_size - n)),
                }
            } else {
                list
            };
            suite.push((name.to_string(), arg));
        }
    }
    suite
}

/// Wraps a list argument the way the default suite would feed it to
/// `fn_name`: pair-taking functions get `(&helper, list)`.
pub fn wrap_list_arg(p: &Program, fn_name: &str, list: Expr) -> Expr {
    let Some(def) = p.get(fn_name) else {
        return list;
    };
    if !takes_pair(def) {
        return list;
    }
    let helper = p
        .iter()
        .find(|(_, d)| !d.annotated_tmc && takes_scalar(d))
        .map(|(n, _)| n.to_string());
    match helper {
        Some(h) => Expr::pair(Expr::fnptr(h), list),
        None => Expr::pair(list, Expr::nil()),
    }
}

pub fn bool_list(n: usize) -> Expr {
    let mut e = Expr::nil();
    for i in 0..n {
        e = Expr::cons(Expr::bool(i % 2 == 0), e);
    }
    e
}

/// Heuristic: a def whose body immediately destructures its parameter into
/// fields 1 and 2 takes a pair.
fn takes_pair(d: &Def) -> bool {
    matches!(&d.body, Expr::Let(_, e1, _) if matches!(&**e1, Expr::Load(l, i)
        if matches!(&**l, Expr::Var(v) if *v == d.param)
        && matches!(&**i, Expr::Val(Val::Idx(i)) if *i == Idx::ONE)))
}

fn takes_scalar(d: &Def) -> bool {
    !takes_pair(d)
}
