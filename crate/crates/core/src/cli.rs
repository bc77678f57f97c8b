//! Command-line front door: parse/transform/run/behaviors/check/fuzz/
//! bench/contexts over `.dl` files.
//!
//! Exit codes: 0 success, 1 semantic failure (refinement violation,
//! ambiguous transform, ill-formed program), 2 usage or parse errors.

use crate::lang::*;
use crate::refine::{
    check_program_refinement, check_refinement, default_suite, gen_program, read_replay, shrink,
    write_replay, Counterexample, GenConfig, Observation, Replay, ShrinkBudget, Verdict,
};
use crate::semantics::{behaviors, run_full, Heap, Scheduler};
use crate::tmc::{classify_contexts, transform_program, transform_program_report, TransformOptions};
use crate::variants::{aps_transform_with, inline_transform, ApsOptions, InlinePolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "tmc-forge", version, about = "TMC transformation toolchain", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pass {
    Tmc,
    Inline,
    Aps,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Enable the integer extension when parsing.
    #[arg(long)]
    ints: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program and reprint it (round-trip check).
    Parse {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Apply a transformation and print the result.
    Transform {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "tmc")]
        pass: Pass,
        /// Enable constructor compression (tmc pass).
        #[arg(long)]
        compress: bool,
        /// Permit transforming both block sides when both request it.
        #[arg(long)]
        both_sides: bool,
        /// Inlining depth bound (inline pass).
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Absorb multiplicative frames too (aps pass).
        #[arg(long)]
        affine: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate a call under one scheduler and print the outcome.
    Run {
        file: PathBuf,
        #[arg(long = "fn")]
        fn_name: String,
        #[arg(long)]
        arg: String,
        /// left | right | seed:<n> | bits:<01...>
        #[arg(long, default_value = "left")]
        scheduler: String,
        #[arg(long, default_value_t = 50_000)]
        budget: u64,
        /// Emit one line per head step: index, rule, focus.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Enumerate behaviors of a call across schedules.
    Behaviors {
        file: PathBuf,
        #[arg(long = "fn")]
        fn_name: String,
        #[arg(long)]
        arg: String,
        #[arg(long, default_value_t = 50_000)]
        budget: u64,
        #[arg(long, default_value_t = 16)]
        cap: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Transform and check behavioral refinement over an input suite.
    Check {
        /// Program file; omitted when --replay is given.
        file: Option<PathBuf>,
        /// Inclusive input size range, e.g. 0..6
        #[arg(long, default_value = "0..6")]
        sizes: String,
        #[arg(long, default_value_t = 50_000)]
        budget: u64,
        #[arg(long, default_value_t = 16)]
        cap: u64,
        #[arg(long)]
        compress: bool,
        /// Use the location-wildcarding observation instead of deep
        /// heap-graph comparison.
        #[arg(long)]
        shallow: bool,
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        /// Re-check a recorded violation replay file.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Generate, transform and check seeded random programs.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value = "0..4")]
        sizes: String,
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
        #[arg(long, default_value_t = 12)]
        cap: u64,
        #[arg(long)]
        compress: bool,
        /// Directory for violation replay files.
        #[arg(long, default_value = "replays")]
        out: PathBuf,
    },
    /// Compare stack depth and allocations of source vs transformed runs.
    Bench {
        file: PathBuf,
        #[arg(long = "fn")]
        fn_name: String,
        /// Comma-separated input list lengths.
        #[arg(long, default_value = "100,1000,10000")]
        sizes: String,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        compress: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify every call site as tail, TMC-only, or neither.
    Contexts {
        file: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
}

/// Failures routed to exit codes: Usage → 2, Fail → 1.
enum CliError {
    Usage(String),
    Fail(String),
}

pub fn main_from(argv: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version as "errors" that should exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Fail(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn load_program(path: &Path, ints: bool) -> Result<Program, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let p = parse_program_with(&text, ParseOptions { ints })
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    check_wf_source(&p).map_err(|errs| {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        CliError::Fail(format!("{}: {}", path.display(), msgs.join("; ")))
    })?;
    Ok(p)
}

fn parse_arg(text: &str, ints: bool) -> Result<Expr, CliError> {
    parse_expr_text(text, ParseOptions { ints })
        .map_err(|e| CliError::Usage(format!("bad --arg: {e}")))
}

fn parse_scheduler(text: &str) -> Result<Scheduler, CliError> {
    match text {
        "left" => Ok(Scheduler::LeftFirst),
        "right" => Ok(Scheduler::RightFirst),
        _ => {
            if let Some(n) = text.strip_prefix("seed:") {
                let n: u64 = n
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad scheduler seed {n:?}")))?;
                Ok(Scheduler::Seeded(n))
            } else if let Some(bits) = text.strip_prefix("bits:") {
                if !bits.chars().all(|c| c == '0' || c == '1') {
                    return Err(CliError::Usage(format!("bad scheduler bits {bits:?}")));
                }
                Ok(Scheduler::Enumerate(bits.chars().map(|c| c == '1').collect()))
            } else {
                Err(CliError::Usage(format!(
                    "unknown scheduler {text:?} (expected left|right|seed:<n>|bits:<01...>)"
                )))
            }
        }
    }
}

/// Parses an inclusive `a..b` size range.
fn parse_sizes(text: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| CliError::Usage(format!("bad size range {text:?} (expected a..b)")))?;
    let lo = a
        .parse()
        .map_err(|_| CliError::Usage(format!("bad size range {text:?}")))?;
    let hi = b
        .trim_start_matches('=')
        .parse()
        .map_err(|_| CliError::Usage(format!("bad size range {text:?}")))?;
    if lo > hi {
        return Err(CliError::Usage(format!("empty size range {text:?}")));
    }
    Ok((lo, hi))
}

fn obs_of(shallow: bool) -> Observation {
    if shallow {
        Observation::Shallow
    } else {
        Observation::Deep
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Parse { file, common } => {
            let p = load_program(&file, common.ints)?;
            print!("{}", print_program(&p));
            Ok(())
        }
        Command::Transform {
            file,
            pass,
            compress,
            both_sides,
            depth,
            affine,
            common,
        } => {
            let p = load_program(&file, common.ints)?;
            let (out, warnings) = match pass {
                Pass::Tmc => {
                    let opts = TransformOptions {
                        compression: compress,
                        allow_both_sides: both_sides,
                    };
                    transform_program_report(&p, opts).map_err(|e| CliError::Fail(e.to_string()))?
                }
                Pass::Inline => (
                    inline_transform(&p, &InlinePolicy::all(&p, depth)),
                    Vec::new(),
                ),
                Pass::Aps => {
                    if !common.ints {
                        return Err(CliError::Usage(
                            "--pass aps requires --ints (integer extension)".into(),
                        ));
                    }
                    aps_transform_with(&p, ApsOptions { affine })
                        .map_err(|e| CliError::Fail(e.to_string()))?
                }
            };
            for w in warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", print_program(&out));
            Ok(())
        }
        Command::Run {
            file,
            fn_name,
            arg,
            scheduler,
            budget,
            trace,
            common,
        } => {
            let p = load_program(&file, common.ints)?;
            if p.get(&fn_name).is_none() {
                return Err(CliError::Fail(format!("no function {fn_name:?}")));
            }
            let arg = parse_arg(&arg, common.ints)?;
            let sched = parse_scheduler(&scheduler)?;
            let call = Expr::call_fn(fn_name, arg);
            let mut on_step = |i: u64, rule: crate::semantics::RuleName, focus: &Expr| {
                if trace {
                    println!("{i}\t{rule:?}\t{}", print_expr(focus).replace('\n', " "));
                }
            };
            let out = run_full(&p, call, &sched, budget, Heap::new(), None, &mut on_step);
            match &out.behavior {
                crate::semantics::Behavior::Conv(v) => {
                    println!("converged: {}", render_val(&out.heap, v))
                }
                crate::semantics::Behavior::Stuck(e) => {
                    println!("stuck: {}", print_expr(e).replace('\n', " "))
                }
                crate::semantics::Behavior::Timeout => println!("timeout after {budget} steps"),
            }
            println!(
                "steps: {}  max_frames: {}  allocations: {}",
                out.stats.steps, out.stats.max_frames, out.stats.allocations
            );
            Ok(())
        }
        Command::Behaviors {
            file,
            fn_name,
            arg,
            budget,
            cap,
            common,
        } => {
            let p = load_program(&file, common.ints)?;
            if p.get(&fn_name).is_none() {
                return Err(CliError::Fail(format!("no function {fn_name:?}")));
            }
            let arg = parse_arg(&arg, common.ints)?;
            let outs = behaviors(&p, Expr::call_fn(fn_name, arg), budget, cap);
            println!("{} distinct behavior(s)", outs.len());
            for out in outs {
                let bits: String = out.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
                match &out.behavior {
                    crate::semantics::Behavior::Conv(v) => {
                        println!("conv [{bits}]: {}", render_val(&out.heap, v))
                    }
                    crate::semantics::Behavior::Stuck(e) => {
                        println!("stuck [{bits}]: {}", print_expr(e).replace('\n', " "))
                    }
                    crate::semantics::Behavior::Timeout => println!("timeout [{bits}]"),
                }
            }
            Ok(())
        }
        Command::Check {
            file,
            sizes,
            budget,
            cap,
            compress,
            shallow,
            json,
            replay,
            common,
        } => {
            if let Some(path) = replay {
                return check_replay(&path, budget, cap, json);
            }
            let file = file.ok_or_else(|| {
                CliError::Usage("check needs a program file or --replay".into())
            })?;
            let (_, hi) = parse_sizes(&sizes)?;
            let p = load_program(&file, common.ints)?;
            let opts = TransformOptions {
                compression: compress,
                allow_both_sides: false,
            };
            let p_t = transform_program(&p, opts).map_err(|e| CliError::Fail(e.to_string()))?;
            let suite = default_suite(&p, hi);
            let report = check_program_refinement(&p, &p_t, &suite, budget, cap, obs_of(shallow))
                .map_err(|e| CliError::Fail(e.to_string()))?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&suite_json(&report)).expect("serializable")
                );
            } else {
                print_suite_report(&report);
            }
            if report.verdict.is_violation() {
                // replay file next to the input for reproduction
                if let Some((fn_name, arg)) = &report.failing_call {
                    if let Verdict::Violation { replay: bits, .. } = &report.verdict {
                        let r = Replay {
                            source: p.clone(),
                            target: p_t.clone(),
                            fn_name: fn_name.clone(),
                            arg: arg.clone(),
                            bits: bits.clone(),
                            obs: obs_of(shallow),
                        };
                        let path = file.with_extension("violation.txt");
                        let _ = std::fs::write(&path, write_replay(&r));
                        eprintln!("replay written to {}", path.display());
                    }
                }
                return Err(CliError::Fail("refinement violation".into()));
            }
            Ok(())
        }
        Command::Fuzz {
            seeds,
            start,
            sizes,
            budget,
            cap,
            compress,
            out,
        } => {
            let (_, hi) = parse_sizes(&sizes)?;
            let opts = TransformOptions {
                compression: compress,
                allow_both_sides: false,
            };
            let cfg = GenConfig::default();
            let mut violations = 0u64;
            let mut inconclusive = 0u64;
            for seed in start..start + seeds {
                let p = gen_program(seed, &cfg);
                let p_t = match transform_program(&p, opts) {
                    Ok(p_t) => p_t,
                    Err(e) => return Err(CliError::Fail(format!("seed {seed}: {e}"))),
                };
                let suite = default_suite(&p, hi);
                let report =
                    check_program_refinement(&p, &p_t, &suite, budget, cap, Observation::Deep)
                        .map_err(|e| CliError::Fail(format!("seed {seed}: {e}")))?;
                match &report.verdict {
                    Verdict::Refines => {}
                    Verdict::Inconclusive { .. } => inconclusive += 1,
                    Verdict::Violation { replay: bits, .. } => {
                        violations += 1;
                        let (fn_name, arg) = report
                            .failing_call
                            .clone()
                            .expect("violation carries its call");
                        let cx = Counterexample {
                            program: p.clone(),
                            fn_name,
                            arg,
                            bits: bits.clone(),
                            obs: Observation::Deep,
                        };
                        let shrunk = shrink(
                            &cx,
                            &ShrinkBudget {
                                run_budget: budget,
                                choice_cap: cap,
                                options: opts,
                            },
                        );
                        let target = transform_program(&shrunk.program, opts)
                            .expect("shrunk program still transforms");
                        let r = Replay {
                            source: shrunk.program.clone(),
                            target,
                            fn_name: shrunk.fn_name.clone(),
                            arg: shrunk.arg.clone(),
                            bits: shrunk.bits.clone(),
                            obs: shrunk.obs,
                        };
                        std::fs::create_dir_all(&out)
                            .map_err(|e| CliError::Fail(format!("{}: {e}", out.display())))?;
                        let path = out.join(format!("seed-{seed}.replay"));
                        std::fs::write(&path, write_replay(&r))
                            .map_err(|e| CliError::Fail(format!("{}: {e}", path.display())))?;
                        println!("seed {seed}: VIOLATION (replay: {})", path.display());
                    }
                }
            }
            println!(
                "{seeds} seed(s): {} violation(s), {inconclusive} inconclusive",
                violations
            );
            if violations > 0 {
                return Err(CliError::Fail(format!("{violations} violation(s)")));
            }
            Ok(())
        }
        Command::Bench {
            file,
            fn_name,
            sizes,
            budget,
            compress,
            common,
        } => {
            let p = load_program(&file, common.ints)?;
            if p.get(&fn_name).is_none() {
                return Err(CliError::Fail(format!("no function {fn_name:?}")));
            }
            let opts = TransformOptions {
                compression: compress,
                allow_both_sides: false,
            };
            let p_t = transform_program(&p, opts).map_err(|e| CliError::Fail(e.to_string()))?;
            let ns: Vec<usize> = sizes
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad size {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            println!("n\tsrc_max_frames\tsrc_allocs\ttmc_max_frames\ttmc_allocs");
            for n in ns {
                let s = bench_one(&p, &fn_name, n, budget)?;
                let t = bench_one(&p_t, &fn_name, n, budget)?;
                println!(
                    "{n}\t{}\t{}\t{}\t{}",
                    s.max_frames, s.allocations, t.max_frames, t.allocations
                );
            }
            Ok(())
        }
        Command::Contexts { file, common } => {
            let p = load_program(&file, common.ints)?;
            for (f, def) in p.iter() {
                for site in classify_contexts(&def.body) {
                    let class = match site.class {
                        crate::tmc::ContextClass::Tail => "tail",
                        crate::tmc::ContextClass::TmcOnly => "tmc",
                        crate::tmc::ContextClass::Neither => "neither",
                    };
                    println!("{f}\t{class}\t{}", site.printed);
                }
            }
            Ok(())
        }
    }
}

/// Runs `@fn(xs)` on a heap-seeded boolean list of length n.
fn bench_one(
    p: &Program,
    fn_name: &str,
    n: usize,
    budget: u64,
) -> Result<crate::semantics::RunStats, CliError> {
    let mut heap = Heap::new();
    let items: Vec<Val> = (0..n).map(|i| Val::Bool(i % 2 == 0)).collect();
    let list = heap.seed_list(&items);
    let arg = crate::refine::wrap_list_arg(p, fn_name, Expr::Val(list));
    let call = Expr::call_fn(fn_name, arg);
    let out = crate::semantics::run_in_heap(p, call, &Scheduler::LeftFirst, budget, heap);
    match out.behavior {
        crate::semantics::Behavior::Conv(_) => Ok(out.stats),
        crate::semantics::Behavior::Stuck(e) => Err(CliError::Fail(format!(
            "bench run stuck at: {}",
            print_expr(&e).replace('\n', " ")
        ))),
        crate::semantics::Behavior::Timeout => {
            Err(CliError::Fail(format!("bench run exceeded {budget} steps")))
        }
    }
}

fn check_replay(path: &Path, budget: u64, cap: u64, json: bool) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let r = read_replay(&text).map_err(CliError::Usage)?;
    let report = check_refinement(
        &r.source, &r.target, &r.fn_name, &r.arg, budget, cap, r.obs,
    )
    .map_err(|e| CliError::Fail(e.to_string()))?;
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report.to_json()).expect("serializable")
        );
    } else {
        match &report.verdict {
            Verdict::Refines => println!("verdict: refines"),
            Verdict::Inconclusive { timeouts } => {
                println!("verdict: inconclusive ({timeouts} timeout(s))")
            }
            Verdict::Violation { replay, .. } => {
                let bits: String = replay.iter().map(|b| if *b { '1' } else { '0' }).collect();
                println!("verdict: violation (bits {bits})");
            }
        }
    }
    if report.verdict.is_violation() {
        return Err(CliError::Fail("refinement violation reproduced".into()));
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct SuiteJson {
    verdict: String,
    schedules: u64,
    calls_checked: u64,
    timeouts: u64,
    failing_call: Option<String>,
    replay: Option<String>,
}

fn suite_json(r: &crate::refine::SuiteReport) -> SuiteJson {
    let (verdict, replay) = match &r.verdict {
        Verdict::Refines => ("refines".to_string(), None),
        Verdict::Inconclusive { .. } => ("inconclusive".to_string(), None),
        Verdict::Violation { replay, .. } => (
            "violation".to_string(),
            Some(replay.iter().map(|b| if *b { '1' } else { '0' }).collect()),
        ),
    };
    SuiteJson {
        verdict,
        schedules: r.schedules_explored,
        calls_checked: r.calls_checked,
        timeouts: r.timeouts,
        failing_call: r
            .failing_call
            .as_ref()
            .map(|(f, a)| format!("@{f}({})", print_expr(a).replace('\n', " "))),
        replay,
    }
}

fn print_suite_report(r: &crate::refine::SuiteReport) {
    match &r.verdict {
        Verdict::Refines => println!("verdict: refines"),
        Verdict::Inconclusive { timeouts } => {
            println!("verdict: inconclusive ({timeouts} timeout(s))")
        }
        Verdict::Violation { .. } => println!("verdict: violation"),
    }
    println!(
        "calls checked: {}  schedules explored: {}  timeouts: {}",
        r.calls_checked, r.schedules_explored, r.timeouts
    );
    if let Some((f, a)) = &r.failing_call {
        println!("failing call: @{f}({})", print_expr(a).replace('\n', " "));
    }
}

/// Renders a converged value, chasing heap references so list/tree results
/// read back as literals rather than bare locations.
pub fn render_val(heap: &Heap, v: &Val) -> String {
    render_val_depth(heap, v, 0)
}

fn render_val_depth(heap: &Heap, v: &Val, depth: usize) -> String {
    if depth > 64 {
        return "...".to_string();
    }
    match v {
        Val::Loc(l) => {
            let tag = match heap.load(*l, Idx::ZERO) {
                Some(Val::Tag(t)) => t.clone(),
                _ => return format!("<loc {l}>"),
            };
            let v1 = heap.load(*l, Idx::ONE).cloned().unwrap_or(Val::Unit);
            let v2 = heap.load(*l, Idx::TWO).cloned().unwrap_or(Val::Unit);
            let s1 = render_val_depth(heap, &v1, depth + 1);
            let s2 = render_val_depth(heap, &v2, depth + 1);
            match tag.as_str() {
                t if t == TAG_CONS => format!("{s1} :: {s2}"),
                t if t == TAG_PAIR => format!("({s1}, {s2})"),
                t => format!("block #{t} ({s1}, {s2})"),
            }
        }
        other => print_val(other),
    }
}
