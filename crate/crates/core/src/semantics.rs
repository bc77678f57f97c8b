//! Small-step operational semantics as an instrumented abstract machine.
//!
//! The machine keeps a focus expression plus an explicit stack of
//! evaluation-context frames. One [`step`] performs one *head* reduction;
//! decomposition (pushing frames to reach the redex) and plugging values
//! back are administrative and not counted. Call/Eq/Load/Store/BinOp
//! evaluate right-to-left, matching the context grammar that keeps values
//! on the right-hand frames. `Block` is always a head redex: it expands to
//! a let-sequence in one of two orders, chosen by the [`Scheduler`].

use crate::lang::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A heap of two-field tagged blocks. Cell (ℓ,0) is the tag, (ℓ,1) and
/// (ℓ,2) the fields; blocks are allocated atomically, so all three cells of
/// an allocated location always exist.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Heap {
    cells: Vec<[Val; 3]>,
}

impl Heap {
    pub fn new() -> Heap {
        Heap::default()
    }

    pub fn alloc(&mut self, tag: String, v1: Val, v2: Val) -> Loc {
        let l = self.cells.len() as Loc;
        self.cells.push([Val::Tag(tag), v1, v2]);
        l
    }

    pub fn contains(&self, l: Loc) -> bool {
        (l as usize) < self.cells.len()
    }

    pub fn load(&self, l: Loc, i: Idx) -> Option<&Val> {
        self.cells.get(l as usize).map(|b| &b[i.get() as usize])
    }

    /// Fails (None) when the location was never allocated: stores only
    /// overwrite existing cells.
    pub fn store(&mut self, l: Loc, i: Idx, v: Val) -> Option<()> {
        let b = self.cells.get_mut(l as usize)?;
        b[i.get() as usize] = v;
        Some(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Builds a list block chain from `items`, returning the list value.
    pub fn seed_list(&mut self, items: &[Val]) -> Val {
        let mut acc = Val::Unit;
        for v in items.iter().rev() {
            let l = self.alloc(TAG_CONS.to_string(), v.clone(), acc);
            acc = Val::Loc(l);
        }
        acc
    }

    /// Reads a cons/nil chain back out; None if the shape is not a list.
    pub fn read_list(&self, v: &Val) -> Option<Vec<Val>> {
        let mut out = Vec::new();
        let mut cur = v.clone();
        loop {
            match cur {
                Val::Unit => return Some(out),
                Val::Loc(l) => {
                    match self.load(l, Idx::ZERO)? {
                        Val::Tag(t) if t == TAG_CONS => {}
                        _ => return None,
                    }
                    out.push(self.load(l, Idx::ONE)?.clone());
                    cur = self.load(l, Idx::TWO)?.clone();
                    if out.len() > self.cells.len() {
                        return None; // cyclic
                    }
                }
                _ => return None,
            }
        }
    }
}

/// One evaluation-context frame; the hole is where the current focus goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Frame {
    /// let x = □ in e
    LetBody(String, Expr),
    /// e1 (□) — argument being evaluated
    CallArg(Expr),
    /// □ (v2)
    CallFn(Val),
    /// e1 == □
    EqR(Expr),
    /// □ == v2
    EqL(Val),
    /// if □ then e1 else e2
    IfCond(Expr, Expr),
    /// e1.[□]
    LoadIdx(Expr),
    /// □.[v2]
    LoadLoc(Val),
    /// e1.[e2] <- □
    StoreV(Expr, Expr),
    /// e1.[□] <- v3
    StoreIdx(Expr, Val),
    /// □.[v2] <- v3
    StoreLoc(Val, Val),
    /// e1 op □
    BinOpR(BinOp, Expr),
    /// □ op v2
    BinOpL(BinOp, Val),
}

impl Frame {
    /// Plugs an expression back into the frame's hole.
    pub fn plug(self, e: Expr) -> Expr {
        match self {
            Frame::LetBody(x, body) => Expr::let_(x, e, body),
            Frame::CallArg(f) => Expr::call(f, e),
            Frame::CallFn(v2) => Expr::call(e, Expr::Val(v2)),
            Frame::EqR(l) => Expr::eq(l, e),
            Frame::EqL(v2) => Expr::eq(e, Expr::Val(v2)),
            Frame::IfCond(t, f) => Expr::if_(e, t, f),
            Frame::LoadIdx(l) => Expr::load(l, e),
            Frame::LoadLoc(v2) => Expr::load(e, Expr::Val(v2)),
            Frame::StoreV(l, i) => Expr::store(l, i, e),
            Frame::StoreIdx(l, v3) => Expr::store(l, e, Expr::Val(v3)),
            Frame::StoreLoc(v2, v3) => Expr::store(e, Expr::Val(v2), Expr::Val(v3)),
            Frame::BinOpR(op, l) => Expr::binop(op, l, e),
            Frame::BinOpL(op, v2) => Expr::binop(op, e, Expr::Val(v2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub focus: Expr,
    pub stack: Vec<Frame>,
    pub heap: Heap,
    /// Supply for binders introduced by Block expansion.
    fresh: u64,
}

impl Config {
    pub fn new(e: Expr) -> Config {
        Config::with_heap(e, Heap::new())
    }

    pub fn with_heap(e: Expr, heap: Heap) -> Config {
        Config {
            focus: e,
            stack: Vec::new(),
            heap,
            fresh: 0,
        }
    }

    fn fresh_var(&mut self, base: &str) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("{base}%r{n}")
    }

    /// Reassembles the full expression by plugging the focus through the
    /// whole stack (used for stuck reporting).
    pub fn plug_all(&self) -> Expr {
        let mut e = self.focus.clone();
        for f in self.stack.iter().rev() {
            e = f.clone().plug(e);
        }
        e
    }
}

/// How Block-order nondeterminism is resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scheduler {
    LeftFirst,
    RightFirst,
    Seeded(u64),
    /// Bits consumed left to right; `false` picks the left-first expansion.
    /// An exhausted prefix falls back to LeftFirst.
    Enumerate(Vec<bool>),
}

/// Runtime state for a scheduler (RNG stream, enumeration cursor).
#[derive(Debug, Clone)]
pub struct SchedulerState {
    inner: SchedInner,
    /// Every bit handed out, in order.
    pub taken: Vec<bool>,
}

#[derive(Debug, Clone)]
enum SchedInner {
    LeftFirst,
    RightFirst,
    Seeded(ChaCha8Rng),
    Enumerate { bits: Vec<bool>, pos: usize },
}

impl SchedulerState {
    pub fn new(s: &Scheduler) -> SchedulerState {
        let inner = match s {
            Scheduler::LeftFirst => SchedInner::LeftFirst,
            Scheduler::RightFirst => SchedInner::RightFirst,
            Scheduler::Seeded(seed) => SchedInner::Seeded(ChaCha8Rng::seed_from_u64(*seed)),
            Scheduler::Enumerate(bits) => SchedInner::Enumerate {
                bits: bits.clone(),
                pos: 0,
            },
        };
        SchedulerState {
            inner,
            taken: Vec::new(),
        }
    }

    fn next_bit(&mut self) -> bool {
        let b = match &mut self.inner {
            SchedInner::LeftFirst => false,
            SchedInner::RightFirst => true,
            SchedInner::Seeded(rng) => rng.gen::<bool>(),
            SchedInner::Enumerate { bits, pos } => {
                let b = bits.get(*pos).copied().unwrap_or(false);
                *pos += 1;
                b
            }
        };
        self.taken.push(b);
        b
    }
}

/// Names of the head-reduction rules, for traces and the unit suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RuleName {
    StepLet,
    StepCall,
    StepBlock1,
    StepBlock2,
    StepBlockDet,
    StepLoad,
    StepStore,
    StepEq,
    StepIfTrue,
    StepIfFalse,
    StepBinOp,
}

#[derive(Debug)]
pub enum StepOutcome {
    Stepped {
        next: Config,
        rule: RuleName,
        choice_taken: Option<bool>,
    },
    /// Focus is a value with an empty stack, or no rule applies.
    Irreducible(Config),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Behavior {
    Conv(Val),
    Stuck(Expr),
    Timeout,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub steps: u64,
    pub max_frames: u64,
    pub allocations: u64,
    pub max_frames_at_call: u64,
}

/// Performs one head step, decomposing and plugging as needed.
pub fn step(p: &Program, c: Config, s: &mut SchedulerState) -> StepOutcome {
    let mut stats = RunStats::default();
    step_inner(p, c, s, &mut stats)
}

fn step_inner(
    p: &Program,
    mut c: Config,
    s: &mut SchedulerState,
    stats: &mut RunStats,
) -> StepOutcome {
    loop {
        // Plug finished values back into the enclosing frame.
        if let Expr::Val(v) = &c.focus {
            match c.stack.pop() {
                None => return StepOutcome::Irreducible(c),
                Some(frame) => {
                    // Frames expecting further decomposition re-focus the
                    // pending subexpression directly instead of re-plugging.
                    let v = v.clone();
                    match frame {
                        Frame::CallArg(f) => {
                            c.stack.push(Frame::CallFn(v));
                            c.focus = f;
                        }
                        Frame::EqR(l) => {
                            c.stack.push(Frame::EqL(v));
                            c.focus = l;
                        }
                        Frame::LoadIdx(l) => {
                            c.stack.push(Frame::LoadLoc(v));
                            c.focus = l;
                        }
                        Frame::StoreV(l, i) => {
                            c.stack.push(Frame::StoreIdx(l, v));
                            c.focus = i;
                        }
                        Frame::StoreIdx(l, v3) => {
                            c.stack.push(Frame::StoreLoc(v, v3));
                            c.focus = l;
                        }
                        Frame::BinOpR(op, l) => {
                            c.stack.push(Frame::BinOpL(op, v));
                            c.focus = l;
                        }
                        other => c.focus = other.plug(Expr::Val(v)),
                    }
                    stats.max_frames = stats.max_frames.max(c.stack.len() as u64);
                    continue;
                }
            }
        }

        // Decompose per the context grammar (right-to-left), or fire a head
        // rule once the redex is in focus.
        macro_rules! descend {
            ($sub:expr, $frame:expr) => {{
                c.stack.push($frame);
                c.focus = $sub;
                stats.max_frames = stats.max_frames.max(c.stack.len() as u64);
                continue;
            }};
        }
        macro_rules! done {
            ($rule:expr, $choice:expr, $next_focus:expr) => {{
                stats.steps += 1;
                c.focus = $next_focus;
                return StepOutcome::Stepped {
                    next: c,
                    rule: $rule,
                    choice_taken: $choice,
                };
            }};
        }

        match c.focus.clone() {
            Expr::Val(_) => unreachable!(),
            // Annotations are transparent to the semantics.
            Expr::Annotated(inner, _) => {
                c.focus = *inner;
                continue;
            }
            Expr::Var(_) => return StepOutcome::Irreducible(c),
            Expr::Let(x, e1, e2) => match *e1 {
                Expr::Val(v) => done!(RuleName::StepLet, None, subst(&e2, &x, &v)),
                e1 => descend!(e1, Frame::LetBody(x, *e2)),
            },
            Expr::Call(e1, e2) => match (*e1, *e2) {
                (Expr::Val(v1), Expr::Val(v2)) => {
                    let Val::Fnptr(f) = &v1 else {
                        return StepOutcome::Irreducible(c);
                    };
                    let Some(def) = p.get(f) else {
                        return StepOutcome::Irreducible(c);
                    };
                    stats.max_frames_at_call = stats.max_frames_at_call.max(c.stack.len() as u64);
                    done!(RuleName::StepCall, None, subst(&def.body, &def.param, &v2))
                }
                (e1, Expr::Val(v2)) => descend!(e1, Frame::CallFn(v2)),
                (e1, e2) => descend!(e2, Frame::CallArg(e1)),
            },
            Expr::Eq(e1, e2) => match (*e1, *e2) {
                (Expr::Val(v1), Expr::Val(v2)) => done!(
                    RuleName::StepEq,
                    None,
                    Expr::Val(Val::Bool(eq_val(&v1, &v2)))
                ),
                (e1, Expr::Val(v2)) => descend!(e1, Frame::EqL(v2)),
                (e1, e2) => descend!(e2, Frame::EqR(e1)),
            },
            Expr::If(e0, e1, e2) => match *e0 {
                Expr::Val(Val::Bool(true)) => done!(RuleName::StepIfTrue, None, *e1),
                Expr::Val(Val::Bool(false)) => done!(RuleName::StepIfFalse, None, *e2),
                Expr::Val(_) => return StepOutcome::Irreducible(c),
                e0 => descend!(e0, Frame::IfCond(*e1, *e2)),
            },
            Expr::Block(t, e1, e2) => {
                // Block is always a head redex. The scheduler is consulted
                // only when both subterms still need evaluation; otherwise
                // the two expansion orders are confluent and the left-first
                // one is taken silently, keeping schedule enumeration small.
                let both_pending = !e1.is_value() && !e2.is_value();
                let (right_first, choice) = if both_pending {
                    let b = s.next_bit();
                    (b, Some(b))
                } else {
                    (false, None)
                };
                let x1 = c.fresh_var("b1");
                let x2 = c.fresh_var("b2");
                let det = Expr::block_det(t, Expr::var(&x1), Expr::var(&x2));
                let (rule, expanded) = if right_first {
                    (
                        RuleName::StepBlock2,
                        Expr::let_(x2.clone(), *e2, Expr::let_(x1.clone(), *e1, det)),
                    )
                } else {
                    (
                        RuleName::StepBlock1,
                        Expr::let_(x1.clone(), *e1, Expr::let_(x2.clone(), *e2, det)),
                    )
                };
                done!(rule, choice, expanded)
            }
            Expr::BlockDet(t, e1, e2) => match (*e1, *e2) {
                (Expr::Val(v1), Expr::Val(v2)) => {
                    let l = c.heap.alloc(t, v1, v2);
                    stats.allocations += 1;
                    done!(RuleName::StepBlockDet, None, Expr::Val(Val::Loc(l)))
                }
                // A det-block over unevaluated subterms never arises from
                // Block expansion; treat it as stuck rather than evaluate.
                _ => return StepOutcome::Irreducible(c),
            },
            Expr::Load(e1, e2) => match (*e1, *e2) {
                (Expr::Val(v1), Expr::Val(v2)) => {
                    let (Val::Loc(l), Val::Idx(i)) = (&v1, &v2) else {
                        return StepOutcome::Irreducible(c);
                    };
                    let Some(v) = c.heap.load(*l, *i).cloned() else {
                        return StepOutcome::Irreducible(c);
                    };
                    done!(RuleName::StepLoad, None, Expr::Val(v))
                }
                (e1, Expr::Val(v2)) => descend!(e1, Frame::LoadLoc(v2)),
                (e1, e2) => descend!(e2, Frame::LoadIdx(e1)),
            },
            Expr::Store(e1, e2, e3) => match (*e1, *e2, *e3) {
                (Expr::Val(v1), Expr::Val(v2), Expr::Val(v3)) => {
                    let (Val::Loc(l), Val::Idx(i)) = (&v1, &v2) else {
                        return StepOutcome::Irreducible(c);
                    };
                    if c.heap.store(*l, *i, v3).is_none() {
                        return StepOutcome::Irreducible(c);
                    }
                    done!(RuleName::StepStore, None, Expr::unit())
                }
                (e1, e2, Expr::Val(v3)) => match e2 {
                    Expr::Val(v2) => descend!(e1, Frame::StoreLoc(v2, v3)),
                    e2 => descend!(e2, Frame::StoreIdx(e1, v3)),
                },
                (e1, e2, e3) => descend!(e3, Frame::StoreV(e1, e2)),
            },
            Expr::BinOp(op, e1, e2) => match (*e1, *e2) {
                (Expr::Val(v1), Expr::Val(v2)) => {
                    let (Val::Int(n1), Val::Int(n2)) = (&v1, &v2) else {
                        return StepOutcome::Irreducible(c);
                    };
                    let n = match op {
                        BinOp::Add => n1.wrapping_add(*n2),
                        BinOp::Mul => n1.wrapping_mul(*n2),
                    };
                    done!(RuleName::StepBinOp, None, Expr::int(n))
                }
                (e1, Expr::Val(v2)) => descend!(e1, Frame::BinOpL(op, v2)),
                (e1, e2) => descend!(e2, Frame::BinOpR(op, e1)),
            },
        }
    }
}

/// The footnote equality: physical on locations, value equality on
/// primitives of the same type, false across types. Total.
pub fn eq_val(v1: &Val, v2: &Val) -> bool {
    match (v1, v2) {
        (Val::Unit, Val::Unit) => true,
        (Val::Idx(a), Val::Idx(b)) => a == b,
        (Val::Tag(a), Val::Tag(b)) => a == b,
        (Val::Bool(a), Val::Bool(b)) => a == b,
        (Val::Loc(a), Val::Loc(b)) => a == b,
        (Val::Fnptr(a), Val::Fnptr(b)) => a == b,
        (Val::Int(a), Val::Int(b)) => a == b,
        _ => false,
    }
}

/// A terminated (or cut-off) exploration of one schedule.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub behavior: Behavior,
    pub heap: Heap,
    pub stats: RunStats,
    /// Scheduler bits consumed, replayable via `Scheduler::Enumerate`.
    pub bits: Vec<bool>,
}

pub fn run(p: &Program, e: Expr, s: &Scheduler, budget: u64) -> (Behavior, RunStats) {
    let out = run_full(p, e, s, budget, Heap::new(), None, &mut |_, _, _| {});
    (out.behavior, out.stats)
}

/// Extension point: start from a pre-seeded heap (used to feed large list
/// inputs without first evaluating a deep literal).
pub fn run_in_heap(p: &Program, e: Expr, s: &Scheduler, budget: u64, heap: Heap) -> RunOutcome {
    run_full(p, e, s, budget, heap, None, &mut |_, _, _| {})
}

/// Full-control run: optional choice cap (exceeding it yields Timeout) and
/// a per-head-step trace callback (step index, rule, focus after the step).
pub fn run_full(
    p: &Program,
    e: Expr,
    s: &Scheduler,
    budget: u64,
    heap: Heap,
    choice_cap: Option<u64>,
    on_step: &mut dyn FnMut(u64, RuleName, &Expr),
) -> RunOutcome {
    let mut sched = SchedulerState::new(s);
    let mut c = Config::with_heap(e, heap);
    let mut stats = RunStats::default();
    loop {
        if stats.steps >= budget {
            return RunOutcome {
                behavior: Behavior::Timeout,
                heap: c.heap,
                stats,
                bits: sched.taken,
            };
        }
        match step_inner(p, c, &mut sched, &mut stats) {
            StepOutcome::Stepped { next, rule, .. } => {
                if let Some(cap) = choice_cap {
                    if sched.taken.len() as u64 > cap {
                        return RunOutcome {
                            behavior: Behavior::Timeout,
                            heap: next.heap,
                            stats,
                            bits: sched.taken,
                        };
                    }
                }
                on_step(stats.steps, rule, &next.focus);
                c = next;
            }
            StepOutcome::Irreducible(cfg) => {
                let behavior = match &cfg.focus {
                    Expr::Val(v) if cfg.stack.is_empty() => Behavior::Conv(v.clone()),
                    _ => Behavior::Stuck(cfg.plug_all()),
                };
                return RunOutcome {
                    behavior,
                    heap: cfg.heap,
                    stats,
                    bits: sched.taken,
                };
            }
        }
    }
}

/// Depth-first enumeration of all schedules up to `choice_cap` choice
/// points per path. The result is deduplicated: converged values are
/// compared by deep heap-graph equivalence, stuck expressions structurally.
pub fn behaviors(p: &Program, e: Expr, budget: u64, choice_cap: u64) -> Vec<RunOutcome> {
    behaviors_in_heap(p, e, budget, choice_cap, Heap::new())
}

pub fn behaviors_in_heap(
    p: &Program,
    e: Expr,
    budget: u64,
    choice_cap: u64,
    heap: Heap,
) -> Vec<RunOutcome> {
    let mut results: Vec<RunOutcome> = Vec::new();
    let mut worklist: Vec<Vec<bool>> = vec![Vec::new()];
    while let Some(prefix) = worklist.pop() {
        let plen = prefix.len();
        let out = run_full(
            p,
            e.clone(),
            &Scheduler::Enumerate(prefix),
            budget,
            heap.clone(),
            Some(choice_cap),
            &mut |_, _, _| {},
        );
        // Schedule the untaken branch of every choice point reached past
        // the current prefix (the fallback always took the left branch).
        for i in plen..out.bits.len().min(choice_cap as usize) {
            let mut flipped: Vec<bool> = out.bits[..i].to_vec();
            flipped.push(!out.bits[i]);
            worklist.push(flipped);
        }
        let duplicate = results.iter().any(|r| match (&r.behavior, &out.behavior) {
            (Behavior::Timeout, Behavior::Timeout) => true,
            (Behavior::Stuck(a), Behavior::Stuck(b)) => a == b,
            (Behavior::Conv(a), Behavior::Conv(b)) => {
                crate::refine::similar(
                    crate::refine::Observation::Deep,
                    &r.heap,
                    a,
                    &out.heap,
                    b,
                )
                .0
            }
            _ => false,
        });
        if !duplicate {
            results.push(out);
        }
    }
    results
}
