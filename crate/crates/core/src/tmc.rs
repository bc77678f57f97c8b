//! The TMC transformation.
//!
//! Planning picks a DPS (destination-passing style) variant name for every
//! opted-in function. A single bottom-up pass then computes a [`Choice`]
//! per subterm: its direct-style transform plus a re-emittable DPS plan,
//! along with the metadata needed to resolve which block side goes to DPS.
//! Emission produces, for a direct-style block whose side contains an
//! optimizable call, the partial block with a hole
//! (`let x = block t (e1', _?) in (e2_dps; x)`), and for DPS positions the
//! corresponding link-then-tail-call layout
//! (`let x = ... in dst.[idx] <- x; e2_dps`). Constructor compression
//! optionally delays nested constructor frames so each burst materializes
//! a single intermediate destination.

use crate::lang::*;
use std::collections::BTreeMap;
use std::fmt;

/// f ↦ f.dps for every function getting a DPS variant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    map: BTreeMap<String, String>,
}

impl Renaming {
    pub fn get(&self, f: &str) -> Option<&str> {
        self.map.get(f).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn dps_names(&self) -> impl Iterator<Item = &str> {
        self.map.values().map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformOptions {
    pub compression: bool,
    /// Permits transforming both block sides to DPS instead of erroring
    /// when both request it.
    pub allow_both_sides: bool,
}

#[allow(clippy::derivable_impls)]
impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            compression: false,
            allow_both_sides: false,
        }
    }
}

/// Raised when a block has two optimizable sides and no annotation picks
/// one. The message deliberately matches the compiler-error UX the
/// transformation is modeled on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityError {
    pub call_sites: Vec<String>,
}

impl fmt::Display for AmbiguityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "this constructor application may be TMC-transformed in several \
             different ways. Please disambiguate by adding an explicit \
             \"[@tailcall]\" attribute to the call that should be made \
             tail-recursive, or a \"[@tailcall false]\" attribute on calls \
             that should not be transformed."
        )?;
        for site in &self.call_sites {
            write!(f, "\n  candidate call: {site}")?;
        }
        Ok(())
    }
}

impl std::error::Error for AmbiguityError {}

/// Picks a fresh `<f>.dps` name for every `@tmc`-annotated definition.
pub fn plan_renaming(p: &Program) -> Renaming {
    let mut names = NameGen::for_program(p);
    plan_renaming_with(p, &mut names)
}

fn plan_renaming_with(p: &Program, names: &mut NameGen) -> Renaming {
    let mut r = Renaming::default();
    for (f, def) in p.iter() {
        if def.annotated_tmc {
            let dps = names.fresh_fn(f, "dps");
            r.map.insert(f.to_string(), dps);
        }
    }
    r
}

/// Per-subterm transformation summary, computed bottom-up in one pass.
#[derive(Debug, Clone)]
pub struct Choice {
    /// Direct-style transform: congruence everywhere, except blocks with a
    /// resolved DPS side, which become the partial-block layout.
    pub direct: Expr,
    pub benefits_from_dps: bool,
    pub explicit_tailcall_request: bool,
    /// Printed descriptors of the optimizable calls in DPS position,
    /// for diagnostics.
    pub tmc_calls: Vec<String>,
    plan: Plan,
}

#[derive(Debug, Clone)]
enum Plan {
    /// Evaluate directly, write the result to the destination.
    Base,
    /// Tail call to the callee's DPS variant; the argument is already
    /// direct-transformed.
    Call { f_dps: String, arg: Expr },
    Let {
        x: String,
        bound: Expr,
        body: Box<Choice>,
    },
    If {
        cond: Expr,
        then_: Box<Choice>,
        else_: Box<Choice>,
    },
    /// One block side continues in DPS; the other is already direct.
    Block {
        tag: String,
        side: Idx,
        other: Expr,
        inner: Box<Choice>,
    },
    /// Both sides in DPS (only under `allow_both_sides`).
    BlockBoth {
        tag: String,
        left: Box<Choice>,
        right: Box<Choice>,
    },
}

/// A delayed constructor frame: `tag` applied with `filled` already in
/// `filled_side` and the hole in the other field.
#[derive(Debug, Clone)]
struct CFrame {
    tag: String,
    filled_side: Idx,
    filled: Expr,
}

fn hole_side(filled: Idx) -> Idx {
    if filled == Idx::ONE {
        Idx::TWO
    } else {
        Idx::ONE
    }
}

/// Analyzes a subterm against a renaming. Ambiguity (a block whose two
/// sides both contain optimizable calls, with no disambiguating
/// annotation) is reported here, while resolving that block.
pub fn analyze(e: &Expr, xi: &Renaming) -> Result<Choice, AmbiguityError> {
    let mut names = NameGen::new();
    e.visit(&mut |sub| match sub {
        Expr::Var(x) => names.reserve(x),
        Expr::Let(x, _, _) => names.reserve(x),
        _ => {}
    });
    let mut cx = Cx {
        names: &mut names,
        warnings: &mut Vec::new(),
        opts: TransformOptions::default(),
    };
    analyze_in(e, xi, &mut cx)
}

struct Cx<'a> {
    names: &'a mut NameGen,
    warnings: &'a mut Vec<String>,
    opts: TransformOptions,
}

fn base(direct: Expr) -> Choice {
    Choice {
        direct,
        benefits_from_dps: false,
        explicit_tailcall_request: false,
        tmc_calls: Vec::new(),
        plan: Plan::Base,
    }
}

fn describe_call(e: &Expr) -> String {
    print_expr(e).replace('\n', " ").replace("  ", " ")
}

/// A child choice is being discarded because its position cannot continue
/// in DPS style; an explicit request there deserves a diagnostic.
fn warn_dropped_request(cx: &mut Cx, c: &Choice) {
    if c.explicit_tailcall_request {
        let site = c
            .tmc_calls
            .first()
            .cloned()
            .unwrap_or_else(|| "<call>".to_string());
        cx.warnings.push(format!(
            "[@tailcall] on a call that cannot be optimized: {site}"
        ));
    }
}

fn analyze_in(e: &Expr, xi: &Renaming, cx: &mut Cx) -> Result<Choice, AmbiguityError> {
    Ok(match e {
        Expr::Val(_) | Expr::Var(_) => base(e.clone()),
        Expr::Annotated(inner, ann) => {
            let c = analyze_in(inner, xi, cx)?;
            match ann {
                Annotation::Tailcall(false) => base(c.direct),
                Annotation::Tailcall(true) => {
                    if c.benefits_from_dps {
                        Choice {
                            explicit_tailcall_request: true,
                            ..c
                        }
                    } else {
                        cx.warnings.push(format!(
                            "[@tailcall] on a call that cannot be optimized: {}",
                            describe_call(inner)
                        ));
                        c
                    }
                }
                Annotation::Tmc => c,
            }
        }
        Expr::Call(f, a) => {
            let ca = analyze_in(a, xi, cx)?;
            let cf = analyze_in(f, xi, cx)?;
            warn_dropped_request(cx, &ca);
            warn_dropped_request(cx, &cf);
            let direct = Expr::call(cf.direct.clone(), ca.direct.clone());
            if let Expr::Val(Val::Fnptr(name)) = &**f {
                if let Some(f_dps) = xi.get(name) {
                    return Ok(Choice {
                        tmc_calls: vec![describe_call(&direct)],
                        plan: Plan::Call {
                            f_dps: f_dps.to_string(),
                            arg: ca.direct,
                        },
                        direct,
                        benefits_from_dps: true,
                        explicit_tailcall_request: false,
                    });
                }
            }
            base(direct)
        }
        Expr::Let(x, e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c1);
            let direct = Expr::let_(x.clone(), c1.direct.clone(), c2.direct.clone());
            if c2.benefits_from_dps {
                Choice {
                    direct,
                    benefits_from_dps: true,
                    explicit_tailcall_request: c2.explicit_tailcall_request,
                    tmc_calls: c2.tmc_calls.clone(),
                    plan: Plan::Let {
                        x: x.clone(),
                        bound: c1.direct,
                        body: Box::new(c2),
                    },
                }
            } else {
                base(direct)
            }
        }
        Expr::If(e0, e1, e2) => {
            let c0 = analyze_in(e0, xi, cx)?;
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c0);
            let direct = Expr::if_(c0.direct.clone(), c1.direct.clone(), c2.direct.clone());
            if c1.benefits_from_dps || c2.benefits_from_dps {
                Choice {
                    direct,
                    benefits_from_dps: true,
                    explicit_tailcall_request: c1.explicit_tailcall_request
                        || c2.explicit_tailcall_request,
                    tmc_calls: [c1.tmc_calls.clone(), c2.tmc_calls.clone()].concat(),
                    plan: Plan::If {
                        cond: c0.direct,
                        then_: Box::new(c1),
                        else_: Box::new(c2),
                    },
                }
            } else {
                base(direct)
            }
        }
        Expr::Block(t, e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            match resolve(&c1, &c2, cx.opts.allow_both_sides, cx.warnings)? {
                None => base(Expr::block(t.clone(), c1.direct, c2.direct)),
                Some(Side::Both) => {
                    let choice = Choice {
                        direct: Expr::unit(), // patched below
                        benefits_from_dps: true,
                        explicit_tailcall_request: c1.explicit_tailcall_request
                            || c2.explicit_tailcall_request,
                        tmc_calls: [c1.tmc_calls.clone(), c2.tmc_calls.clone()].concat(),
                        plan: Plan::BlockBoth {
                            tag: t.clone(),
                            left: Box::new(c1),
                            right: Box::new(c2),
                        },
                    };
                    Choice {
                        direct: emit_direct_block(&choice.plan, cx),
                        ..choice
                    }
                }
                Some(Side::One(side)) => {
                    let (inner, other) = if side == Idx::ONE {
                        (c1, c2.direct)
                    } else {
                        (c2, c1.direct)
                    };
                    let choice = Choice {
                        direct: Expr::unit(), // patched below
                        benefits_from_dps: true,
                        explicit_tailcall_request: inner.explicit_tailcall_request,
                        tmc_calls: inner.tmc_calls.clone(),
                        plan: Plan::Block {
                            tag: t.clone(),
                            side,
                            other,
                            inner: Box::new(inner),
                        },
                    };
                    Choice {
                        direct: emit_direct_block(&choice.plan, cx),
                        ..choice
                    }
                }
            }
        }
        Expr::BlockDet(t, e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c1);
            warn_dropped_request(cx, &c2);
            base(Expr::block_det(t.clone(), c1.direct, c2.direct))
        }
        Expr::Eq(e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c1);
            warn_dropped_request(cx, &c2);
            base(Expr::eq(c1.direct, c2.direct))
        }
        Expr::Load(e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c1);
            warn_dropped_request(cx, &c2);
            base(Expr::load(c1.direct, c2.direct))
        }
        Expr::Store(e1, e2, e3) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            let c3 = analyze_in(e3, xi, cx)?;
            warn_dropped_request(cx, &c1);
            warn_dropped_request(cx, &c2);
            warn_dropped_request(cx, &c3);
            base(Expr::store(c1.direct, c2.direct, c3.direct))
        }
        Expr::BinOp(op, e1, e2) => {
            let c1 = analyze_in(e1, xi, cx)?;
            let c2 = analyze_in(e2, xi, cx)?;
            warn_dropped_request(cx, &c1);
            warn_dropped_request(cx, &c2);
            base(Expr::binop(*op, c1.direct, c2.direct))
        }
    })
}

enum Side {
    One(Idx),
    Both,
}

/// Which block side continues in DPS style. Explicit requests win; with
/// no requests, a single beneficial side is chosen automatically and two
/// beneficial sides are ambiguous.
fn resolve(
    c1: &Choice,
    c2: &Choice,
    allow_both: bool,
    _warnings: &mut Vec<String>,
) -> Result<Option<Side>, AmbiguityError> {
    // requests on non-beneficial sides were already warned about
    let req1 = c1.explicit_tailcall_request && c1.benefits_from_dps;
    let req2 = c2.explicit_tailcall_request && c2.benefits_from_dps;
    let ben1 = c1.benefits_from_dps;
    let ben2 = c2.benefits_from_dps;
    Ok(match (req1, req2) {
        (true, true) if allow_both => Some(Side::Both),
        (true, true) => {
            return Err(AmbiguityError {
                call_sites: [c1.tmc_calls.clone(), c2.tmc_calls.clone()].concat(),
            })
        }
        (true, false) => Some(Side::One(Idx::ONE)),
        (false, true) => Some(Side::One(Idx::TWO)),
        (false, false) => match (ben1, ben2) {
            (true, true) if allow_both => Some(Side::Both),
            (true, true) => {
                return Err(AmbiguityError {
                    call_sites: [c1.tmc_calls.clone(), c2.tmc_calls.clone()].concat(),
                })
            }
            (true, false) => Some(Side::One(Idx::ONE)),
            (false, true) => Some(Side::One(Idx::TWO)),
            (false, false) => None,
        },
    })
}

/// Direct-style emission of a DPS-bearing block:
/// `let x = block t (e1', _?) in (e2_dps; x)`.
fn emit_direct_block(plan: &Plan, cx: &mut Cx) -> Expr {
    match plan {
        Plan::Block {
            tag,
            side,
            other,
            inner,
        } => {
            let x = cx.names.fresh("dst");
            let hole = Expr::hole();
            let blk = if *side == Idx::ONE {
                Expr::block(tag.clone(), hole, other.clone())
            } else {
                Expr::block(tag.clone(), other.clone(), hole)
            };
            let mut pending = Vec::new();
            let fill = emit_dps(inner, &Expr::var(&x), &Expr::idx(*side), &mut pending, cx);
            Expr::let_(x.clone(), blk, seq(fill, Expr::var(&x), cx))
        }
        Plan::BlockBoth { tag, left, right } => {
            let x = cx.names.fresh("dst");
            let blk = Expr::block(tag.clone(), Expr::hole(), Expr::hole());
            let fill1 = emit_dps(left, &Expr::var(&x), &Expr::idx(Idx::ONE), &mut Vec::new(), cx);
            let fill2 = emit_dps(right, &Expr::var(&x), &Expr::idx(Idx::TWO), &mut Vec::new(), cx);
            Expr::let_(
                x.clone(),
                blk,
                seq(fill1, seq(fill2, Expr::var(&x), cx), cx),
            )
        }
        _ => unreachable!("only block plans have a direct block emission"),
    }
}

fn seq(e1: Expr, e2: Expr, cx: &mut Cx) -> Expr {
    Expr::let_(cx.names.fresh("_"), e1, e2)
}

/// Reification of the pending constructor stack: the innermost frame
/// becomes the new destination block (with its hole), the outer frames
/// collapse into the single store to the old destination.
struct Reified {
    bind_var: String,
    alloc: Expr,
    store: Expr,
    new_dst: Expr,
    new_idx: Expr,
}

fn reify(dst: &Expr, idx: &Expr, pending: &mut Vec<CFrame>, cx: &mut Cx) -> Option<Reified> {
    let innermost = pending.pop()?;
    let bind_var = cx.names.fresh("dst");
    let hole = hole_side(innermost.filled_side);
    let alloc = if innermost.filled_side == Idx::ONE {
        Expr::block(innermost.tag, innermost.filled, Expr::hole())
    } else {
        Expr::block(innermost.tag, Expr::hole(), innermost.filled)
    };
    let mut chain = Expr::var(&bind_var);
    for f in pending.drain(..).rev() {
        chain = if f.filled_side == Idx::ONE {
            Expr::block(f.tag, f.filled, chain)
        } else {
            Expr::block(f.tag, chain, f.filled)
        };
    }
    let store = Expr::store(dst.clone(), idx.clone(), chain);
    Some(Reified {
        new_dst: Expr::var(&bind_var),
        new_idx: Expr::idx(hole),
        bind_var,
        alloc,
        store,
    })
}

/// Wraps `body` in the bindings produced by a reification, if any.
fn with_reified(r: Option<Reified>, body: impl FnOnce(&Expr, &Expr, &mut Cx) -> Expr, dst: &Expr, idx: &Expr, cx: &mut Cx) -> Expr {
    match r {
        None => body(dst, idx, cx),
        Some(r) => {
            let inner = body(&r.new_dst, &r.new_idx, cx);
            Expr::let_(r.bind_var, r.alloc, seq(r.store, inner, cx))
        }
    }
}

/// DPS emission of a choice under a destination, threading the pending
/// constructor stack (always empty when compression is off).
fn emit_dps(c: &Choice, dst: &Expr, idx: &Expr, pending: &mut Vec<CFrame>, cx: &mut Cx) -> Expr {
    match &c.plan {
        Plan::Base => {
            let r = reify(dst, idx, pending, cx);
            let direct = c.direct.clone();
            with_reified(
                r,
                move |d, i, _| Expr::store(d.clone(), i.clone(), direct),
                dst,
                idx,
                cx,
            )
        }
        Plan::Call { f_dps, arg } => {
            let r = reify(dst, idx, pending, cx);
            let f_dps = f_dps.clone();
            let arg = arg.clone();
            with_reified(
                r,
                move |d, i, _| {
                    Expr::call_fn(
                        f_dps,
                        Expr::pair(Expr::pair(d.clone(), i.clone()), arg),
                    )
                },
                dst,
                idx,
                cx,
            )
        }
        Plan::Let { x, bound, body } => {
            let inner = emit_dps(body, dst, idx, pending, cx);
            Expr::let_(x.clone(), bound.clone(), inner)
        }
        Plan::If { cond, then_, else_ } => {
            // Branching: reify first so the stack is not duplicated into
            // both branches.
            let r = reify(dst, idx, pending, cx);
            let cond = cond.clone();
            with_reified(
                r,
                move |d, i, cx| {
                    let t = emit_dps(then_, d, i, &mut Vec::new(), cx);
                    let e = emit_dps(else_, d, i, &mut Vec::new(), cx);
                    Expr::if_(cond, t, e)
                },
                dst,
                idx,
                cx,
            )
        }
        Plan::Block {
            tag,
            side,
            other,
            inner,
        } => {
            if cx.opts.compression {
                // Delay the frame; let-bind an effectful sibling at its
                // original position so evaluation order is preserved.
                let (filled, binding) = match other {
                    Expr::Val(_) | Expr::Var(_) => (other.clone(), None),
                    _ => {
                        let tmp = cx.names.fresh("tmp");
                        (Expr::var(&tmp), Some((tmp, other.clone())))
                    }
                };
                // the DPS side is the hole; the filled side is the other one
                pending.push(CFrame {
                    tag: tag.clone(),
                    filled_side: hole_side(*side),
                    filled,
                });
                let body = emit_dps(inner, dst, idx, pending, cx);
                match binding {
                    None => body,
                    Some((tmp, bound)) => Expr::let_(tmp, bound, body),
                }
            } else {
                // Immediate reification of a single frame: the plain
                // link-then-continue layout.
                pending.push(CFrame {
                    tag: tag.clone(),
                    filled_side: hole_side(*side),
                    filled: other.clone(),
                });
                let r = reify(dst, idx, pending, cx);
                with_reified(
                    r,
                    move |d, i, cx| emit_dps(inner, d, i, &mut Vec::new(), cx),
                    dst,
                    idx,
                    cx,
                )
            }
        }
        Plan::BlockBoth { tag, left, right } => {
            let r = reify(dst, idx, pending, cx);
            let tag = tag.clone();
            with_reified(
                r,
                move |d, i, cx| {
                    let x = cx.names.fresh("dst");
                    let blk = Expr::block(tag, Expr::hole(), Expr::hole());
                    let link = Expr::store(d.clone(), i.clone(), Expr::var(&x));
                    let fill1 =
                        emit_dps(left, &Expr::var(&x), &Expr::idx(Idx::ONE), &mut Vec::new(), cx);
                    let fill2 =
                        emit_dps(right, &Expr::var(&x), &Expr::idx(Idx::TWO), &mut Vec::new(), cx);
                    Expr::let_(x.clone(), blk, seq(link, seq(fill1, fill2, cx), cx))
                },
                dst,
                idx,
                cx,
            )
        }
    }
}

/// DPS transform of one definition: the variant takes the pair-encoded
/// `((dst, idx), x)` argument and writes its result to the destination.
pub fn transform_dps_def(
    d: &Def,
    xi: &Renaming,
    compression: bool,
) -> Result<Def, AmbiguityError> {
    let mut names = NameGen::new();
    names.reserve(&d.param);
    d.body.visit(&mut |sub| match sub {
        Expr::Var(x) => names.reserve(x),
        Expr::Let(x, _, _) => names.reserve(x),
        _ => {}
    });
    let mut warnings = Vec::new();
    let mut cx = Cx {
        names: &mut names,
        warnings: &mut warnings,
        opts: TransformOptions {
            compression,
            allow_both_sides: false,
        },
    };
    transform_dps_def_in(d, xi, &mut cx)
}

fn transform_dps_def_in(d: &Def, xi: &Renaming, cx: &mut Cx) -> Result<Def, AmbiguityError> {
    let choice = analyze_in(&d.body, xi, cx)?;
    let p = cx.names.fresh("p");
    let dest = cx.names.fresh("d");
    let dst = cx.names.fresh("dst");
    let idx = cx.names.fresh("idx");
    let mut pending = Vec::new();
    let body_dps = emit_dps(&choice, &Expr::var(&dst), &Expr::var(&idx), &mut pending, cx);
    // ((dst, idx), x) decomposed per the pair sugar: nested loads
    let body = Expr::let_(
        dest.clone(),
        Expr::load(Expr::var(&p), Expr::idx(Idx::ONE)),
        Expr::let_(
            d.param.clone(),
            Expr::load(Expr::var(&p), Expr::idx(Idx::TWO)),
            Expr::let_(
                dst,
                Expr::load(Expr::var(&dest), Expr::idx(Idx::ONE)),
                Expr::let_(
                    idx,
                    Expr::load(Expr::var(&dest), Expr::idx(Idx::TWO)),
                    body_dps,
                ),
            ),
        ),
    );
    Ok(Def {
        param: p,
        body,
        annotated_tmc: false,
    })
}

/// Transforms a whole program: every source function gets its direct
/// transform, every opted-in function additionally gets a DPS variant.
pub fn transform_program(p: &Program, opts: TransformOptions) -> Result<Program, AmbiguityError> {
    transform_program_report(p, opts).map(|(p, _)| p)
}

pub fn transform_program_report(
    p: &Program,
    opts: TransformOptions,
) -> Result<(Program, Vec<String>), AmbiguityError> {
    let mut names = NameGen::for_program(p);
    let xi = plan_renaming_with(p, &mut names);
    let mut warnings = Vec::new();
    let mut out = Program::new(p.ints_enabled);
    for (f, def) in p.iter() {
        let mut cx = Cx {
            names: &mut names,
            warnings: &mut warnings,
            opts,
        };
        let choice = analyze_in(&def.body, &xi, &mut cx)?;
        out.insert(
            f,
            Def {
                param: def.param.clone(),
                body: choice.direct,
                annotated_tmc: false,
            },
        )
        .expect("unique");
        if let Some(f_dps) = xi.get(f) {
            let mut cx = Cx {
                names: &mut names,
                warnings: &mut warnings,
                opts,
            };
            let dps_def = transform_dps_def_in(def, &xi, &mut cx)?;
            out.insert(f_dps, dps_def).expect("fresh dps name");
        }
    }
    Ok((out, warnings))
}

/// Context classes for call sites: only tail frames crossed, tail plus at
/// least one constructor frame, or anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextClass {
    Tail,
    TmcOnly,
    Neither,
}

#[derive(Debug, Clone)]
pub struct CallSite {
    /// Callee name for direct calls to a function pointer.
    pub callee: Option<String>,
    pub printed: String,
    pub class: ContextClass,
}

pub fn classify_contexts(e: &Expr) -> Vec<CallSite> {
    #[derive(Clone, Copy, PartialEq)]
    enum St {
        Tail,
        Tmc,
        Neither,
    }
    fn cross_cons(s: St) -> St {
        match s {
            St::Tail | St::Tmc => St::Tmc,
            St::Neither => St::Neither,
        }
    }
    fn go(e: &Expr, st: St, out: &mut Vec<CallSite>) {
        match e {
            Expr::Val(_) | Expr::Var(_) => {}
            Expr::Annotated(inner, _) => go(inner, st, out),
            Expr::Call(f, a) => {
                let callee = match &**f {
                    Expr::Val(Val::Fnptr(n)) => Some(n.clone()),
                    _ => None,
                };
                out.push(CallSite {
                    callee,
                    printed: describe_call(e),
                    class: match st {
                        St::Tail => ContextClass::Tail,
                        St::Tmc => ContextClass::TmcOnly,
                        St::Neither => ContextClass::Neither,
                    },
                });
                go(f, St::Neither, out);
                go(a, St::Neither, out);
            }
            Expr::Let(_, e1, e2) => {
                go(e1, St::Neither, out);
                go(e2, st, out); // tail frame
            }
            Expr::If(e0, e1, e2) => {
                go(e0, St::Neither, out);
                go(e1, st, out); // tail frames
                go(e2, st, out);
            }
            Expr::Block(_, e1, e2) | Expr::BlockDet(_, e1, e2) => {
                go(e1, cross_cons(st), out); // constructor frames
                go(e2, cross_cons(st), out);
            }
            Expr::Eq(e1, e2) | Expr::Load(e1, e2) | Expr::BinOp(_, e1, e2) => {
                go(e1, St::Neither, out);
                go(e2, St::Neither, out);
            }
            Expr::Store(e1, e2, e3) => {
                go(e1, St::Neither, out);
                go(e2, St::Neither, out);
                go(e3, St::Neither, out);
            }
        }
    }
    let mut out = Vec::new();
    go(e, St::Tail, &mut out);
    out
}
