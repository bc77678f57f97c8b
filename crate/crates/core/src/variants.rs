//! Two further transformations validated by the same refinement harness:
//! bounded recursive inlining, and accumulator-passing style (APS) over
//! the integer extension.
//!
//! APS mirrors the TMC pipeline with arithmetic accumulating contexts
//! `e + □` in place of constructor frames: an opted-in function `f` gains
//! an `f.aps` variant taking the pair-encoded `(acc, x)` and satisfying
//! `@f.aps((acc, v)) = acc + @f(v)` whenever the source result is an
//! integer. With the affine flag, `e × □` frames are absorbed too and the
//! accumulator becomes the pair `(a, b)` representing `a + b·□`.

use crate::lang::*;
use crate::tmc::AmbiguityError;
use std::collections::BTreeMap;
use std::collections::HashSet;

#[derive(Debug, Clone)]
pub struct InlinePolicy {
    pub max_depth: usize,
    pub target_fns: HashSet<String>,
}

impl InlinePolicy {
    pub fn all(p: &Program, max_depth: usize) -> InlinePolicy {
        InlinePolicy {
            max_depth,
            target_fns: p.names().map(str::to_string).collect(),
        }
    }
}

/// Rewrites `@f(a)` into `let x = a in <f's body>` for targeted `f`,
/// recursively up to the depth bound. Only direct calls to function
/// pointers are inlined (the language is first-order).
pub fn inline_transform(p: &Program, policy: &InlinePolicy) -> Program {
    let mut names = NameGen::for_program(p);
    let mut out = Program::new(p.ints_enabled);
    for (f, def) in p.iter() {
        let body = inline_expr(&def.body, p, policy, policy.max_depth, &mut names);
        out.insert(
            f,
            Def {
                param: def.param.clone(),
                body,
                annotated_tmc: def.annotated_tmc,
            },
        )
        .expect("unique");
    }
    out
}

fn inline_expr(
    e: &Expr,
    p: &Program,
    policy: &InlinePolicy,
    depth: usize,
    names: &mut NameGen,
) -> Expr {
    let rec = |e: &Expr, names: &mut NameGen| inline_expr(e, p, policy, depth, names);
    match e {
        Expr::Call(f, a) => {
            let a2 = rec(a, names);
            if depth > 0 {
                if let Expr::Val(Val::Fnptr(name)) = &**f {
                    if policy.target_fns.contains(name) {
                        if let Some(def) = p.get(name) {
                            // inline the callee at reduced depth, freshen
                            // its binders, bind the argument
                            let body = inline_expr(&def.body, p, policy, depth - 1, names);
                            let body = alpha_rename(&body, names);
                            let x = names.fresh(&def.param);
                            let body = rename_var(&body, &def.param, &x);
                            return Expr::let_(x, a2, body);
                        }
                    }
                }
            }
            Expr::call(rec(f, names), a2)
        }
        Expr::Val(_) | Expr::Var(_) => e.clone(),
        Expr::Let(x, e1, e2) => Expr::let_(x.clone(), rec(e1, names), rec(e2, names)),
        Expr::Eq(a, b) => Expr::eq(rec(a, names), rec(b, names)),
        Expr::If(a, b, c) => Expr::if_(rec(a, names), rec(b, names), rec(c, names)),
        Expr::Block(t, a, b) => Expr::block(t.clone(), rec(a, names), rec(b, names)),
        Expr::BlockDet(t, a, b) => Expr::block_det(t.clone(), rec(a, names), rec(b, names)),
        Expr::Load(a, b) => Expr::load(rec(a, names), rec(b, names)),
        Expr::Store(a, b, c) => Expr::store(rec(a, names), rec(b, names), rec(c, names)),
        Expr::BinOp(op, a, b) => Expr::binop(*op, rec(a, names), rec(b, names)),
        Expr::Annotated(a, ann) => Expr::annotated(rec(a, names), *ann),
    }
}

/// f ↦ f.aps, same shape constraints as the TMC renaming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApsRenaming {
    map: BTreeMap<String, String>,
}

impl ApsRenaming {
    pub fn get(&self, f: &str) -> Option<&str> {
        self.map.get(f).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ApsOptions {
    /// Absorb `e × □` frames as well, switching the accumulator to the
    /// affine pair `(a, b)`.
    pub affine: bool,
}

pub fn plan_aps_renaming(p: &Program) -> ApsRenaming {
    let mut names = NameGen::for_program(p);
    let mut r = ApsRenaming::default();
    for (f, def) in p.iter() {
        if def.annotated_tmc {
            r.map.insert(f.to_string(), names.fresh_fn(f, "aps"));
        }
    }
    r
}

struct ApsChoice {
    direct: Expr,
    benefits: bool,
    request: bool,
    calls: Vec<String>,
    plan: ApsPlan,
}

enum ApsPlan {
    Base,
    Call {
        f_aps: String,
        arg: Expr,
    },
    Let {
        x: String,
        bound: Expr,
        body: Box<ApsChoice>,
    },
    If {
        cond: Expr,
        then_: Box<ApsChoice>,
        else_: Box<ApsChoice>,
    },
    /// `other + □` (either operand order; integer addition commutes).
    Add {
        other: Expr,
        inner: Box<ApsChoice>,
    },
    /// `other × □`, affine mode only.
    Mul {
        other: Expr,
        inner: Box<ApsChoice>,
    },
}

fn aps_base(direct: Expr) -> ApsChoice {
    ApsChoice {
        direct,
        benefits: false,
        request: false,
        calls: Vec::new(),
        plan: ApsPlan::Base,
    }
}

fn is_operand_safe(e: &Expr) -> bool {
    // Folding the sibling operand into the accumulator evaluates it before
    // the call instead of after; only values and variables are reordered
    // safely.
    matches!(e, Expr::Val(_) | Expr::Var(_))
}

fn aps_analyze(
    e: &Expr,
    xi: &ApsRenaming,
    opts: ApsOptions,
    warnings: &mut Vec<String>,
) -> Result<ApsChoice, AmbiguityError> {
    Ok(match e {
        Expr::Val(_) | Expr::Var(_) => aps_base(e.clone()),
        Expr::Annotated(inner, ann) => {
            let c = aps_analyze(inner, xi, opts, warnings)?;
            match ann {
                Annotation::Tailcall(false) => aps_base(c.direct),
                Annotation::Tailcall(true) if c.benefits => ApsChoice { request: true, ..c },
                _ => c,
            }
        }
        Expr::Call(f, a) => {
            let ca = aps_analyze(a, xi, opts, warnings)?;
            let direct = Expr::call((**f).erase_annotations(), ca.direct.clone());
            if let Expr::Val(Val::Fnptr(name)) = &**f {
                if let Some(f_aps) = xi.get(name) {
                    return Ok(ApsChoice {
                        calls: vec![print_expr(&direct).replace('\n', " ")],
                        plan: ApsPlan::Call {
                            f_aps: f_aps.to_string(),
                            arg: ca.direct,
                        },
                        direct,
                        benefits: true,
                        request: false,
                    });
                }
            }
            aps_base(direct)
        }
        Expr::Let(x, e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            let direct = Expr::let_(x.clone(), c1.direct.clone(), c2.direct.clone());
            if c2.benefits {
                ApsChoice {
                    direct,
                    benefits: true,
                    request: c2.request,
                    calls: c2.calls.clone(),
                    plan: ApsPlan::Let {
                        x: x.clone(),
                        bound: c1.direct,
                        body: Box::new(c2),
                    },
                }
            } else {
                aps_base(direct)
            }
        }
        Expr::If(e0, e1, e2) => {
            let c0 = aps_analyze(e0, xi, opts, warnings)?;
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            let direct = Expr::if_(c0.direct.clone(), c1.direct.clone(), c2.direct.clone());
            if c1.benefits || c2.benefits {
                ApsChoice {
                    direct,
                    benefits: true,
                    request: c1.request || c2.request,
                    calls: [c1.calls.clone(), c2.calls.clone()].concat(),
                    plan: ApsPlan::If {
                        cond: c0.direct,
                        then_: Box::new(c1),
                        else_: Box::new(c2),
                    },
                }
            } else {
                aps_base(direct)
            }
        }
        Expr::BinOp(op, e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            let accumulable = matches!(op, BinOp::Add) || (opts.affine && matches!(op, BinOp::Mul));
            let direct = Expr::binop(*op, c1.direct.clone(), c2.direct.clone());
            if !accumulable {
                return Ok(aps_base(direct));
            }
            // Pick the accumulated side like TMC picks a block side.
            let (req1, req2) = (c1.request && c1.benefits, c2.request && c2.benefits);
            let side = match (req1, req2, c1.benefits, c2.benefits) {
                (true, true, _, _) | (false, false, true, true) => {
                    return Err(AmbiguityError {
                        call_sites: [c1.calls, c2.calls].concat(),
                    })
                }
                (true, _, _, _) => Some(1),
                (_, true, _, _) => Some(2),
                (_, _, true, false) => Some(1),
                (_, _, false, true) => Some(2),
                _ => None,
            };
            match side {
                None => aps_base(direct),
                Some(s) => {
                    let (inner, other) = if s == 1 {
                        (c1, c2.direct.clone())
                    } else {
                        (c2, c1.direct.clone())
                    };
                    if !is_operand_safe(&other) {
                        warnings.push(format!(
                            "cannot accumulate across a non-trivial operand: {}",
                            print_expr(&other).replace('\n', " ")
                        ));
                        return Ok(aps_base(direct));
                    }
                    ApsChoice {
                        direct,
                        benefits: true,
                        request: inner.request,
                        calls: inner.calls.clone(),
                        plan: if matches!(op, BinOp::Add) {
                            ApsPlan::Add {
                                other,
                                inner: Box::new(inner),
                            }
                        } else {
                            ApsPlan::Mul {
                                other,
                                inner: Box::new(inner),
                            }
                        },
                    }
                }
            }
        }
        Expr::Eq(e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            aps_base(Expr::eq(c1.direct, c2.direct))
        }
        Expr::Block(t, e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            aps_base(Expr::block(t.clone(), c1.direct, c2.direct))
        }
        Expr::BlockDet(t, e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            aps_base(Expr::block_det(t.clone(), c1.direct, c2.direct))
        }
        Expr::Load(e1, e2) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            aps_base(Expr::load(c1.direct, c2.direct))
        }
        Expr::Store(e1, e2, e3) => {
            let c1 = aps_analyze(e1, xi, opts, warnings)?;
            let c2 = aps_analyze(e2, xi, opts, warnings)?;
            let c3 = aps_analyze(e3, xi, opts, warnings)?;
            aps_base(Expr::store(c1.direct, c2.direct, c3.direct))
        }
    })
}

/// Accumulator representation during emission: a plain integer variable,
/// or the affine pair of variables (a, b) for `a + b·□`.
enum Acc {
    Plain(Expr),
    Affine(Expr, Expr),
}

fn emit_aps(c: &ApsChoice, acc: &Acc, names: &mut NameGen) -> Expr {
    match &c.plan {
        ApsPlan::Base => match acc {
            Acc::Plain(a) => Expr::binop(BinOp::Add, a.clone(), c.direct.clone()),
            Acc::Affine(a, b) => Expr::binop(
                BinOp::Add,
                a.clone(),
                Expr::binop(BinOp::Mul, b.clone(), c.direct.clone()),
            ),
        },
        ApsPlan::Call { f_aps, arg } => {
            let acc_e = match acc {
                Acc::Plain(a) => a.clone(),
                Acc::Affine(a, b) => Expr::pair(a.clone(), b.clone()),
            };
            Expr::call_fn(f_aps.clone(), Expr::pair(acc_e, arg.clone()))
        }
        ApsPlan::Let { x, bound, body } => {
            Expr::let_(x.clone(), bound.clone(), emit_aps(body, acc, names))
        }
        ApsPlan::If { cond, then_, else_ } => Expr::if_(
            cond.clone(),
            emit_aps(then_, acc, names),
            emit_aps(else_, acc, names),
        ),
        ApsPlan::Add { other, inner } => {
            // (acc + (other + □)) folds to ((acc + other) + □)
            let a2 = names.fresh("acc");
            let folded = match acc {
                Acc::Plain(a) => Expr::binop(BinOp::Add, a.clone(), other.clone()),
                Acc::Affine(a, b) => Expr::binop(
                    BinOp::Add,
                    a.clone(),
                    Expr::binop(BinOp::Mul, b.clone(), other.clone()),
                ),
            };
            let new_acc = match acc {
                Acc::Plain(_) => Acc::Plain(Expr::var(&a2)),
                Acc::Affine(_, b) => Acc::Affine(Expr::var(&a2), b.clone()),
            };
            Expr::let_(a2, folded, emit_aps(inner, &new_acc, names))
        }
        ApsPlan::Mul { other, inner } => {
            // (a + b·(other × □)) folds to (a + (b·other)·□)
            let b2 = names.fresh("mul");
            let (a, b) = match acc {
                Acc::Affine(a, b) => (a.clone(), b.clone()),
                Acc::Plain(_) => unreachable!("Mul frames only arise in affine mode"),
            };
            Expr::let_(
                b2.clone(),
                Expr::binop(BinOp::Mul, b, other.clone()),
                emit_aps(inner, &Acc::Affine(a, Expr::var(&b2)), names),
            )
        }
    }
}

/// The direct transform: congruence everywhere, except that a resolved
/// accumulating frame becomes a direct call into the APS variant with the
/// folded initial accumulator, making the direct version tail-recursive
/// too.
fn emit_aps_direct(c: &ApsChoice, opts: ApsOptions, names: &mut NameGen) -> Expr {
    match &c.plan {
        ApsPlan::Base | ApsPlan::Call { .. } => c.direct.clone(),
        ApsPlan::Let { x, bound, body } => Expr::let_(
            x.clone(),
            bound.clone(),
            emit_aps_direct(body, opts, names),
        ),
        ApsPlan::If { cond, then_, else_ } => Expr::if_(
            cond.clone(),
            emit_aps_direct(then_, opts, names),
            emit_aps_direct(else_, opts, names),
        ),
        ApsPlan::Add { other, inner } => {
            let acc = if opts.affine {
                Acc::Affine(other.clone(), Expr::int(1))
            } else {
                Acc::Plain(other.clone())
            };
            emit_aps(inner, &acc, names)
        }
        ApsPlan::Mul { other, inner } => {
            emit_aps(inner, &Acc::Affine(Expr::int(0), other.clone()), names)
        }
    }
}

pub fn aps_transform(p: &Program) -> Result<Program, AmbiguityError> {
    aps_transform_with(p, ApsOptions::default()).map(|(p, _)| p)
}

/// Pre: the integer extension is enabled on `p`.
pub fn aps_transform_with(
    p: &Program,
    opts: ApsOptions,
) -> Result<(Program, Vec<String>), AmbiguityError> {
    let mut names = NameGen::for_program(p);
    let xi = plan_aps_renaming(p);
    let mut warnings = Vec::new();
    let mut out = Program::new(p.ints_enabled);
    for (f, def) in p.iter() {
        let choice = aps_analyze(&def.body, &xi, opts, &mut warnings)?;
        let direct_body = emit_aps_direct(&choice, opts, &mut names);
        out.insert(
            f,
            Def {
                param: def.param.clone(),
                body: direct_body,
                annotated_tmc: false,
            },
        )
        .expect("unique");
        if let Some(f_aps) = xi.get(f) {
            let pp = names.fresh("p");
            let acc_v = names.fresh("acc");
            let aps_body = if opts.affine {
                let ab = names.fresh("ab");
                let a = names.fresh("a");
                let b = names.fresh("b");
                let inner = emit_aps(
                    &choice,
                    &Acc::Affine(Expr::var(&a), Expr::var(&b)),
                    &mut names,
                );
                Expr::let_(
                    ab.clone(),
                    Expr::load(Expr::var(&pp), Expr::idx(Idx::ONE)),
                    Expr::let_(
                        def.param.clone(),
                        Expr::load(Expr::var(&pp), Expr::idx(Idx::TWO)),
                        Expr::let_(
                            a,
                            Expr::load(Expr::var(&ab), Expr::idx(Idx::ONE)),
                            Expr::let_(
                                b,
                                Expr::load(Expr::var(&ab), Expr::idx(Idx::TWO)),
                                inner,
                            ),
                        ),
                    ),
                )
            } else {
                let inner = emit_aps(&choice, &Acc::Plain(Expr::var(&acc_v)), &mut names);
                Expr::let_(
                    acc_v,
                    Expr::load(Expr::var(&pp), Expr::idx(Idx::ONE)),
                    Expr::let_(
                        def.param.clone(),
                        Expr::load(Expr::var(&pp), Expr::idx(Idx::TWO)),
                        inner,
                    ),
                )
            };
            out.insert(
                f_aps,
                Def {
                    param: pp,
                    body: aps_body,
                    annotated_tmc: false,
                },
            )
            .expect("fresh aps name");
        }
    }
    Ok((out, warnings))
}
