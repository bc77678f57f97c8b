//! Substitution and alpha-renaming.

use super::ast::*;

/// `e[x \ v]`: replaces free occurrences of `x` with the closed value `v`.
/// Values are closed, so no capture is possible; binders shadowing `x`
/// simply stop the walk.
pub fn subst(e: &Expr, x: &str, v: &Val) -> Expr {
    match e {
        Expr::Val(_) => e.clone(),
        Expr::Var(y) => {
            if y == x {
                Expr::Val(v.clone())
            } else {
                e.clone()
            }
        }
        Expr::Let(y, e1, e2) => {
            let e1 = subst(e1, x, v);
            let e2 = if y == x { (**e2).clone() } else { subst(e2, x, v) };
            Expr::let_(y.clone(), e1, e2)
        }
        Expr::Call(a, b) => Expr::call(subst(a, x, v), subst(b, x, v)),
        Expr::Eq(a, b) => Expr::eq(subst(a, x, v), subst(b, x, v)),
        Expr::If(a, b, c) => Expr::if_(subst(a, x, v), subst(b, x, v), subst(c, x, v)),
        Expr::Block(t, a, b) => Expr::block(t.clone(), subst(a, x, v), subst(b, x, v)),
        Expr::BlockDet(t, a, b) => Expr::block_det(t.clone(), subst(a, x, v), subst(b, x, v)),
        Expr::Load(a, b) => Expr::load(subst(a, x, v), subst(b, x, v)),
        Expr::Store(a, b, c) => Expr::store(subst(a, x, v), subst(b, x, v), subst(c, x, v)),
        Expr::BinOp(op, a, b) => Expr::binop(*op, subst(a, x, v), subst(b, x, v)),
        Expr::Annotated(a, ann) => Expr::annotated(subst(a, x, v), *ann),
    }
}

/// Renames every binder in `e` to a fresh name, leaving free variables
/// untouched. Used when splicing a function body into a new scope.
pub fn alpha_rename(e: &Expr, names: &mut NameGen) -> Expr {
    fn go(e: &Expr, env: &mut Vec<(String, String)>, names: &mut NameGen) -> Expr {
        match e {
            Expr::Val(_) => e.clone(),
            Expr::Var(x) => {
                let name = env
                    .iter()
                    .rev()
                    .find(|(from, _)| from == x)
                    .map(|(_, to)| to.clone())
                    .unwrap_or_else(|| x.clone());
                Expr::Var(name)
            }
            Expr::Let(x, e1, e2) => {
                let e1 = go(e1, env, names);
                let fresh = names.fresh(strip_suffix(x));
                env.push((x.clone(), fresh.clone()));
                let e2 = go(e2, env, names);
                env.pop();
                Expr::let_(fresh, e1, e2)
            }
            Expr::Call(a, b) => Expr::call(go(a, env, names), go(b, env, names)),
            Expr::Eq(a, b) => Expr::eq(go(a, env, names), go(b, env, names)),
            Expr::If(a, b, c) => {
                Expr::if_(go(a, env, names), go(b, env, names), go(c, env, names))
            }
            Expr::Block(t, a, b) => Expr::block(t.clone(), go(a, env, names), go(b, env, names)),
            Expr::BlockDet(t, a, b) => {
                Expr::block_det(t.clone(), go(a, env, names), go(b, env, names))
            }
            Expr::Load(a, b) => Expr::load(go(a, env, names), go(b, env, names)),
            Expr::Store(a, b, c) => {
                Expr::store(go(a, env, names), go(b, env, names), go(c, env, names))
            }
            Expr::BinOp(op, a, b) => Expr::binop(*op, go(a, env, names), go(b, env, names)),
            Expr::Annotated(a, ann) => Expr::annotated(go(a, env, names), *ann),
        }
    }
    go(e, &mut Vec::new(), names)
}

/// Substitutes a variable for the binder of a def body without renaming:
/// used by alpha_rename callers that first bind the parameter.
pub fn rename_var(e: &Expr, from: &str, to: &str) -> Expr {
    fn go(e: &Expr, from: &str, to: &str) -> Expr {
        match e {
            Expr::Var(x) if x == from => Expr::var(to),
            Expr::Let(x, e1, e2) if x == from => {
                Expr::let_(x.clone(), go(e1, from, to), (**e2).clone())
            }
            Expr::Val(_) | Expr::Var(_) => e.clone(),
            Expr::Let(x, e1, e2) => Expr::let_(x.clone(), go(e1, from, to), go(e2, from, to)),
            Expr::Call(a, b) => Expr::call(go(a, from, to), go(b, from, to)),
            Expr::Eq(a, b) => Expr::eq(go(a, from, to), go(b, from, to)),
            Expr::If(a, b, c) => {
                Expr::if_(go(a, from, to), go(b, from, to), go(c, from, to))
            }
            Expr::Block(t, a, b) => Expr::block(t.clone(), go(a, from, to), go(b, from, to)),
            Expr::BlockDet(t, a, b) => {
                Expr::block_det(t.clone(), go(a, from, to), go(b, from, to))
            }
            Expr::Load(a, b) => Expr::load(go(a, from, to), go(b, from, to)),
            Expr::Store(a, b, c) => {
                Expr::store(go(a, from, to), go(b, from, to), go(c, from, to))
            }
            Expr::BinOp(op, a, b) => Expr::binop(*op, go(a, from, to), go(b, from, to)),
            Expr::Annotated(a, ann) => Expr::annotated(go(a, from, to), *ann),
        }
    }
    go(e, from, to)
}

fn strip_suffix(x: &str) -> &str {
    x.split('%').next().unwrap_or(x)
}
