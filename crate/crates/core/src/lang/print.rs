//! Pretty-printer, inverse of the parser: `parse(print(p))` is structurally
//! `p` for any program built from parsed source (binders are printed
//! verbatim, so no alpha-equivalence is needed).

use super::ast::*;

// Precedence levels, loosest to tightest; mirrors the parser.
const P_EXPR: u8 = 0;
const P_STORE: u8 = 1;
const P_EQ: u8 = 2;
const P_CONS: u8 = 3;
const P_ADD: u8 = 4;
const P_MUL: u8 = 5;
const P_POST: u8 = 6;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (name, def) in p.iter() {
        if def.annotated_tmc {
            out.push_str("@tmc ");
        }
        out.push_str(&format!("fun {name} {} =\n  ", def.param));
        let mut body = String::new();
        print_prec(&def.body, P_EXPR, 1, &mut body);
        out.push_str(&body);
        out.push_str("\n\n");
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    print_prec(e, P_EXPR, 0, &mut s);
    s
}

pub fn print_val(v: &Val) -> String {
    let mut s = String::new();
    val(v, &mut s);
    s
}

fn val(v: &Val, out: &mut String) {
    match v {
        Val::Unit => out.push_str("()"),
        Val::Idx(i) => out.push_str(&i.to_string()),
        Val::Tag(t) => {
            out.push('#');
            out.push_str(t);
        }
        Val::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        // Not parseable; locations never occur in printable programs, only
        // in traces and diagnostics.
        Val::Loc(l) => out.push_str(&format!("<loc {l}>")),
        Val::Fnptr(f) => {
            out.push('&');
            out.push_str(f);
        }
        Val::Int(n) => out.push_str(&n.to_string()),
    }
}

fn indent(n: usize, out: &mut String) {
    out.push('\n');
    for _ in 0..n {
        out.push_str("  ");
    }
}

fn print_prec(e: &Expr, want: u8, ind: usize, out: &mut String) {
    let prec = level(e);
    let parens = prec < want;
    if parens {
        out.push('(');
    }
    match e {
        Expr::Val(v) => val(v, out),
        Expr::Var(x) => out.push_str(x),
        Expr::Let(x, e1, e2) => {
            out.push_str("let ");
            out.push_str(x);
            out.push_str(" = ");
            print_prec(e1, P_STORE, ind, out);
            out.push_str(" in");
            indent(ind, out);
            print_prec(e2, P_EXPR, ind, out);
        }
        Expr::Call(f, a) => {
            // `@f(...)` for direct calls, `e(...)` otherwise
            if let Expr::Val(Val::Fnptr(name)) = &**f {
                out.push('@');
                out.push_str(name);
            } else {
                print_prec(f, P_POST, ind, out);
            }
            out.push('(');
            // call args mirror the pair form `f(a, b)`
            if let Expr::Block(t, a1, a2) = &**a {
                if t == TAG_PAIR {
                    print_prec(a1, P_EXPR, ind, out);
                    out.push_str(", ");
                    print_prec(a2, P_EXPR, ind, out);
                    out.push(')');
                    if parens {
                        out.push(')');
                    }
                    return;
                }
            }
            print_prec(a, P_EXPR, ind, out);
            out.push(')');
        }
        Expr::Eq(a, b) => {
            print_prec(a, P_CONS, ind, out);
            out.push_str(" == ");
            print_prec(b, P_CONS, ind, out);
        }
        Expr::If(c, t, f) => {
            out.push_str("if ");
            print_prec(c, P_STORE, ind, out);
            out.push_str(" then");
            indent(ind + 1, out);
            print_prec(t, P_EXPR, ind + 1, out);
            indent(ind, out);
            out.push_str("else");
            indent(ind + 1, out);
            print_prec(f, P_EXPR, ind + 1, out);
        }
        Expr::Block(t, a, b) if t == TAG_PAIR => {
            out.push('(');
            print_prec(a, P_EXPR, ind, out);
            out.push_str(", ");
            print_prec(b, P_EXPR, ind, out);
            out.push(')');
        }
        Expr::Block(t, a, b) if t == TAG_CONS => {
            print_prec(a, P_ADD, ind, out);
            out.push_str(" :: ");
            print_prec(b, P_CONS, ind, out);
        }
        Expr::Block(t, a, b) => {
            out.push_str("block #");
            out.push_str(t);
            out.push_str(" (");
            print_prec(a, P_EXPR, ind, out);
            out.push_str(", ");
            print_prec(b, P_EXPR, ind, out);
            out.push(')');
        }
        Expr::BlockDet(t, a, b) => {
            out.push_str("blockdet #");
            out.push_str(t);
            out.push_str(" (");
            print_prec(a, P_EXPR, ind, out);
            out.push_str(", ");
            print_prec(b, P_EXPR, ind, out);
            out.push(')');
        }
        Expr::Load(a, i) => {
            print_prec(a, P_POST, ind, out);
            out.push_str(".[");
            print_prec(i, P_EXPR, ind, out);
            out.push(']');
        }
        Expr::Store(a, i, v) => {
            print_prec(a, P_POST, ind, out);
            out.push_str(".[");
            print_prec(i, P_EXPR, ind, out);
            out.push_str("] <- ");
            print_prec(v, P_STORE, ind, out);
        }
        Expr::BinOp(op, a, b) => match op {
            BinOp::Add => {
                print_prec(a, P_ADD, ind, out);
                out.push_str(" + ");
                print_prec(b, P_MUL, ind, out);
            }
            BinOp::Mul => {
                print_prec(a, P_MUL, ind, out);
                out.push_str(" * ");
                print_prec(b, P_POST, ind, out);
            }
        },
        Expr::Annotated(inner, ann) => {
            print_prec(inner, P_POST, ind, out);
            match ann {
                Annotation::Tailcall(true) => out.push_str(" [@tailcall]"),
                Annotation::Tailcall(false) => out.push_str(" [@tailcall false]"),
                Annotation::Tmc => out.push_str(" [@tmc]"),
            }
        }
    }
    if parens {
        out.push(')');
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Val(_) | Expr::Var(_) | Expr::BlockDet(..) => 7,
        Expr::Block(t, _, _) if t == TAG_PAIR => 7,
        Expr::Block(t, _, _) if t == TAG_CONS => P_CONS,
        Expr::Block(..) => 7,
        Expr::Let(..) | Expr::If(..) => P_EXPR,
        Expr::Store(..) => P_STORE,
        Expr::Eq(..) => P_EQ,
        Expr::BinOp(BinOp::Add, _, _) => P_ADD,
        Expr::BinOp(BinOp::Mul, _, _) => P_MUL,
        Expr::Call(..) | Expr::Load(..) | Expr::Annotated(..) => P_POST,
    }
}
