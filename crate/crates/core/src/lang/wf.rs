//! Source well-formedness: no locations, no deterministic blocks, every
//! function pointer defined, every body closed under its parameter.

use super::ast::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WfError {
    #[error("{fn_name}: location value in source")]
    LocInSource { fn_name: String },
    #[error("{fn_name}: deterministic block in source")]
    DetBlockInSource { fn_name: String },
    #[error("{fn_name}: undefined function {name}")]
    UndefinedFunction { fn_name: String, name: String },
    #[error("{fn_name}: unbound variable {name}")]
    UnboundVariable { fn_name: String, name: String },
}

pub fn check_wf_source(p: &Program) -> Result<(), Vec<WfError>> {
    let mut errs = Vec::new();
    for (fn_name, def) in p.iter() {
        def.body.visit(&mut |e| match e {
            Expr::Val(Val::Loc(_)) => errs.push(WfError::LocInSource {
                fn_name: fn_name.to_string(),
            }),
            Expr::Val(Val::Fnptr(f)) => {
                if p.get(f).is_none() {
                    errs.push(WfError::UndefinedFunction {
                        fn_name: fn_name.to_string(),
                        name: f.clone(),
                    });
                }
            }
            Expr::BlockDet(..) => errs.push(WfError::DetBlockInSource {
                fn_name: fn_name.to_string(),
            }),
            _ => {}
        });
        for v in def.body.free_vars() {
            if v != def.param {
                errs.push(WfError::UnboundVariable {
                    fn_name: fn_name.to_string(),
                    name: v,
                });
            }
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// Well-formedness of a closed argument value: no locations, and any
/// function pointers name defined functions.
pub fn check_wf_value(p: &Program, v: &Val) -> Result<(), String> {
    match v {
        Val::Loc(l) => Err(format!("argument contains location <loc {l}>")),
        Val::Fnptr(f) if p.get(f).is_none() => {
            Err(format!("argument names undefined function {f}"))
        }
        _ => Ok(()),
    }
}

/// Like [`check_wf_value`] but for a closed argument expression (which may
/// allocate, e.g. a list literal).
pub fn check_wf_arg(p: &Program, e: &Expr) -> Result<(), String> {
    let mut err = None;
    e.visit(&mut |sub| {
        if err.is_some() {
            return;
        }
        match sub {
            Expr::Val(v) => {
                if let Err(m) = check_wf_value(p, v) {
                    err = Some(m);
                }
            }
            Expr::BlockDet(..) => err = Some("argument contains a deterministic block".into()),
            _ => {}
        }
    });
    if let Some(m) = err {
        return Err(m);
    }
    if let Some(v) = e.free_vars().into_iter().next() {
        return Err(format!("argument is not closed: free variable {v}"));
    }
    Ok(())
}
