//! DataLang: abstract syntax, concrete syntax, substitution, and source
//! well-formedness.

pub mod ast;
pub mod parse;
pub mod print;
pub mod subst;
pub mod wf;

pub use ast::{Annotation, BinOp, Def, Expr, Idx, Loc, NameGen, Program, Val, TAG_CONS, TAG_PAIR};
pub use parse::{parse_expr_text, parse_program, parse_program_with, ParseError, ParseOptions};
pub use print::{print_expr, print_program, print_val};
pub use subst::{alpha_rename, rename_var, subst};
pub use wf::{check_wf_arg, check_wf_source, check_wf_value, WfError};
