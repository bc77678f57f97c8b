//! DataLang abstract syntax: values, expressions, definitions, programs.

use std::collections::HashSet;
use std::fmt;

/// Reserved tag used by the pair sugar `(e1, e2)`.
pub const TAG_PAIR: &str = "PAIR";
/// Reserved tag used by the list sugar `e1 :: e2`.
pub const TAG_CONS: &str = "CONS";

/// A block field index: 0 (tag), 1, or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Idx(u8);

impl Idx {
    pub const ZERO: Idx = Idx(0);
    pub const ONE: Idx = Idx(1);
    pub const TWO: Idx = Idx(2);

    pub fn new(i: u8) -> Option<Idx> {
        (i <= 2).then_some(Idx(i))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Idx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Heap location id. Dense, allocated by a per-run counter.
pub type Loc = u64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Val {
    Unit,
    Idx(Idx),
    Tag(String),
    Bool(bool),
    /// Runtime-only; never accepted by source well-formedness.
    Loc(Loc),
    Fnptr(String),
    /// Only with the integer extension enabled.
    Int(i64),
}

impl Val {
    pub fn nil() -> Val {
        // [] := ()
        Val::Unit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Mul,
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinOp::Add => write!(f, "+"),
            BinOp::Mul => write!(f, "*"),
        }
    }
}

/// Call-site annotation. `Tmc` only ever decorates definitions and is folded
/// into [`Def::annotated_tmc`] by the parser; `Tailcall` survives on calls
/// until the transformation planning phase consumes and erases it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Annotation {
    Tmc,
    Tailcall(bool),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Val(Val),
    Var(String),
    Let(String, Box<Expr>, Box<Expr>),
    Call(Box<Expr>, Box<Expr>),
    Eq(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Block(String, Box<Expr>, Box<Expr>),
    /// Deterministic block; arises only at runtime, forbidden in source.
    BlockDet(String, Box<Expr>, Box<Expr>),
    Load(Box<Expr>, Box<Expr>),
    Store(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Integer extension only.
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    /// Wraps only `Call` nodes in well-formed source.
    Annotated(Box<Expr>, Annotation),
}

impl Expr {
    pub fn unit() -> Expr {
        Expr::Val(Val::Unit)
    }

    pub fn nil() -> Expr {
        Expr::Val(Val::nil())
    }

    /// The hole `_?` of a partially initialized block, encoded as unit.
    pub fn hole() -> Expr {
        Expr::Val(Val::Unit)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Val(Val::Bool(b))
    }

    pub fn idx(i: Idx) -> Expr {
        Expr::Val(Val::Idx(i))
    }

    pub fn int(n: i64) -> Expr {
        Expr::Val(Val::Int(n))
    }

    pub fn fnptr(name: impl Into<String>) -> Expr {
        Expr::Val(Val::Fnptr(name.into()))
    }

    pub fn let_(x: impl Into<String>, e1: Expr, e2: Expr) -> Expr {
        Expr::Let(x.into(), Box::new(e1), Box::new(e2))
    }

    pub fn call(f: Expr, a: Expr) -> Expr {
        Expr::Call(Box::new(f), Box::new(a))
    }

    /// Call of a toplevel function by name.
    pub fn call_fn(f: impl Into<String>, a: Expr) -> Expr {
        Expr::call(Expr::fnptr(f), a)
    }

    pub fn eq(e1: Expr, e2: Expr) -> Expr {
        Expr::Eq(Box::new(e1), Box::new(e2))
    }

    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn block(tag: impl Into<String>, e1: Expr, e2: Expr) -> Expr {
        Expr::Block(tag.into(), Box::new(e1), Box::new(e2))
    }

    pub fn block_det(tag: impl Into<String>, e1: Expr, e2: Expr) -> Expr {
        Expr::BlockDet(tag.into(), Box::new(e1), Box::new(e2))
    }

    pub fn pair(e1: Expr, e2: Expr) -> Expr {
        Expr::block(TAG_PAIR, e1, e2)
    }

    pub fn cons(e1: Expr, e2: Expr) -> Expr {
        Expr::block(TAG_CONS, e1, e2)
    }

    pub fn load(e1: Expr, e2: Expr) -> Expr {
        Expr::Load(Box::new(e1), Box::new(e2))
    }

    pub fn store(e1: Expr, e2: Expr, e3: Expr) -> Expr {
        Expr::Store(Box::new(e1), Box::new(e2), Box::new(e3))
    }

    pub fn binop(op: BinOp, e1: Expr, e2: Expr) -> Expr {
        Expr::BinOp(op, Box::new(e1), Box::new(e2))
    }

    pub fn annotated(e: Expr, a: Annotation) -> Expr {
        Expr::Annotated(Box::new(e), a)
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Expr::Val(_))
    }

    pub fn as_value(&self) -> Option<&Val> {
        match self {
            Expr::Val(v) => Some(v),
            _ => None,
        }
    }

    /// Number of AST nodes, counting values and variables as one each.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Preorder traversal over all subexpressions, including `self`.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Val(_) | Expr::Var(_) => {}
            Expr::Let(_, a, b)
            | Expr::Call(a, b)
            | Expr::Eq(a, b)
            | Expr::Block(_, a, b)
            | Expr::BlockDet(_, a, b)
            | Expr::Load(a, b)
            | Expr::BinOp(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::If(a, b, c) | Expr::Store(a, b, c) => {
                a.visit(f);
                b.visit(f);
                c.visit(f);
            }
            Expr::Annotated(a, _) => a.visit(f),
        }
    }

    /// Free variables of the expression.
    pub fn free_vars(&self) -> HashSet<String> {
        let mut acc = HashSet::new();
        self.collect_free(&mut Vec::new(), &mut acc);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<String>, acc: &mut HashSet<String>) {
        match self {
            Expr::Val(_) => {}
            Expr::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    acc.insert(x.clone());
                }
            }
            Expr::Let(x, e1, e2) => {
                e1.collect_free(bound, acc);
                bound.push(x.clone());
                e2.collect_free(bound, acc);
                bound.pop();
            }
            Expr::Call(a, b)
            | Expr::Eq(a, b)
            | Expr::Block(_, a, b)
            | Expr::BlockDet(_, a, b)
            | Expr::Load(a, b)
            | Expr::BinOp(_, a, b) => {
                a.collect_free(bound, acc);
                b.collect_free(bound, acc);
            }
            Expr::If(a, b, c) | Expr::Store(a, b, c) => {
                a.collect_free(bound, acc);
                b.collect_free(bound, acc);
                c.collect_free(bound, acc);
            }
            Expr::Annotated(a, _) => a.collect_free(bound, acc),
        }
    }

    /// Strips all annotation nodes, leaving the underlying expressions.
    pub fn erase_annotations(&self) -> Expr {
        match self {
            Expr::Val(_) | Expr::Var(_) => self.clone(),
            Expr::Let(x, a, b) => {
                Expr::let_(x.clone(), a.erase_annotations(), b.erase_annotations())
            }
            Expr::Call(a, b) => Expr::call(a.erase_annotations(), b.erase_annotations()),
            Expr::Eq(a, b) => Expr::eq(a.erase_annotations(), b.erase_annotations()),
            Expr::If(a, b, c) => Expr::if_(
                a.erase_annotations(),
                b.erase_annotations(),
                c.erase_annotations(),
            ),
            Expr::Block(t, a, b) => {
                Expr::block(t.clone(), a.erase_annotations(), b.erase_annotations())
            }
            Expr::BlockDet(t, a, b) => {
                Expr::block_det(t.clone(), a.erase_annotations(), b.erase_annotations())
            }
            Expr::Load(a, b) => Expr::load(a.erase_annotations(), b.erase_annotations()),
            Expr::Store(a, b, c) => Expr::store(
                a.erase_annotations(),
                b.erase_annotations(),
                c.erase_annotations(),
            ),
            Expr::BinOp(op, a, b) => Expr::binop(*op, a.erase_annotations(), b.erase_annotations()),
            Expr::Annotated(a, _) => a.erase_annotations(),
        }
    }
}

/// A toplevel definition `rec λ x = e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Def {
    pub param: String,
    pub body: Expr,
    pub annotated_tmc: bool,
}

/// A program: a finite map from function names to definitions.
///
/// Definition order is preserved so that printing is stable.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    defs: Vec<(String, Def)>,
    /// Integer extension flag; gates `Int` values and `+`/`*`.
    pub ints_enabled: bool,
}

impl Program {
    pub fn new(ints_enabled: bool) -> Program {
        Program {
            defs: Vec::new(),
            ints_enabled,
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, def: Def) -> Result<(), String> {
        let name = name.into();
        if self.get(&name).is_some() {
            return Err(name);
        }
        self.defs.push((name, def));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn remove(&mut self, name: &str) -> Option<Def> {
        let pos = self.defs.iter().position(|(n, _)| n == name)?;
        Some(self.defs.remove(pos).1)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.iter().map(|(n, _)| n.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Def)> {
        self.defs.iter().map(|(n, d)| (n.as_str(), d))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&str, &mut Def)> {
        self.defs.iter_mut().map(|(n, d)| (n.as_str(), d))
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn erase_annotations(&self) -> Program {
        let mut p = Program::new(self.ints_enabled);
        for (n, d) in self.iter() {
            p.defs.push((
                n.to_string(),
                Def {
                    param: d.param.clone(),
                    body: d.body.erase_annotations(),
                    annotated_tmc: false,
                },
            ));
        }
        p
    }

    /// Total AST node count over all definition bodies.
    pub fn size(&self) -> usize {
        self.defs.iter().map(|(_, d)| d.body.size()).sum()
    }
}

/// Fresh-name supply. Generated names carry a `%N` suffix and are checked
/// against every name already present in the program of interest.
#[derive(Debug, Clone, Default)]
pub struct NameGen {
    counter: u64,
    used: HashSet<String>,
}

impl NameGen {
    pub fn new() -> NameGen {
        NameGen::default()
    }

    /// A supply that will not collide with any name occurring in `p`,
    /// including binders and function names.
    pub fn for_program(p: &Program) -> NameGen {
        let mut used = HashSet::new();
        for (name, def) in p.iter() {
            used.insert(name.to_string());
            used.insert(def.param.clone());
            def.body.visit(&mut |e| match e {
                Expr::Var(x) => {
                    used.insert(x.clone());
                }
                Expr::Let(x, _, _) => {
                    used.insert(x.clone());
                }
                Expr::Val(Val::Fnptr(f)) => {
                    used.insert(f.clone());
                }
                _ => {}
            });
        }
        NameGen { counter: 0, used }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        loop {
            let candidate = format!("{base}%{}", self.counter);
            self.counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    /// Fresh toplevel function name: `<base>.dps`, counter-suffixed on collision.
    pub fn fresh_fn(&mut self, base: &str, suffix: &str) -> String {
        let plain = format!("{base}.{suffix}");
        if self.used.insert(plain.clone()) {
            return plain;
        }
        loop {
            let candidate = format!("{base}.{suffix}%{}", self.counter);
            self.counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}
