//! Random program generation inside the TMC fragment.
//!
//! Generated functions take one list argument and recurse structurally on
//! its tail, so runs terminate on finite list inputs. Recursive calls are
//! wrapped in compositions of tail frames (lets, ifs) and constructor
//! frames (blocks), which is exactly the fragment the transformation
//! optimizes. At most one side of any generated block contains calls
//! unless an explicit [@tailcall] is also generated, so transformation
//! never hits an ambiguity.

use crate::lang::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_fns: usize,
    pub max_depth: usize,
    pub tags: Vec<String>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_fns: 3,
            max_depth: 4,
            tags: vec![TAG_CONS.to_string(), "NODE".to_string(), "WRAP".to_string()],
        }
    }
}

pub fn gen_program(seed: u64, cfg: &GenConfig) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_fns = rng.gen_range(1..=cfg.max_fns.max(1));
    let names: Vec<String> = (0..n_fns).map(|i| format!("f{i}")).collect();
    let mut p = Program::new(false);
    for (i, name) in names.iter().enumerate() {
        let mut g = Gen {
            rng: &mut rng,
            cfg,
            fns: &names,
            depth: 0,
            fresh: 0,
        };
        let body = g.fn_body();
        let def = Def {
            param: "xs".to_string(),
            body,
            // at least one function opts in
            annotated_tmc: i == 0 || g.rng.gen_bool(0.5),
        };
        p.insert(name.clone(), def).unwrap();
    }
    p
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    cfg: &'a GenConfig,
    fns: &'a [String],
    depth: usize,
    fresh: u64,
}

impl Gen<'_> {
    fn fresh(&mut self, base: &str) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("{base}{n}")
    }

    fn tag(&mut self) -> String {
        let i = self.rng.gen_range(0..self.cfg.tags.len());
        self.cfg.tags[i].clone()
    }

    /// match xs with [] -> base | h :: t -> step end, desugared.
    fn fn_body(&mut self) -> Expr {
        let base = self.value_expr(&[]);
        let step = self.rec_expr("h", "t");
        Expr::if_(
            Expr::eq(Expr::var("xs"), Expr::nil()),
            base,
            Expr::let_(
                "h",
                Expr::load(Expr::var("xs"), Expr::idx(Idx::ONE)),
                Expr::let_(
                    "t",
                    Expr::load(Expr::var("xs"), Expr::idx(Idx::TWO)),
                    step,
                ),
            ),
        )
    }

    /// An expression containing (usually) one recursive call on `t`,
    /// wrapped in tail and constructor frames.
    fn rec_expr(&mut self, h: &str, t: &str) -> Expr {
        if self.depth >= self.cfg.max_depth {
            return self.rec_call(t);
        }
        self.depth += 1;
        let e = match self.rng.gen_range(0..10) {
            // constructor frame, call on a random side, other side call-free
            0..=3 => {
                let side2 = self.rng.gen_bool(0.7);
                let tag = self.tag();
                let other = self.value_expr(&[h, t]);
                let call = self.rec_expr(h, t);
                if side2 {
                    Expr::block(tag, other, call)
                } else {
                    Expr::block(tag, call, other)
                }
            }
            // both sides call; one annotated to keep transforms unambiguous
            4 => {
                let tag = self.tag();
                let left = self.rec_call(t);
                let right = Expr::annotated(self.rec_call(t), Annotation::Tailcall(true));
                Expr::block(tag, left, right)
            }
            // tail frame: let binding a call-free expression
            5 | 6 => {
                let x = self.fresh("v");
                let bound = self.value_expr(&[h, t]);
                let body = self.rec_expr(h, t);
                Expr::let_(x, bound, body)
            }
            // tail frame: if with calls in both branches
            7 => {
                let cond = Expr::eq(Expr::var(h), self.scalar());
                let then_b = self.rec_expr(h, t);
                let else_b = self.rec_expr(h, t);
                Expr::if_(cond, then_b, else_b)
            }
            // a non-tail call bound by a let, then a recursive tail
            8 => {
                let x = self.fresh("r");
                let inner = self.rec_call(t);
                let body = self.rec_expr(h, t);
                Expr::let_(x, inner, body)
            }
            // plain recursive call
            _ => self.rec_call(t),
        };
        self.depth -= 1;
        e
    }

    fn rec_call(&mut self, t: &str) -> Expr {
        let i = self.rng.gen_range(0..self.fns.len());
        Expr::call_fn(self.fns[i].clone(), Expr::var(t))
    }

    /// Call-free expression over the given variables.
    fn value_expr(&mut self, vars: &[&str]) -> Expr {
        match self.rng.gen_range(0..8) {
            0 => Expr::unit(),
            1 => Expr::bool(self.rng.gen()),
            2 => Expr::Val(Val::Tag(self.tag())),
            3 if !vars.is_empty() => {
                let i = self.rng.gen_range(0..vars.len());
                Expr::var(vars[i])
            }
            4 => {
                let a = self.scalar();
                let b = self.scalar();
                Expr::block(self.tag(), a, b)
            }
            5 if !vars.is_empty() => {
                let i = self.rng.gen_range(0..vars.len());
                Expr::cons(Expr::var(vars[i]), Expr::nil())
            }
            6 => Expr::eq(self.scalar(), self.scalar()),
            _ => self.scalar(),
        }
    }

    fn scalar(&mut self) -> Expr {
        match self.rng.gen_range(0..4) {
            0 => Expr::unit(),
            1 => Expr::bool(self.rng.gen()),
            2 => Expr::Val(Val::Tag(self.tag())),
            _ => Expr::idx(Idx::new(self.rng.gen_range(0..3)).unwrap()),
        }
    }
}
