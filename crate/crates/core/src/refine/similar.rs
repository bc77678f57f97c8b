//! Value similarity between two runs' results.

use crate::lang::{Idx, Loc, Val};
use crate::semantics::{eq_val, Heap};
use std::collections::HashMap;

/// How converged values are related across the two heaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    /// Any two locations are related; primitives must be equal.
    Shallow,
    /// Heap graphs are walked, building an injective location bijection:
    /// two blocks are related iff their tags agree and both fields are
    /// related. Cycle-safe (the pair is inserted before recursing).
    Deep,
}

/// Growing injective partial map from source to target locations.
/// Pairs are only ever inserted, never remapped.
#[derive(Debug, Clone, Default)]
pub struct Bijection {
    fwd: HashMap<Loc, Loc>,
    bwd: HashMap<Loc, Loc>,
}

impl Bijection {
    /// Some(true): already paired. Some(false): conflicts with injectivity.
    /// None: neither side seen yet.
    fn check(&self, s: Loc, t: Loc) -> Option<bool> {
        match (self.fwd.get(&s), self.bwd.get(&t)) {
            (Some(&t2), _) => Some(t2 == t),
            (None, Some(_)) => Some(false),
            (None, None) => None,
        }
    }

    fn insert(&mut self, s: Loc, t: Loc) {
        self.fwd.insert(s, t);
        self.bwd.insert(t, s);
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn get(&self, s: Loc) -> Option<Loc> {
        self.fwd.get(&s).copied()
    }

    pub fn is_injective(&self) -> bool {
        self.fwd.len() == self.bwd.len()
            && self
                .fwd
                .iter()
                .all(|(s, t)| self.bwd.get(t) == Some(s))
    }
}

/// Relates a source value to a target value. In Deep mode the successful
/// comparison also returns the bijection it built.
pub fn similar(
    obs: Observation,
    heap_s: &Heap,
    v_s: &Val,
    heap_t: &Heap,
    v_t: &Val,
) -> (bool, Option<Bijection>) {
    match obs {
        Observation::Shallow => {
            let ok = matches!((v_s, v_t), (Val::Loc(_), Val::Loc(_))) || eq_val(v_s, v_t);
            (ok, None)
        }
        Observation::Deep => {
            let mut bij = Bijection::default();
            // Explicit worklist: list-shaped heaps can be deep.
            let mut work = vec![(v_s.clone(), v_t.clone())];
            while let Some((a, b)) = work.pop() {
                match (&a, &b) {
                    (Val::Loc(ls), Val::Loc(lt)) => match bij.check(*ls, *lt) {
                        Some(true) => continue,
                        Some(false) => return (false, None),
                        None => {
                            if !heap_s.contains(*ls) || !heap_t.contains(*lt) {
                                return (false, None);
                            }
                            bij.insert(*ls, *lt);
                            for i in [Idx::ZERO, Idx::ONE, Idx::TWO] {
                                work.push((
                                    heap_s.load(*ls, i).unwrap().clone(),
                                    heap_t.load(*lt, i).unwrap().clone(),
                                ));
                            }
                        }
                    },
                    _ => {
                        if !eq_val(&a, &b) {
                            return (false, None);
                        }
                    }
                }
            }
            (true, Some(bij))
        }
    }
}
