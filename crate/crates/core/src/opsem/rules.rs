//! Action and empty-move rules, and the per-state execution relation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::can::sync_closure;
use super::inaction::{closure, timer_decrement};
use super::state::State;
use crate::expr::{strip_timers, Expr, KindClass};
use crate::lts::{Step, Tag};
use crate::{Error, Result, Q};

/// One executable step of a state with its target state.
#[derive(Clone, Debug)]
pub struct Move {
    pub step: Step,
    pub target: Arc<State>,
}

/// Memoizing evaluator for classes and rule inferences.
#[derive(Default)]
pub struct Semantics {
    classes: HashMap<Expr, Arc<State>>,
    derivations: HashMap<Expr, Arc<Vec<(Step, Expr)>>>,
}

impl Semantics {
    pub fn new() -> Self {
        Self::default()
    }

    /// The structural-equivalence class of `g`.
    pub fn class(&mut self, g: &Expr) -> Result<Arc<State>> {
        if let Some(s) = self.classes.get(g) {
            return Ok(s.clone());
        }
        self.class_of_set(vec![g.clone()])
    }

    /// The class generated by several expressions (assumed equivalent or to
    /// be merged).
    pub fn class_of_set(&mut self, seeds: Vec<Expr>) -> Result<Arc<State>> {
        let all = closure(seeds);
        let keys: Vec<Expr> = all.iter().cloned().collect();
        let st = Arc::new(State::from_members(all)?);
        for k in keys {
            self.classes.insert(k, st.clone());
        }
        Ok(st)
    }

    /// All rule inferences `g →Υ g̃` with non-empty Υ.
    ///
    /// The choice and iteration rules carry no local guard here: the
    /// pre-emption of a stochastic (waiting) step by a sibling alternative is
    /// decided on the whole state in [`Semantics::exec`], which requires every
    /// operative member of the class to be s-tangible (tangible). Evaluating
    /// the alternative in isolation would ignore restriction and
    /// synchronization around the choice.
    pub fn derive(&mut self, g: &Expr) -> Result<Arc<Vec<(Step, Expr)>>> {
        if let Some(d) = self.derivations.get(g) {
            return Ok(d.clone());
        }
        let set = self.derive_uncached(g)?;
        let d = Arc::new(set.into_iter().collect::<Vec<_>>());
        self.derivations.insert(g.clone(), d.clone());
        Ok(d)
    }

    fn derive_uncached(&mut self, g: &Expr) -> Result<BTreeSet<(Step, Expr)>> {
        use Expr::*;
        let mut out = BTreeSet::new();
        if g.is_static() {
            return Ok(out);
        }
        let b = Box::new;
        match g {
            Over(x) => match x.as_ref() {
                Act(a) if a.class() != KindClass::Waiting => {
                    out.insert((Step::single(a.clone()), Expr::under(Act(a.clone()))));
                }
                Stamped(w, 1) => {
                    out.insert((Step::single(w.clone()), Expr::under(Act(w.clone()))));
                }
                _ => {}
            },
            Under(_) | Act(_) | Stamped(..) => {}
            Seq(l, r) => {
                for (u, l2) in self.derive(l)?.iter() {
                    out.insert((u.clone(), Seq(b(l2.clone()), r.clone())));
                }
                for (u, r2) in self.derive(r)?.iter() {
                    out.insert((u.clone(), Seq(l.clone(), b(r2.clone()))));
                }
            }
            Choice(l, r) => {
                if l.is_dynamic() && r.is_static() {
                    for (u, l2) in self.derive(l)?.iter() {
                        out.insert((u.clone(), Choice(b(l2.clone()), b(strip_timers(r)))));
                    }
                }
                if r.is_dynamic() && l.is_static() {
                    for (u, r2) in self.derive(r)?.iter() {
                        out.insert((u.clone(), Choice(b(strip_timers(l)), b(r2.clone()))));
                    }
                }
            }
            Par(l, r) => {
                let dl = self.derive(l)?;
                let dr = self.derive(r)?;
                for (u, l2) in dl.iter() {
                    match step_kind(u)? {
                        KindClass::Immediate => {
                            out.insert((u.clone(), Par(b(l2.clone()), r.clone())));
                        }
                        _ => {
                            out.insert((u.clone(), Par(b(l2.clone()), b(timer_decrement(r)))));
                        }
                    }
                }
                for (u, r2) in dr.iter() {
                    match step_kind(u)? {
                        KindClass::Immediate => {
                            out.insert((u.clone(), Par(l.clone(), b(r2.clone()))));
                        }
                        _ => {
                            out.insert((u.clone(), Par(b(timer_decrement(l)), b(r2.clone()))));
                        }
                    }
                }
                for (u, l2) in dl.iter() {
                    for (v, r2) in dr.iter() {
                        if step_kind(u)? == step_kind(v)? {
                            out.insert((u.plus(v), Par(b(l2.clone()), b(r2.clone()))));
                        }
                    }
                }
            }
            Relabel(l, f) => {
                for (u, l2) in self.derive(l)?.iter() {
                    out.insert((u.map(|a| f.apply(a)), Relabel(b(l2.clone()), f.clone())));
                }
            }
            Restrict(l, a) => {
                for (u, l2) in self.derive(l)?.iter() {
                    if u.activities().iter().all(|x| !x.multiaction.mentions(a)) {
                        out.insert((u.clone(), Restrict(b(l2.clone()), a.clone())));
                    }
                }
            }
            Sync(l, a) => {
                for (u, l2) in self.derive(l)?.iter() {
                    for v in sync_closure(u, a) {
                        out.insert((v, Sync(b(l2.clone()), a.clone())));
                    }
                }
            }
            Iter(x, y, z) => {
                if x.is_dynamic() {
                    for (u, x2) in self.derive(x)?.iter() {
                        out.insert((u.clone(), Iter(b(x2.clone()), y.clone(), z.clone())));
                    }
                }
                if y.is_dynamic() {
                    for (u, y2) in self.derive(y)?.iter() {
                        out.insert((u.clone(), Iter(x.clone(), b(y2.clone()), b(strip_timers(z)))));
                    }
                }
                if z.is_dynamic() {
                    for (u, z2) in self.derive(z)?.iter() {
                        out.insert((u.clone(), Iter(x.clone(), b(strip_timers(y)), b(z2.clone()))));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Executable steps of `s` with their targets, sorted by step. Kind
    /// guards and waiting maximality are decided here, over the whole class,
    /// since an operand alone cannot see restriction or synchronization
    /// around it. The empty step is present iff the class is stochastically
    /// tangible.
    pub fn exec(&mut self, s: &State) -> Result<Vec<Move>> {
        let mut by_step: BTreeMap<Step, Arc<State>> = BTreeMap::new();
        for h in &s.members {
            for (u, h2) in self.derive(h)?.iter() {
                let allowed = match step_kind(u)? {
                    KindClass::Immediate => true,
                    KindClass::Waiting => s.tang,
                    KindClass::Stochastic => s.stang,
                };
                if !allowed {
                    continue;
                }
                let t = self.class(h2)?;
                match by_step.get(u) {
                    Some(old) if old.canonical != t.canonical => {
                        return Err(Error::Internal(format!(
                            "step {} of {} reaches two different states",
                            u,
                            s.label()
                        )));
                    }
                    Some(_) => {}
                    None => {
                        by_step.insert(u.clone(), t);
                    }
                }
            }
        }
        let waiting: Vec<Step> = by_step.keys().filter(|u| u.class() == Some(KindClass::Waiting)).cloned().collect();
        by_step.retain(|u, _| {
            u.class() != Some(KindClass::Waiting) || !waiting.iter().any(|v| v != u && u.is_submultiset(v))
        });
        if s.stang {
            let t = self.empty_move_target(s)?;
            by_step.insert(Step::empty(), t);
        }
        if by_step.is_empty() {
            return Err(Error::Internal(format!("no executable step in {}", s.label())));
        }
        Ok(by_step.into_iter().map(|(step, target)| Move { step, target }).collect())
    }

    /// Target ⟲s of the empty move: the class of the decremented members.
    pub fn empty_move_target(&mut self, s: &State) -> Result<Arc<State>> {
        let dec: Vec<Expr> = s.members.iter().map(timer_decrement).collect();
        let t = self.class(&dec[0])?;
        for d in &dec[1..] {
            if self.class(d)?.canonical != t.canonical {
                return Err(Error::Internal(format!("empty move of {} splits into several states", s.label())));
            }
        }
        Ok(t)
    }
}

fn step_kind(u: &Step) -> Result<KindClass> {
    u.class().ok_or_else(|| Error::Internal(format!("mixed step {u}")))
}

/// Tangibility tag of a state from its executable steps.
pub fn classify(moves: &[Move]) -> Result<Tag> {
    let mut kinds = moves.iter().map(|m| step_kind(&m.step));
    let first = kinds.next().ok_or_else(|| Error::Internal("empty Exec".into()))??;
    for k in kinds {
        if k? != first {
            return Err(Error::Internal("executable steps of different kinds".into()));
        }
    }
    Ok(Tag::from_class(first))
}

/// Readiness factor PF(Υ, s) for every executable step, in `moves` order.
pub fn pf(moves: &[Move]) -> Result<Vec<Q>> {
    let tag = classify(moves)?;
    let mut out = Vec::with_capacity(moves.len());
    if tag == Tag::ST {
        let singles: Vec<&crate::expr::Activity> =
            moves.iter().filter(|m| m.step.len() == 1).map(|m| &m.step.activities()[0]).collect();
        for m in moves {
            let mut p = Q::one();
            for a in m.step.activities() {
                p *= a.probability().cloned().unwrap_or_else(Q::one);
            }
            for a in &singles {
                if !m.step.contains(a) {
                    p *= Q::one() - a.probability().cloned().unwrap_or_else(Q::zero);
                }
            }
            out.push(p);
        }
    } else {
        for m in moves {
            let mut w = Q::zero();
            for a in m.step.activities() {
                w += a.weight().cloned().unwrap_or_else(Q::zero);
            }
            out.push(w);
        }
    }
    Ok(out)
}

/// Execution probabilities PT(Υ, s), in `moves` order; they sum to 1.
pub fn pt(moves: &[Move]) -> Result<Vec<Q>> {
    let f = pf(moves)?;
    let total: Q = f.iter().cloned().fold(Q::zero(), |a, b| a + b);
    if total.is_zero() {
        return Err(Error::Internal("zero total readiness".into()));
    }
    Ok(f.into_iter().map(|x| x / &total).collect())
}
