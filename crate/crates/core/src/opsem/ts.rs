//! Transition-system construction.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::rules::{classify, pt, Move, Semantics};
use super::state::State;
use crate::expr::{enumerate, is_regular, print_dynamic, strip_timers, Expr, Numbering};
use crate::lts::{Lts, LtsState, LtsTransition, Tag};
use crate::{Error, Result, Q};

/// The transition system of an expression together with its states.
#[derive(Clone, Debug)]
pub struct Ts {
    pub lts: Lts,
    pub states: Vec<Arc<State>>,
}

/// Enumerates `e` unless all its activities already carry numbers, and
/// rejects non-regular or stamped input.
pub fn prepare(e: &Expr) -> Result<Expr> {
    if e.is_dynamic() {
        return Err(Error::Invalid("expected a static expression".into()));
    }
    if matches_stamped(e) {
        return Err(Error::Invalid("input must not carry timer values".into()));
    }
    is_regular(e)?;
    let numbered = e.activities().iter().all(|a| !matches!(a.numbering, Numbering::Leaf(0)));
    Ok(if numbered { e.clone() } else { enumerate(e) })
}

fn matches_stamped(e: &Expr) -> bool {
    matches!(e, Expr::Stamped(..)) || e.children().into_iter().any(matches_stamped)
}

pub fn build_ts(e: &Expr) -> Result<Ts> {
    build_ts_with_budget(e, crate::DEFAULT_BUDGET)
}

/// Breadth-first exploration from the class of the overlined expression.
pub fn build_ts_with_budget(e: &Expr, budget: usize) -> Result<Ts> {
    let e = prepare(e)?;
    let mut sem = Semantics::new();
    let s0 = sem.class(&Expr::over(e))?;
    let mut index: HashMap<Expr, usize> = HashMap::new();
    let mut states: Vec<Arc<State>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(s0.canonical.clone(), 0);
    states.push(s0);
    queue.push_back(0);
    let mut transitions = Vec::new();
    let mut tags = vec![Tag::ST];
    while let Some(i) = queue.pop_front() {
        let s = states[i].clone();
        let moves: Vec<Move> = sem.exec(&s)?;
        tags[i] = classify(&moves)?;
        let probs: Vec<Q> = pt(&moves)?;
        for (m, p) in moves.into_iter().zip(probs) {
            let j = match index.get(&m.target.canonical) {
                Some(&j) => j,
                None => {
                    if states.len() >= budget {
                        return Err(Error::Budget(budget));
                    }
                    let j = states.len();
                    index.insert(m.target.canonical.clone(), j);
                    states.push(m.target.clone());
                    tags.push(Tag::ST);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push(LtsTransition { from: i, step: m.step, prob: p, to: j });
        }
    }
    transitions.sort_by(|a, b| (a.from, a.to, &a.step).cmp(&(b.from, b.to, &b.step)));
    let mut lstates = Vec::with_capacity(states.len());
    for (s, tag) in states.iter().zip(tags) {
        let tf = sem.class(&strip_timers(&s.canonical))?;
        lstates.push(LtsState { label: s.label(), timer_free: print_dynamic(&tf.canonical), tag });
    }
    let lts = Lts { states: lstates, initial: 0, transitions };
    lts.validate()?;
    Ok(Ts { lts, states })
}
