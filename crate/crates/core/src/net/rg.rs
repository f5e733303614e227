//! Reachability graphs and the safety/cleanness check.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::dtsd_box::DtsdBox;
use super::firing::{fire_unchecked, fireable, mark_initial, pf, NetState};
use crate::lts::{Lts, LtsState, LtsTransition, Step};
use crate::{Error, Result, Q};

/// A reachability graph together with its net states.
#[derive(Clone, Debug)]
pub struct Rg {
    pub lts: Lts,
    pub states: Vec<NetState>,
}

pub fn build_rg(n: &DtsdBox) -> Result<Rg> {
    build_rg_from(n, mark_initial(n), crate::DEFAULT_BUDGET)
}

/// Breadth-first exploration of the states reachable from `q0`; aborts on
/// an unsafe marking.
pub fn build_rg_from(n: &DtsdBox, q0: NetState, budget: usize) -> Result<Rg> {
    let mut index: HashMap<NetState, usize> = HashMap::new();
    let mut states = vec![q0.clone()];
    index.insert(q0, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();
    let mut tags = Vec::new();
    while let Some(i) = queue.pop_front() {
        let q = states[i].clone();
        check_state(n, &q)?;
        let (tag, sets) = fireable(n, &q);
        if sets.is_empty() {
            return Err(Error::Internal(format!("net state {} has no fireable set", q.label(n))));
        }
        if tags.len() <= i {
            tags.resize(i + 1, tag);
        }
        tags[i] = tag;
        let f = pf(n, &q, tag, &sets);
        let total: Q = f.iter().cloned().sum();
        for (u, w) in sets.iter().zip(f) {
            let next = fire_unchecked(n, &q, u);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= budget {
                        return Err(Error::Budget(budget));
                    }
                    let j = states.len();
                    index.insert(next.clone(), j);
                    states.push(next);
                    queue.push_back(j);
                    j
                }
            };
            let step = Step::new(u.iter().map(|&t| n.transitions[t].activity.clone()).collect());
            transitions.push(LtsTransition { from: i, step, prob: w / &total, to: j });
        }
    }
    transitions.sort_by(|a, b| (a.from, a.to, &a.step).cmp(&(b.from, b.to, &b.step)));
    let lstates = states
        .iter()
        .zip(&tags)
        .map(|(q, t)| LtsState { label: q.label(n), timer_free: q.timer_free_label(), tag: *t })
        .collect();
    let lts = Lts { states: lstates, initial: 0, transitions };
    lts.validate()?;
    Ok(Rg { lts, states })
}

fn check_state(n: &DtsdBox, q: &NetState) -> Result<()> {
    if let Some(p) = q.marking.iter().position(|&k| k > 1) {
        return Err(Error::Unsafe(format!(
            "{} tokens in place p{} ({}) at {}",
            q.marking[p],
            p + 1,
            n.places[p].name,
            q.label(n)
        )));
    }
    if let Some(t) = q.timers.iter().position(|v| *v == Some(0)) {
        return Err(Error::Internal(format!("timer of {} reached 0", n.transitions[t].name())));
    }
    Ok(())
}

/// Result of exploring all reachable markings of N̄.
#[derive(Clone, Debug, Serialize)]
pub struct SafetyReport {
    pub safe: bool,
    pub clean: bool,
    pub reachable_states: usize,
    /// The exploration hit the budget before finishing.
    pub truncated: bool,
    pub violations: Vec<String>,
}

/// Explores the reachable states of N̄ without aborting and reports
/// violations of safeness (≤ 1 token per place) and cleanness (a marking
/// covering all entry or all exit places equals it).
pub fn check_safe_clean(n: &DtsdBox) -> SafetyReport {
    check_safe_clean_with_budget(n, crate::DEFAULT_BUDGET)
}

pub fn check_safe_clean_with_budget(n: &DtsdBox, budget: usize) -> SafetyReport {
    let mut violations = n.structural_violations();
    let entry = n.entry_places();
    let exit = n.exit_places();
    let q0 = mark_initial(n);
    let mut seen: HashSet<NetState> = HashSet::from([q0.clone()]);
    let mut queue = VecDeque::from([q0]);
    let (mut safe, mut clean, mut truncated) = (true, true, false);
    let mut reported: HashSet<Vec<u32>> = HashSet::new();
    while let Some(q) = queue.pop_front() {
        let m = &q.marking;
        if reported.insert(m.clone()) {
            for (p, &k) in m.iter().enumerate() {
                if k > 1 {
                    safe = false;
                    violations.push(format!(
                        "{} tokens in place p{} ({}) at {}",
                        k,
                        p + 1,
                        n.places[p].name,
                        q.label(n)
                    ));
                }
            }
            for (set, what) in [(&entry, "entry"), (&exit, "exit")] {
                let covers = set.iter().all(|&p| m[p] >= 1);
                let equals = m.iter().enumerate().all(|(p, &k)| k == u32::from(set.contains(&p)));
                if covers && !equals {
                    clean = false;
                    violations.push(format!("marking {} covers all {what} places", q.label(n)));
                }
            }
        }
        let (_, sets) = fireable(n, &q);
        for u in sets {
            let next = fire_unchecked(n, &q, &u);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= budget {
                truncated = true;
                break;
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    SafetyReport { safe, clean, reachable_states: seen.len(), truncated, violations }
}
