//! Net states, fireable transition sets and the firing rule with
//! enabling-memory timers.

use num_traits::{One, Zero};

use super::dtsd_box::DtsdBox;
use crate::expr::KindClass;
use crate::lts::Tag;
use crate::{Error, Result, Q};

/// Marking plus the remaining time to fire of every waiting transition
/// (`None` = undefined, i.e. disabled or not waiting).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetState {
    pub marking: Vec<u32>,
    pub timers: Vec<Option<u32>>,
}

impl NetState {
    /// Renders the marked places and defined timers, e.g.
    /// `{p2,p3} [t2=1]`.
    pub fn label(&self, n: &DtsdBox) -> String {
        let mut parts = Vec::new();
        for (i, &k) in self.marking.iter().enumerate() {
            for _ in 0..k {
                parts.push(format!("p{}", i + 1));
            }
        }
        let timers: Vec<String> = self
            .timers
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|d| format!("{}={}", n.transitions[i].name(), d)))
            .collect();
        if timers.is_empty() {
            format!("{{{}}}", parts.join(","))
        } else {
            format!("{{{}}} [{}]", parts.join(","), timers.join(","))
        }
    }

    /// The marking only.
    pub fn timer_free_label(&self) -> String {
        let parts: Vec<String> = self
            .marking
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(format!("p{}", i + 1), k as usize))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

fn marking_with(n: &DtsdBox, places: &[usize]) -> Vec<u32> {
    let mut m = vec![0; n.places.len()];
    for &p in places {
        m[p] += 1;
    }
    m
}

pub fn enabled(n: &DtsdBox, m: &[u32], t: usize) -> bool {
    n.transitions[t].pre.iter().all(|(p, w)| m[*p] >= *w)
}

fn initial_timers(n: &DtsdBox, m: &[u32]) -> Vec<Option<u32>> {
    (0..n.transitions.len())
        .map(|t| {
            let tr = &n.transitions[t];
            (tr.class() == KindClass::Waiting && enabled(n, m, t)).then(|| tr.activity.kind.delay().unwrap_or(1))
        })
        .collect()
}

/// N̄: a token on every entry place, enabled waiting timers set to their
/// delays.
pub fn mark_initial(n: &DtsdBox) -> NetState {
    let marking = marking_with(n, &n.entry_places());
    let timers = initial_timers(n, &marking);
    NetState { marking, timers }
}

/// N̲: a token on every exit place, all timers undefined.
pub fn mark_final(n: &DtsdBox) -> NetState {
    NetState { marking: marking_with(n, &n.exit_places()), timers: vec![None; n.transitions.len()] }
}

fn preset_sum(n: &DtsdBox, u: &[usize]) -> Vec<u32> {
    let mut s = vec![0; n.places.len()];
    for &t in u {
        for (p, w) in &n.transitions[t].pre {
            s[*p] += w;
        }
    }
    s
}

fn fits(m: &[u32], need: &[u32]) -> bool {
    m.iter().zip(need).all(|(a, b)| a >= b)
}

/// All subsets of `cands` (kept sorted) whose joint preset fits in `m`.
fn fitting_subsets(n: &DtsdBox, m: &[u32], cands: &[usize]) -> Vec<Vec<usize>> {
    fn go(n: &DtsdBox, m: &[u32], cands: &[usize], i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cands.len() {
            out.push(cur.clone());
            return;
        }
        go(n, m, cands, i + 1, cur, out);
        cur.push(cands[i]);
        if fits(m, &preset_sum(n, cur)) {
            go(n, m, cands, i + 1, cur, out);
        }
        cur.pop();
    }
    let mut out = Vec::new();
    go(n, m, cands, 0, &mut Vec::new(), &mut out);
    out
}

/// Fireable transition sets of `q`, with the tag of the state. Immediate
/// sets pre-empt maximal sets of ready waiting transitions, which pre-empt
/// stochastic sets (the empty set included).
pub fn fireable(n: &DtsdBox, q: &NetState) -> (Tag, Vec<Vec<usize>>) {
    let m = &q.marking;
    let ena: Vec<usize> = (0..n.transitions.len()).filter(|&t| enabled(n, m, t)).collect();
    let of = |c: KindClass| ena.iter().copied().filter(|&t| n.transitions[t].class() == c).collect::<Vec<_>>();
    let imm = of(KindClass::Immediate);
    if !imm.is_empty() {
        let sets = fitting_subsets(n, m, &imm).into_iter().filter(|u| !u.is_empty()).collect();
        return (Tag::V, sets);
    }
    let ready: Vec<usize> = of(KindClass::Waiting).into_iter().filter(|&t| q.timers[t] == Some(1)).collect();
    if !ready.is_empty() {
        let sets = fitting_subsets(n, m, &ready)
            .into_iter()
            .filter(|u| {
                if u.is_empty() {
                    return false;
                }
                let need = preset_sum(n, u);
                let rest: Vec<u32> = m.iter().zip(&need).map(|(a, b)| a - b).collect();
                ready.iter().all(|t| u.contains(t) || !enabled(n, &rest, *t))
            })
            .collect();
        return (Tag::WT, sets);
    }
    (Tag::ST, fitting_subsets(n, m, &of(KindClass::Stochastic)))
}

/// PF(U, q) for every fireable set, in order.
pub fn pf(n: &DtsdBox, q: &NetState, tag: Tag, sets: &[Vec<usize>]) -> Vec<Q> {
    if tag == Tag::ST {
        let ena: Vec<usize> = (0..n.transitions.len())
            .filter(|&t| n.transitions[t].class() == KindClass::Stochastic && enabled(n, &q.marking, t))
            .collect();
        sets.iter()
            .map(|u| {
                let mut p = Q::one();
                for &t in &ena {
                    let r = n.transitions[t].activity.probability().cloned().unwrap_or_else(Q::zero);
                    p *= if u.contains(&t) { r } else { Q::one() - r };
                }
                p
            })
            .collect()
    } else {
        sets.iter()
            .map(|u| u.iter().map(|&t| n.transitions[t].activity.weight().cloned().unwrap_or_else(Q::zero)).sum())
            .collect()
    }
}

/// Successor state after firing `u` (assumed fireable).
pub fn fire_unchecked(n: &DtsdBox, q: &NetState, u: &[usize]) -> NetState {
    let need = preset_sum(n, u);
    let mid: Vec<u32> = q.marking.iter().zip(&need).map(|(a, b)| a - b).collect();
    let mut next = mid.clone();
    for &t in u {
        for (p, w) in &n.transitions[t].post {
            next[*p] += w;
        }
    }
    let immediate_step = !u.is_empty() && u.iter().all(|&t| n.transitions[t].class() == KindClass::Immediate);
    let timers = (0..n.transitions.len())
        .map(|t| {
            let tr = &n.transitions[t];
            if tr.class() != KindClass::Waiting || !enabled(n, &next, t) {
                return None;
            }
            if !enabled(n, &mid, t) {
                return tr.activity.kind.delay();
            }
            let v = q.timers[t].unwrap_or_else(|| tr.activity.kind.delay().unwrap_or(1));
            Some(if immediate_step { v } else { v.saturating_sub(1) })
        })
        .collect();
    NetState { marking: next, timers }
}

/// Fires `u` from `q`, returning the successor and PT(U, q).
pub fn fire(n: &DtsdBox, q: &NetState, u: &[usize]) -> Result<(NetState, Q)> {
    let mut u = u.to_vec();
    u.sort_unstable();
    let (tag, sets) = fireable(n, q);
    let Some(i) = sets.iter().position(|s| *s == u) else {
        return Err(Error::Invalid("transition set is not fireable".into()));
    };
    let f = pf(n, q, tag, &sets);
    let total: Q = f.iter().cloned().sum();
    Ok((fire_unchecked(n, q, &u), &f[i] / total))
}
