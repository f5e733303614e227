//! Potentially executable (`Can`) and executable (`Now`) steps of operative
//! expressions, and the tangibility predicates derived from them.

use std::collections::{BTreeSet, VecDeque};

use crate::expr::{sync_activities, Action, Expr, KindClass};
use crate::lts::Step;

/// Closes `step` under synchronization on `a`: repeatedly replaces two
/// synchronizable activities by their product. The input step is included.
pub fn sync_closure(step: &Step, a: &str) -> BTreeSet<Step> {
    let act = Action::new(a);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(step.clone());
    queue.push_back(step.clone());
    while let Some(s) = queue.pop_front() {
        let acts = s.activities();
        for i in 0..acts.len() {
            for j in i + 1..acts.len() {
                if !acts[i].can_sync(&acts[j], &act) {
                    continue;
                }
                let Ok(p) = sync_activities(&acts[i], &acts[j], &act) else { continue };
                let mut rest: Vec<_> =
                    acts.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, x)| x.clone()).collect();
                rest.push(p);
                let n = Step::new(rest);
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

/// All non-empty steps that can potentially be executed from an operative
/// expression.
pub fn can(g: &Expr) -> BTreeSet<Step> {
    use Expr::*;
    let mut out = BTreeSet::new();
    match g {
        Over(x) => match x.as_ref() {
            Act(a) if a.class() != KindClass::Waiting => {
                out.insert(Step::single(a.clone()));
            }
            Stamped(w, 1) => {
                out.insert(Step::single(w.clone()));
            }
            _ => {}
        },
        Under(_) | Act(_) | Stamped(..) => {}
        Seq(..) | Choice(..) | Iter(..) => {
            for c in g.children() {
                out.extend(can(c));
            }
        }
        Par(l, r) => {
            let a = can(l);
            let b = can(r);
            for u in &a {
                for v in &b {
                    out.insert(u.plus(v));
                }
            }
            out.extend(a);
            out.extend(b);
        }
        Relabel(l, f) => out.extend(can(l).iter().map(|s| s.map(|u| f.apply(u)))),
        Restrict(l, a) => {
            out.extend(can(l).into_iter().filter(|s| s.activities().iter().all(|u| !u.multiaction.mentions(a))))
        }
        Sync(l, a) => {
            for s in can(l) {
                out.extend(sync_closure(&s, a));
            }
        }
    }
    out
}

/// Steps that can actually be executed: immediate ones pre-empt waiting
/// ones, which pre-empt stochastic ones; waiting steps are maximal.
pub fn now(g: &Expr) -> BTreeSet<Step> {
    let c = can(g);
    let imm: BTreeSet<Step> = c.iter().filter(|s| s.class() == Some(KindClass::Immediate)).cloned().collect();
    if !imm.is_empty() {
        return imm;
    }
    let wait: Vec<&Step> = c.iter().filter(|s| s.class() == Some(KindClass::Waiting)).collect();
    if !wait.is_empty() {
        return wait
            .iter()
            .filter(|s| !wait.iter().any(|t| t.len() > s.len() && s.is_submultiset(t)))
            .map(|s| (*s).clone())
            .collect();
    }
    c
}

/// Stochastically tangible: no deterministic activity can be executed.
pub fn stang(g: &Expr) -> bool {
    can(g).iter().all(|s| s.class() == Some(KindClass::Stochastic))
}

/// Waiting tangible: the executable steps are non-empty waiting ones.
pub fn wtang(g: &Expr) -> bool {
    let n = now(g);
    !n.is_empty() && n.iter().all(|s| s.class() == Some(KindClass::Waiting))
}

/// Tangible: stochastically or waiting tangible.
pub fn tang(g: &Expr) -> bool {
    stang(g) || wtang(g)
}
