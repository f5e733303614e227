//! Inaction rules, structural equivalence closure and timer operations.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::expr::{Expr, KindClass};

use Expr::*;

fn s(e: &Expr) -> bool {
    e.is_static()
}

fn b(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Forward inaction rewrites applicable at the root of `e`.
fn forward_root(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    match e {
        Over(x) => match x.as_ref() {
            Act(w) if w.class() == KindClass::Waiting => {
                let theta = w.kind.delay().unwrap_or(1);
                out.push(Expr::over(Stamped(w.clone(), theta)));
            }
            Seq(p, q) => out.push(Seq(b(Expr::over((**p).clone())), q.clone())),
            Choice(p, q) => {
                out.push(Choice(b(Expr::over((**p).clone())), q.clone()));
                out.push(Choice(p.clone(), b(Expr::over((**q).clone()))));
            }
            Par(p, q) => out.push(Par(b(Expr::over((**p).clone())), b(Expr::over((**q).clone())))),
            Relabel(p, f) => out.push(Relabel(b(Expr::over((**p).clone())), f.clone())),
            Restrict(p, a) => out.push(Restrict(b(Expr::over((**p).clone())), a.clone())),
            Sync(p, a) => out.push(Sync(b(Expr::over((**p).clone())), a.clone())),
            Iter(p, q, r) => out.push(Iter(b(Expr::over((**p).clone())), q.clone(), r.clone())),
            _ => {}
        },
        Seq(l, r) => {
            if let (Under(p), true) = (l.as_ref(), s(r)) {
                out.push(Seq(p.clone(), b(Expr::over((**r).clone()))));
            }
            if let (true, Under(q)) = (s(l), r.as_ref()) {
                out.push(Expr::under(Seq(l.clone(), q.clone())));
            }
        }
        Choice(l, r) => {
            if let (Under(p), true) = (l.as_ref(), s(r)) {
                out.push(Expr::under(Choice(p.clone(), r.clone())));
            }
            if let (true, Under(q)) = (s(l), r.as_ref()) {
                out.push(Expr::under(Choice(l.clone(), q.clone())));
            }
        }
        Par(l, r) => {
            if let (Under(p), Under(q)) = (l.as_ref(), r.as_ref()) {
                out.push(Expr::under(Par(p.clone(), q.clone())));
            }
        }
        Relabel(l, f) => {
            if let Under(p) = l.as_ref() {
                out.push(Expr::under(Relabel(p.clone(), f.clone())));
            }
        }
        Restrict(l, a) => {
            if let Under(p) = l.as_ref() {
                out.push(Expr::under(Restrict(p.clone(), a.clone())));
            }
        }
        Sync(l, a) => {
            if let Under(p) = l.as_ref() {
                out.push(Expr::under(Sync(p.clone(), a.clone())));
            }
        }
        Iter(x, y, z) => {
            if let (Under(p), true, true) = (x.as_ref(), s(y), s(z)) {
                out.push(Iter(p.clone(), b(Expr::over((**y).clone())), z.clone()));
            }
            if let (true, Under(q), true) = (s(x), y.as_ref(), s(z)) {
                out.push(Iter(x.clone(), b(Expr::over((**q).clone())), z.clone()));
                out.push(Iter(x.clone(), q.clone(), b(Expr::over((**z).clone()))));
            }
            if let (true, true, Under(r)) = (s(x), s(y), z.as_ref()) {
                out.push(Expr::under(Iter(x.clone(), y.clone(), r.clone())));
            }
        }
        _ => {}
    }
    out
}

/// Backward inaction rewrites (inverted rules) at the root of `e`.
fn backward_root(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    match e {
        Over(x) => {
            if let Stamped(w, d) = x.as_ref() {
                if Some(*d) == w.kind.delay() {
                    out.push(Expr::over(Act(w.clone())));
                }
            }
        }
        Under(x) => match x.as_ref() {
            Seq(p, q) => out.push(Seq(p.clone(), b(Expr::under((**q).clone())))),
            Choice(p, q) => {
                out.push(Choice(b(Expr::under((**p).clone())), q.clone()));
                out.push(Choice(p.clone(), b(Expr::under((**q).clone()))));
            }
            Par(p, q) => out.push(Par(b(Expr::under((**p).clone())), b(Expr::under((**q).clone())))),
            Relabel(p, f) => out.push(Relabel(b(Expr::under((**p).clone())), f.clone())),
            Restrict(p, a) => out.push(Restrict(b(Expr::under((**p).clone())), a.clone())),
            Sync(p, a) => out.push(Sync(b(Expr::under((**p).clone())), a.clone())),
            Iter(p, q, r) => out.push(Iter(p.clone(), q.clone(), b(Expr::under((**r).clone())))),
            _ => {}
        },
        Seq(l, r) => {
            if let (Over(p), true) = (l.as_ref(), s(r)) {
                out.push(Expr::over(Seq(p.clone(), r.clone())));
            }
            if let (true, Over(q)) = (s(l), r.as_ref()) {
                out.push(Seq(b(Expr::under((**l).clone())), q.clone()));
            }
        }
        Choice(l, r) => {
            if let (Over(p), true) = (l.as_ref(), s(r)) {
                out.push(Expr::over(Choice(p.clone(), r.clone())));
            }
            if let (true, Over(q)) = (s(l), r.as_ref()) {
                out.push(Expr::over(Choice(l.clone(), q.clone())));
            }
        }
        Par(l, r) => {
            if let (Over(p), Over(q)) = (l.as_ref(), r.as_ref()) {
                out.push(Expr::over(Par(p.clone(), q.clone())));
            }
        }
        Relabel(l, f) => {
            if let Over(p) = l.as_ref() {
                out.push(Expr::over(Relabel(p.clone(), f.clone())));
            }
        }
        Restrict(l, a) => {
            if let Over(p) = l.as_ref() {
                out.push(Expr::over(Restrict(p.clone(), a.clone())));
            }
        }
        Sync(l, a) => {
            if let Over(p) = l.as_ref() {
                out.push(Expr::over(Sync(p.clone(), a.clone())));
            }
        }
        Iter(x, y, z) => {
            if let (Over(p), true, true) = (x.as_ref(), s(y), s(z)) {
                out.push(Expr::over(Iter(p.clone(), y.clone(), z.clone())));
            }
            if let (true, Over(q), true) = (s(x), y.as_ref(), s(z)) {
                out.push(Iter(b(Expr::under((**x).clone())), q.clone(), z.clone()));
                out.push(Iter(x.clone(), b(Expr::under((**q).clone())), z.clone()));
            }
            if let (true, true, Over(r)) = (s(x), s(y), z.as_ref()) {
                out.push(Iter(x.clone(), b(Expr::under((**y).clone())), r.clone()));
            }
        }
        _ => {}
    }
    out
}

/// Applies `rule` at every dynamic position of `e` (congruence closure).
fn everywhere(e: &Expr, rule: &impl Fn(&Expr) -> Vec<Expr>, out: &mut Vec<Expr>) {
    if e.is_static() {
        return;
    }
    out.extend(rule(e));
    if matches!(e, Over(_) | Under(_)) {
        return;
    }
    let ch = e.children();
    for (i, c) in ch.iter().enumerate() {
        let mut sub = Vec::new();
        everywhere(c, rule, &mut sub);
        for r in sub {
            let mut kids: Vec<Expr> = ch.iter().map(|x| (*x).clone()).collect();
            kids[i] = r;
            out.push(e.with_children(kids));
        }
    }
}

/// One-step forward inaction successors of `e`.
pub fn forward_steps(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    everywhere(e, &forward_root, &mut out);
    out
}

/// One-step backward inaction successors of `e`.
pub fn backward_steps(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    everywhere(e, &backward_root, &mut out);
    out
}

/// No inaction rule applies.
pub fn is_operative(e: &Expr) -> bool {
    forward_steps(e).is_empty()
}

/// Closure of `seeds` under forward and backward inaction rules.
pub fn closure(seeds: impl IntoIterator<Item = Expr>) -> BTreeSet<Expr> {
    let mut seen: HashSet<Expr> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(e) = queue.pop_front() {
        for n in forward_steps(&e).into_iter().chain(backward_steps(&e)) {
            if !seen.contains(&n) {
                seen.insert(n.clone());
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().collect()
}

/// The timer decrement ⟲: every stamp δ becomes max(1, δ−1).
pub fn timer_decrement(e: &Expr) -> Expr {
    match e {
        Stamped(a, d) => Stamped(a.clone(), (*d).saturating_sub(1).max(1)),
        Act(_) => e.clone(),
        _ => e.with_children(e.children().into_iter().map(timer_decrement).collect()),
    }
}

/// Overlined activities of `e` (with the stamp, if any).
pub fn overlined(e: &Expr) -> Vec<(&crate::expr::Activity, Option<u32>)> {
    fn go<'a>(e: &'a Expr, out: &mut Vec<(&'a crate::expr::Activity, Option<u32>)>) {
        match e {
            Over(x) => match x.as_ref() {
                Act(a) => out.push((a, None)),
                Stamped(a, d) => out.push((a, Some(*d))),
                _ => {}
            },
            _ => {
                for c in e.children() {
                    go(c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

/// Stamped activities of `e`, overlined or not.
pub fn stamps(e: &Expr) -> Vec<(&crate::expr::Activity, u32)> {
    fn go<'a>(e: &'a Expr, out: &mut Vec<(&'a crate::expr::Activity, u32)>) {
        match e {
            Stamped(a, d) => out.push((a, *d)),
            _ => {
                for c in e.children() {
                    go(c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}
