//! Compilation of static expressions into dtsd-boxes by refining operator
//! boxes.

use std::collections::BTreeMap;

use super::dtsd_box::{DtsdBox, Place, PlaceKind, Transition};
use crate::expr::{sync_activities, Action, Activity, Expr, Relabeling};
use crate::{Error, Result};

/// Relabeling relation attached to an operator-box transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rho {
    Identity,
    Relabel(Relabeling),
    Restrict(String),
    Sync(String),
}

/// An operator box: places with e/i/x labels and transitions `v_i`
/// (one per operand) with relabeling relations.
#[derive(Clone, Debug)]
pub struct OperatorBox {
    pub places: Vec<(&'static str, PlaceKind)>,
    /// (relabeling, preset places, postset places)
    pub transitions: Vec<(Rho, Vec<usize>, Vec<usize>)>,
}

use PlaceKind::{Entry as E, Exit as X, Internal as I};

impl OperatorBox {
    pub fn sequence() -> Self {
        OperatorBox {
            places: vec![("e", E), ("i", I), ("x", X)],
            transitions: vec![(Rho::Identity, vec![0], vec![1]), (Rho::Identity, vec![1], vec![2])],
        }
    }

    pub fn choice() -> Self {
        OperatorBox {
            places: vec![("e", E), ("x", X)],
            transitions: vec![(Rho::Identity, vec![0], vec![1]), (Rho::Identity, vec![0], vec![1])],
        }
    }

    pub fn parallel() -> Self {
        OperatorBox {
            places: vec![("e1", E), ("e2", E), ("x1", X), ("x2", X)],
            transitions: vec![(Rho::Identity, vec![0], vec![2]), (Rho::Identity, vec![1], vec![3])],
        }
    }

    pub fn unary(rho: Rho) -> Self {
        OperatorBox { places: vec![("e", E), ("x", X)], transitions: vec![(rho, vec![0], vec![1])] }
    }

    /// The three-transition iteration box.
    pub fn iteration() -> Self {
        OperatorBox {
            places: vec![("e", E), ("i", I), ("x", X)],
            transitions: vec![
                (Rho::Identity, vec![0], vec![1]),
                (Rho::Identity, vec![1], vec![1]),
                (Rho::Identity, vec![1], vec![2]),
            ],
        }
    }
}

/// Plain box of a single activity: one entry, one exit, one transition.
pub fn plain_box(a: &Activity) -> DtsdBox {
    DtsdBox {
        places: vec![Place { name: "e".into(), kind: E }, Place { name: "x".into(), kind: X }],
        transitions: vec![Transition {
            activity: a.clone(),
            pre: BTreeMap::from([(0, 1)]),
            post: BTreeMap::from([(1, 1)]),
        }],
    }
}

fn add(m: &mut BTreeMap<usize, u32>, other: &BTreeMap<usize, u32>) {
    for (k, v) in other {
        *m.entry(*k).or_insert(0) += v;
    }
}

/// Applies a relabeling relation to the transitions of an operand box.
pub fn apply_rho(rho: &Rho, ts: &[Transition]) -> Vec<Transition> {
    match rho {
        Rho::Identity => ts.to_vec(),
        Rho::Relabel(f) => ts.iter().map(|t| Transition { activity: f.apply(&t.activity), ..t.clone() }).collect(),
        Rho::Restrict(a) => ts.iter().filter(|t| !t.activity.multiaction.mentions(a)).cloned().collect(),
        Rho::Sync(a) => sync_transitions(ts, a),
    }
}

/// Synchronization closure: adds products of synchronizable transitions
/// until a fixpoint, identifying products with equal numbering content.
fn sync_transitions(ts: &[Transition], a: &str) -> Vec<Transition> {
    let act = Action::new(a);
    let mut out: Vec<Transition> = ts.to_vec();
    let mut i = 0;
    while i < out.len() {
        for j in 0..i {
            let (u, v) = (&out[j], &out[i]);
            if !u.activity.can_sync(&v.activity, &act) {
                continue;
            }
            let Ok(p) = sync_activities(&u.activity, &v.activity, &act) else { continue };
            if out.iter().any(|t| t.activity.content() == p.content()) {
                continue;
            }
            let mut pre = u.pre.clone();
            add(&mut pre, &v.pre);
            let mut post = u.post.clone();
            add(&mut post, &v.post);
            out.push(Transition { activity: p, pre, post });
        }
        i += 1;
    }
    out
}

/// Net refinement Θ(N_1, …, N_n): operand boxes replace the transitions of
/// the operator box, interface places are glued as tuples.
pub fn refine(op: &OperatorBox, operands: &[DtsdBox]) -> DtsdBox {
    assert_eq!(op.transitions.len(), operands.len(), "operator arity");
    let mut places: Vec<Place> = Vec::new();
    // (operand, operand place) -> [(new place, multiplicity)]
    let mut image: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    // Internal places of the operands keep their identity.
    for (v, n) in operands.iter().enumerate() {
        for (q, p) in n.places.iter().enumerate() {
            if p.kind == I {
                image.entry((v, q)).or_default().push(places.len());
                places.push(Place { name: format!("{}.{}", v + 1, p.name), kind: I });
            }
        }
    }
    // Each operator place becomes the product of the exit places of its
    // input operands and the entry places of its output operands.
    for (s, (sname, skind)) in op.places.iter().enumerate() {
        let mut slots: Vec<(usize, Vec<usize>)> = Vec::new();
        for (v, (_, _, post)) in op.transitions.iter().enumerate() {
            if post.contains(&s) {
                slots.push((v, operands[v].exit_places()));
            }
        }
        for (v, (_, pre, _)) in op.transitions.iter().enumerate() {
            if pre.contains(&s) {
                slots.push((v, operands[v].entry_places()));
            }
        }
        let mut combos: Vec<Vec<(usize, usize)>> = vec![vec![]];
        for (v, cands) in &slots {
            let mut next = Vec::new();
            for c in &combos {
                for q in cands {
                    let mut c2 = c.clone();
                    c2.push((*v, *q));
                    next.push(c2);
                }
            }
            combos = next;
        }
        for combo in combos {
            let idx = places.len();
            let parts: Vec<String> =
                combo.iter().map(|(v, q)| format!("{}.{}", v + 1, operands[*v].places[*q].name)).collect();
            let name = if parts.is_empty() { sname.to_string() } else { format!("{}({})", sname, parts.join(",")) };
            places.push(Place { name, kind: *skind });
            for (v, q) in combo {
                image.entry((v, q)).or_default().push(idx);
            }
        }
    }
    let mut transitions = Vec::new();
    for (v, (rho, _, _)) in op.transitions.iter().enumerate() {
        for t in apply_rho(rho, &operands[v].transitions) {
            let map = |arcs: &BTreeMap<usize, u32>| {
                let mut out = BTreeMap::new();
                for (q, w) in arcs {
                    for p in image.get(&(v, *q)).into_iter().flatten() {
                        *out.entry(*p).or_insert(0) += w;
                    }
                }
                out
            };
            transitions.push(Transition { pre: map(&t.pre), post: map(&t.post), activity: t.activity });
        }
    }
    DtsdBox { places, transitions }
}

/// Structural recursion without regularity or enumeration checks; used for
/// deliberately non-regular nets.
pub fn box_of_expr_unchecked(e: &Expr) -> Result<DtsdBox> {
    Ok(match e {
        Expr::Act(a) => plain_box(a),
        Expr::Stamped(..) | Expr::Over(_) | Expr::Under(_) => {
            return Err(Error::Invalid("boxes are built from timer-free static expressions".into()))
        }
        Expr::Seq(a, b) => refine(&OperatorBox::sequence(), &[box_of_expr_unchecked(a)?, box_of_expr_unchecked(b)?]),
        Expr::Choice(a, b) => refine(&OperatorBox::choice(), &[box_of_expr_unchecked(a)?, box_of_expr_unchecked(b)?]),
        Expr::Par(a, b) => refine(&OperatorBox::parallel(), &[box_of_expr_unchecked(a)?, box_of_expr_unchecked(b)?]),
        Expr::Relabel(a, f) => refine(&OperatorBox::unary(Rho::Relabel(f.clone())), &[box_of_expr_unchecked(a)?]),
        Expr::Restrict(a, x) => refine(&OperatorBox::unary(Rho::Restrict(x.clone())), &[box_of_expr_unchecked(a)?]),
        Expr::Sync(a, x) => refine(&OperatorBox::unary(Rho::Sync(x.clone())), &[box_of_expr_unchecked(a)?]),
        Expr::Iter(a, b, c) => refine(
            &OperatorBox::iteration(),
            &[box_of_expr_unchecked(a)?, box_of_expr_unchecked(b)?, box_of_expr_unchecked(c)?],
        ),
    })
}

/// The dtsd-box of a regular static expression (enumerated on the fly if
/// needed).
pub fn box_of_static(e: &Expr) -> Result<DtsdBox> {
    let e = crate::opsem::prepare(e)?;
    box_of_expr_unchecked(&e)
}
