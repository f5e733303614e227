use std::collections::BTreeMap;

use super::action::{Action, Multiaction, STOP_ACTION};
use super::activity::{Activity, Kind, KindClass, Numbering};
use crate::rational::q;

/// Relabeling function given on base action names; conjugates follow and
/// unmentioned names map to themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Relabeling(pub BTreeMap<String, String>);

impl Relabeling {
    pub fn apply_name(&self, name: &str) -> String {
        self.0.get(name).cloned().unwrap_or_else(|| name.to_string())
    }

    pub fn apply_action(&self, a: &Action) -> Action {
        Action { name: self.apply_name(&a.name), conjugated: a.conjugated }
    }

    pub fn apply(&self, act: &Activity) -> Activity {
        Activity {
            multiaction: act.multiaction.rename(|n| self.apply_name(n)),
            kind: act.kind.clone(),
            numbering: act.numbering.clone(),
        }
    }
}

/// Expression tree shared by static and dynamic expressions.
///
/// A static expression contains no `Over`/`Under` nodes; stamped waiting
/// activities (`Stamped`) only arise internally while deriving behaviour.
/// The derived ordering (constructor first, then children) is the total
/// order used to pick canonical class representatives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Act(Activity),
    /// Waiting activity carrying its timer value δ ∈ 1..=θ.
    Stamped(Activity, u32),
    Seq(Box<Expr>, Box<Expr>),
    Choice(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
    Relabel(Box<Expr>, Relabeling),
    Restrict(Box<Expr>, String),
    Sync(Box<Expr>, String),
    Iter(Box<Expr>, Box<Expr>, Box<Expr>),
    Over(Box<Expr>),
    Under(Box<Expr>),
}

pub type StaticExpr = Expr;
pub type DynExpr = Expr;

pub(crate) fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Expr {
    pub fn seq(a: Expr, b: Expr) -> Expr {
        Expr::Seq(bx(a), bx(b))
    }
    pub fn choice(a: Expr, b: Expr) -> Expr {
        Expr::Choice(bx(a), bx(b))
    }
    pub fn par(a: Expr, b: Expr) -> Expr {
        Expr::Par(bx(a), bx(b))
    }
    pub fn iter(a: Expr, b: Expr, c: Expr) -> Expr {
        Expr::Iter(bx(a), bx(b), bx(c))
    }
    pub fn over(a: Expr) -> Expr {
        Expr::Over(bx(a))
    }
    pub fn under(a: Expr) -> Expr {
        Expr::Under(bx(a))
    }
    pub fn restrict(a: Expr, name: &str) -> Expr {
        Expr::Restrict(bx(a), name.to_string())
    }
    pub fn sync(a: Expr, name: &str) -> Expr {
        Expr::Sync(bx(a), name.to_string())
    }

    /// `stop`: a stochastic activity on a reserved action, restricted away.
    pub fn stop() -> Expr {
        let act = Activity::new(Multiaction::from_actions([Action::new(STOP_ACTION)]), Kind::Stochastic(q(1, 2)));
        Expr::restrict(Expr::Act(act), STOP_ACTION)
    }

    pub fn is_stop(&self) -> bool {
        match self {
            Expr::Restrict(inner, a) if a == STOP_ACTION => match inner.as_ref() {
                Expr::Act(act) => {
                    act.multiaction == Multiaction::from_actions([Action::new(STOP_ACTION)])
                        && act.kind == Kind::Stochastic(q(1, 2))
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// Direct subexpressions, left to right.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Act(_) | Expr::Stamped(..) => vec![],
            Expr::Seq(a, b) | Expr::Choice(a, b) | Expr::Par(a, b) => vec![a, b],
            Expr::Relabel(a, _) | Expr::Restrict(a, _) | Expr::Sync(a, _) | Expr::Over(a) | Expr::Under(a) => {
                vec![a]
            }
            Expr::Iter(a, b, c) => vec![a, b, c],
        }
    }

    /// Rebuilds a node of the same shape with new children.
    pub fn with_children(&self, mut ch: Vec<Expr>) -> Expr {
        let mut next = || bx(ch.remove(0));
        match self {
            Expr::Act(_) | Expr::Stamped(..) => self.clone(),
            Expr::Seq(..) => Expr::Seq(next(), next()),
            Expr::Choice(..) => Expr::Choice(next(), next()),
            Expr::Par(..) => Expr::Par(next(), next()),
            Expr::Relabel(_, f) => Expr::Relabel(next(), f.clone()),
            Expr::Restrict(_, a) => Expr::Restrict(next(), a.clone()),
            Expr::Sync(_, a) => Expr::Sync(next(), a.clone()),
            Expr::Iter(..) => Expr::Iter(next(), next(), next()),
            Expr::Over(_) => Expr::Over(next()),
            Expr::Under(_) => Expr::Under(next()),
        }
    }

    /// No overlines or underlines anywhere.
    pub fn is_static(&self) -> bool {
        match self {
            Expr::Over(_) | Expr::Under(_) => false,
            _ => self.children().iter().all(|c| c.is_static()),
        }
    }

    pub fn is_dynamic(&self) -> bool {
        !self.is_static()
    }

    /// Removes all bars, giving the underlying static expression ⌊G⌋.
    pub fn unbarred(&self) -> Expr {
        match self {
            Expr::Over(a) | Expr::Under(a) => a.unbarred(),
            _ => self.with_children(self.children().into_iter().map(|c| c.unbarred()).collect()),
        }
    }

    /// Activity leaves in syntax order (stamped ones included).
    pub fn activities(&self) -> Vec<&Activity> {
        let mut out = Vec::new();
        self.collect_activities(&mut out);
        out
    }

    fn collect_activities<'a>(&'a self, out: &mut Vec<&'a Activity>) {
        match self {
            Expr::Act(a) | Expr::Stamped(a, _) => out.push(a),
            _ => {
                for c in self.children() {
                    c.collect_activities(out);
                }
            }
        }
    }

    /// Applies `f` to every activity leaf, keeping stamps.
    pub fn map_activities(&self, f: &mut impl FnMut(&Activity) -> Activity) -> Expr {
        match self {
            Expr::Act(a) => Expr::Act(f(a)),
            Expr::Stamped(a, d) => Expr::Stamped(f(a), *d),
            _ => {
                let ch = self.children().into_iter().map(|c| c.map_activities(f)).collect();
                self.with_children(ch)
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

/// Numbers activity leaves 1, 2, … left to right.
pub fn enumerate(e: &StaticExpr) -> StaticExpr {
    let mut n = 0;
    e.map_activities(&mut |a| {
        n += 1;
        Activity { numbering: Numbering::Leaf(n), ..a.clone() }
    })
}

/// Drops all timer superscripts; bars are kept.
pub fn strip_timers(e: &Expr) -> Expr {
    match e {
        Expr::Stamped(a, _) => Expr::Act(a.clone()),
        Expr::Act(_) => e.clone(),
        _ => e.with_children(e.children().into_iter().map(strip_timers).collect()),
    }
}

/// Syntax activities split by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActivitySets {
    pub stochastic: Vec<Activity>,
    pub immediate: Vec<Activity>,
    pub waiting: Vec<Activity>,
}

pub fn activity_sets(e: &Expr) -> ActivitySets {
    let mut s = ActivitySets::default();
    for a in e.activities() {
        let bucket = match a.class() {
            KindClass::Stochastic => &mut s.stochastic,
            KindClass::Immediate => &mut s.immediate,
            KindClass::Waiting => &mut s.waiting,
        };
        if !bucket.contains(a) {
            bucket.push(a.clone());
        }
    }
    s
}
