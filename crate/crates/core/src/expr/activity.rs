use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};

use super::action::{sync_multiactions, Action, Multiaction};
use crate::{Error, Result, Q};

/// Probability of a stochastic activity, or delay and weight of a deterministic one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Stochastic(Q),
    Deterministic { delay: u32, weight: Q },
}

/// Coarse classification used for step homogeneity and tangibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KindClass {
    Stochastic,
    Immediate,
    Waiting,
}

impl Kind {
    pub fn class(&self) -> KindClass {
        match self {
            Kind::Stochastic(_) => KindClass::Stochastic,
            Kind::Deterministic { delay: 0, .. } => KindClass::Immediate,
            Kind::Deterministic { .. } => KindClass::Waiting,
        }
    }

    pub fn delay(&self) -> Option<u32> {
        match self {
            Kind::Deterministic { delay, .. } => Some(*delay),
            Kind::Stochastic(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Kind::Stochastic(p) if *p <= Q::zero() || *p >= Q::one() => {
                Err(Error::Invalid(format!("probability must lie in (0;1), got {}", crate::rational::fmt_q(p))))
            }
            Kind::Deterministic { weight, .. } if *weight <= Q::zero() => {
                Err(Error::Invalid(format!("weight must be positive, got {}", crate::rational::fmt_q(weight))))
            }
            _ => Ok(()),
        }
    }
}

/// Tree-shaped numbering of an activity; products of synchronization get pairs.
///
/// `Leaf(0)` marks an activity that has not been enumerated yet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Numbering {
    Leaf(u32),
    Pair(Box<Numbering>, Box<Numbering>),
}

impl Numbering {
    /// The set of leaf values.
    pub fn content(&self) -> BTreeSet<u32> {
        let mut s = BTreeSet::new();
        self.collect(&mut s);
        s
    }

    fn collect(&self, s: &mut BTreeSet<u32>) {
        match self {
            Numbering::Leaf(n) => {
                s.insert(*n);
            }
            Numbering::Pair(a, b) => {
                a.collect(s);
                b.collect(s);
            }
        }
    }

    pub fn leaf(&self) -> Option<u32> {
        match self {
            Numbering::Leaf(n) => Some(*n),
            Numbering::Pair(..) => None,
        }
    }
}

/// A multiaction with its probability or delay/weight and numbering.
///
/// Equality, ordering and hashing look at the multiaction, the kind and the
/// numbering *content*, so synchronization products built in different
/// orders are identified.
#[derive(Clone, Debug)]
pub struct Activity {
    pub multiaction: Multiaction,
    pub kind: Kind,
    pub numbering: Numbering,
}

impl Activity {
    pub fn new(multiaction: Multiaction, kind: Kind) -> Self {
        Activity { multiaction, kind, numbering: Numbering::Leaf(0) }
    }

    pub fn class(&self) -> KindClass {
        self.kind.class()
    }

    pub fn content(&self) -> BTreeSet<u32> {
        self.numbering.content()
    }

    pub fn probability(&self) -> Option<&Q> {
        match &self.kind {
            Kind::Stochastic(p) => Some(p),
            Kind::Deterministic { .. } => None,
        }
    }

    pub fn weight(&self) -> Option<&Q> {
        match &self.kind {
            Kind::Deterministic { weight, .. } => Some(weight),
            Kind::Stochastic(_) => None,
        }
    }

    fn key(&self) -> (&Multiaction, &Kind, BTreeSet<u32>) {
        (&self.multiaction, &self.kind, self.content())
    }

    /// Can `self` and `other` synchronize on `a` (in either direction)?
    pub fn can_sync(&self, other: &Activity, a: &Action) -> bool {
        let a = a.base();
        let ah = a.conjugate();
        let acts = (self.multiaction.contains(&a) && other.multiaction.contains(&ah))
            || (self.multiaction.contains(&ah) && other.multiaction.contains(&a));
        let kinds = match (&self.kind, &other.kind) {
            (Kind::Stochastic(_), Kind::Stochastic(_)) => true,
            (Kind::Deterministic { delay: d1, .. }, Kind::Deterministic { delay: d2, .. }) => d1 == d2,
            _ => false,
        };
        acts && kinds && self.content().is_disjoint(&other.content())
    }
}

impl PartialEq for Activity {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Activity {}

impl Ord for Activity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Activity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Activity {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

/// Synchronization product of two activities on `a`.
pub fn sync_activities(u: &Activity, v: &Activity, a: &Action) -> Result<Activity> {
    let multiaction = sync_multiactions(&u.multiaction, &v.multiaction, a)?;
    let kind = match (&u.kind, &v.kind) {
        (Kind::Stochastic(p), Kind::Stochastic(r)) => Kind::Stochastic(p * r),
        (Kind::Deterministic { delay: d1, weight: l }, Kind::Deterministic { delay: d2, weight: m }) if d1 == d2 => {
            Kind::Deterministic { delay: *d1, weight: l + m }
        }
        _ => return Err(Error::Invalid("activities of different kinds or delays cannot synchronize".into())),
    };
    if !u.content().is_disjoint(&v.content()) {
        return Err(Error::Invalid("an activity cannot synchronize with itself".into()));
    }
    Ok(Activity {
        multiaction,
        kind,
        numbering: Numbering::Pair(Box::new(u.numbering.clone()), Box::new(v.numbering.clone())),
    })
}
