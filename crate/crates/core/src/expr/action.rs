use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Reserved action used by `stop`; it cannot be written in the input grammar.
pub const STOP_ACTION: &str = "__stop";

/// An action or its conjugate `~a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub name: String,
    pub conjugated: bool,
}

impl Action {
    pub fn new(name: &str) -> Self {
        Action { name: name.to_string(), conjugated: false }
    }

    pub fn hat(name: &str) -> Self {
        Action { name: name.to_string(), conjugated: true }
    }

    pub fn conjugate(&self) -> Self {
        Action { name: self.name.clone(), conjugated: !self.conjugated }
    }

    /// The non-conjugated action with the same name.
    pub fn base(&self) -> Self {
        Action::new(&self.name)
    }
}

// Plain actions sort before conjugates, then by name.
impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.conjugated, &self.name).cmp(&(other.conjugated, &other.name))
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjugated {
            write!(f, "~{}", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// Finite multiset of actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiaction(BTreeMap<Action, u32>);

impl Multiaction {
    pub fn empty() -> Self {
        Multiaction(BTreeMap::new())
    }

    pub fn from_actions<I: IntoIterator<Item = Action>>(it: I) -> Self {
        let mut m = Multiaction::empty();
        for a in it {
            m.add(a, 1);
        }
        m
    }

    pub fn add(&mut self, a: Action, n: u32) {
        if n > 0 {
            *self.0.entry(a).or_insert(0) += n;
        }
    }

    /// Removes one occurrence; returns false if absent.
    pub fn remove_one(&mut self, a: &Action) -> bool {
        match self.0.get_mut(a) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.0.remove(a);
                true
            }
            None => false,
        }
    }

    pub fn count(&self, a: &Action) -> u32 {
        self.0.get(a).copied().unwrap_or(0)
    }

    pub fn contains(&self, a: &Action) -> bool {
        self.count(a) > 0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |α|, counting multiplicities.
    pub fn cardinality(&self) -> u32 {
        self.0.values().sum()
    }

    /// Entries in canonical order with multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = (&Action, u32)> {
        self.0.iter().map(|(a, c)| (a, *c))
    }

    pub fn sum(&self, other: &Multiaction) -> Multiaction {
        let mut m = self.clone();
        for (a, c) in other.iter() {
            m.add(a.clone(), c);
        }
        m
    }

    /// True if `a` or its conjugate occurs.
    pub fn mentions(&self, name: &str) -> bool {
        self.contains(&Action::new(name)) || self.contains(&Action::hat(name))
    }

    /// Applies a renaming of action names, keeping conjugation.
    pub fn rename(&self, f: impl Fn(&str) -> String) -> Multiaction {
        let mut m = Multiaction::empty();
        for (a, c) in self.iter() {
            m.add(Action { name: f(&a.name), conjugated: a.conjugated }, c);
        }
        m
    }
}

impl fmt::Display for Multiaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (a, c) in self.iter() {
            for _ in 0..c {
                if !first {
                    f.write_str(",")?;
                }
                first = false;
                write!(f, "{a}")?;
            }
        }
        f.write_str("}")
    }
}

/// α ⊕ₐ β: the sum with one `a` and one `~a` removed.
pub fn sync_multiactions(alpha: &Multiaction, beta: &Multiaction, a: &Action) -> Result<Multiaction> {
    let a = a.base();
    let ah = a.conjugate();
    let ok = (alpha.contains(&a) && beta.contains(&ah)) || (alpha.contains(&ah) && beta.contains(&a));
    if !ok {
        return Err(Error::Invalid(format!("{alpha} and {beta} cannot synchronize on {a}")));
    }
    let mut m = alpha.sum(beta);
    m.remove_one(&a);
    m.remove_one(&ah);
    Ok(m)
}
