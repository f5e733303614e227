//! States of the operational semantics: structural-equivalence classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::can;
use super::inaction::{closure, is_operative, overlined, stamps};
use crate::expr::{print_dynamic, Activity, Expr, KindClass};
use crate::{Error, Result};

/// Enabled activities of a state, split by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EnabledSets {
    #[serde(serialize_with = "ser_acts")]
    pub stochastic: BTreeSet<Activity>,
    #[serde(serialize_with = "ser_acts")]
    pub immediate: BTreeSet<Activity>,
    #[serde(serialize_with = "ser_acts")]
    pub waiting: BTreeSet<Activity>,
    /// Waiting activities enabled with a fresh timer (value = delay).
    #[serde(serialize_with = "ser_acts")]
    pub waiting_new: BTreeSet<Activity>,
}

fn ser_acts<S: serde::Serializer>(v: &BTreeSet<Activity>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::expr::print_activity))
}

impl EnabledSets {
    pub fn all(&self) -> BTreeSet<Activity> {
        let mut out = self.stochastic.clone();
        out.extend(self.immediate.iter().cloned());
        out.extend(self.waiting.iter().cloned());
        out
    }
}

/// A structural-equivalence class of dynamic expressions.
#[derive(Clone, Debug)]
pub struct State {
    /// Least saturated operative member.
    pub canonical: Expr,
    /// Saturated operative members, sorted.
    pub members: Vec<Expr>,
    /// All operative members, sorted.
    pub operative: Vec<Expr>,
    /// Timer value of every enabled waiting activity.
    pub timers: BTreeMap<Activity, u32>,
    pub enabled: EnabledSets,
    /// The class contains an overlined static expression.
    pub init: bool,
    /// The class contains an underlined static expression.
    pub is_final: bool,
    /// Every operative member is stochastically tangible.
    pub stang: bool,
    /// Every operative member is tangible.
    pub tang: bool,
    /// Size of the whole class (operative or not).
    pub size: usize,
}

fn enabled_sets(operative: &[Expr]) -> EnabledSets {
    let mut en = EnabledSets::default();
    for h in operative {
        for (a, stamp) in overlined(h) {
            match (a.class(), stamp) {
                (KindClass::Stochastic, _) => {
                    en.stochastic.insert(a.clone());
                }
                (KindClass::Immediate, _) => {
                    en.immediate.insert(a.clone());
                }
                (KindClass::Waiting, Some(d)) => {
                    en.waiting.insert(a.clone());
                    if Some(d) == a.kind.delay() {
                        en.waiting_new.insert(a.clone());
                    }
                }
                (KindClass::Waiting, None) => {}
            }
        }
    }
    en
}

impl State {
    /// Builds the class from its full member set.
    pub fn from_members(all: BTreeSet<Expr>) -> Result<State> {
        let size = all.len();
        let is_init = all.iter().any(|e| matches!(e, Expr::Over(x) if x.is_static()));
        let is_final = all.iter().any(|e| matches!(e, Expr::Under(x) if x.is_static()));
        let operative: Vec<Expr> = all.into_iter().filter(is_operative).collect();
        if operative.is_empty() {
            return Err(Error::Internal("equivalence class without operative members".into()));
        }
        let enabled = enabled_sets(&operative);
        let members: Vec<Expr> = operative
            .iter()
            .filter(|h| {
                let st: BTreeSet<&Activity> = stamps(h).into_iter().map(|(a, _)| a).collect();
                enabled.waiting.iter().all(|w| st.contains(w))
            })
            .cloned()
            .collect();
        let canonical = members
            .first()
            .cloned()
            .ok_or_else(|| Error::Internal("equivalence class without saturated members".into()))?;
        let mut timers = BTreeMap::new();
        for h in &members {
            for (a, d) in stamps(h) {
                if !enabled.waiting.contains(a) {
                    continue;
                }
                if let Some(old) = timers.insert(a.clone(), d) {
                    if old != d {
                        return Err(Error::Internal(format!(
                            "inconsistent timer for {} in class of {}",
                            crate::expr::print_activity(a),
                            print_dynamic(&canonical)
                        )));
                    }
                }
            }
        }
        let stang = operative.iter().all(can::stang);
        let tang = operative.iter().all(can::tang);
        Ok(State { canonical, members, operative, timers, enabled, init: is_init, is_final, stang, tang, size })
    }

    /// Class of `g` computed from scratch.
    pub fn of(g: &Expr) -> Result<State> {
        State::from_members(closure([g.clone()]))
    }

    pub fn label(&self) -> String {
        print_dynamic(&self.canonical)
    }
}
