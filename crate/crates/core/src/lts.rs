//! Labelled probabilistic transition systems shared by expression and net
//! semantics.

use std::fmt;

use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::expr::{print_activity, Activity, KindClass};
use crate::rational::{fmt_q, serde_q};
use crate::{Error, Result, Q};

/// Multiset of activities executed in one step (kept sorted).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step(Vec<Activity>);

impl Step {
    pub fn empty() -> Self {
        Step(Vec::new())
    }

    pub fn new(mut acts: Vec<Activity>) -> Self {
        acts.sort();
        Step(acts)
    }

    pub fn single(a: Activity) -> Self {
        Step(vec![a])
    }

    pub fn activities(&self) -> &[Activity] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn plus(&self, other: &Step) -> Step {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Step::new(v)
    }

    pub fn contains(&self, a: &Activity) -> bool {
        self.0.contains(a)
    }

    /// Multiset inclusion `self ⊆ other`.
    pub fn is_submultiset(&self, other: &Step) -> bool {
        let mut rest = other.0.clone();
        for a in &self.0 {
            match rest.iter().position(|b| b == a) {
                Some(i) => {
                    rest.remove(i);
                }
                None => return false,
            }
        }
        true
    }

    /// Kind shared by all activities; `None` for mixed steps. The empty step
    /// counts as stochastic.
    pub fn class(&self) -> Option<KindClass> {
        let mut it = self.0.iter().map(|a| a.class());
        let first = match it.next() {
            None => return Some(KindClass::Stochastic),
            Some(c) => c,
        };
        it.all(|c| c == first).then_some(first)
    }

    pub fn map(&self, f: impl FnMut(&Activity) -> Activity) -> Step {
        Step::new(self.0.iter().map(f).collect())
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(print_activity).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for a in &self.0 {
            seq.serialize_element(&print_activity(a))?;
        }
        seq.end()
    }
}

/// Tangibility tag of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Tag {
    /// s-tangible: only stochastic steps (including the empty one).
    ST,
    /// w-tangible: only waiting steps.
    WT,
    /// vanishing: only immediate steps.
    V,
}

impl Tag {
    pub fn is_tangible(self) -> bool {
        self != Tag::V
    }

    pub fn from_class(c: KindClass) -> Tag {
        match c {
            KindClass::Stochastic => Tag::ST,
            KindClass::Waiting => Tag::WT,
            KindClass::Immediate => Tag::V,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LtsState {
    /// Printable identity of the state (canonical expression or net state).
    pub label: String,
    /// Identity after forgetting timer values; used for aggregation.
    pub timer_free: String,
    pub tag: Tag,
}

#[derive(Clone, Debug, Serialize)]
pub struct LtsTransition {
    pub from: usize,
    pub step: Step,
    #[serde(with = "serde_q")]
    pub prob: Q,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lts {
    pub states: Vec<LtsState>,
    pub initial: usize,
    pub transitions: Vec<LtsTransition>,
}

/// Human-facing name of state `i`: `s1`, `s2`, …
pub fn state_name(i: usize) -> String {
    format!("s{}", i + 1)
}

impl Lts {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn outgoing(&self, s: usize) -> impl Iterator<Item = &LtsTransition> {
        self.transitions.iter().filter(move |t| t.from == s)
    }

    /// PM(s, s̃): total probability of moving from `s` to `t` in one step.
    pub fn pm(&self, s: usize, t: usize) -> Q {
        self.outgoing(s).filter(|tr| tr.to == t).map(|tr| tr.prob.clone()).fold(Q::zero(), |a, b| a + b)
    }

    /// Dense matrix of PM values.
    pub fn pm_matrix(&self) -> Vec<Vec<Q>> {
        let n = self.len();
        let mut m = vec![vec![Q::zero(); n]; n];
        for tr in &self.transitions {
            m[tr.from][tr.to] += &tr.prob;
        }
        m
    }

    pub fn tags(&self) -> Vec<Tag> {
        self.states.iter().map(|s| s.tag).collect()
    }

    /// Indices of states carrying `tag`.
    pub fn with_tag(&self, tag: Tag) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.states[i].tag == tag).collect()
    }

    /// Finds a state by `sN` name or by its printed label.
    pub fn find_state(&self, name: &str) -> Option<usize> {
        if let Some(n) = name.strip_prefix('s').and_then(|d| d.parse::<usize>().ok()) {
            if n >= 1 && n <= self.len() {
                return Some(n - 1);
            }
        }
        self.states.iter().position(|s| s.label == name)
    }

    /// Checks row sums, probability ranges and step homogeneity.
    pub fn validate(&self) -> Result<()> {
        for s in 0..self.len() {
            let mut sum = Q::zero();
            for tr in self.outgoing(s) {
                if tr.prob <= Q::zero() || tr.prob > Q::one() {
                    return Err(Error::Internal(format!("probability {} out of (0;1]", fmt_q(&tr.prob))));
                }
                let class = tr.step.class().ok_or_else(|| Error::Internal(format!("mixed step {}", tr.step)))?;
                if Tag::from_class(class) != self.states[s].tag {
                    return Err(Error::Internal(format!("step {} in a {:?} state", tr.step, self.states[s].tag)));
                }
                sum += &tr.prob;
            }
            if !sum.is_one() {
                return Err(Error::Internal(format!(
                    "outgoing probabilities of {} sum to {}",
                    state_name(s),
                    fmt_q(&sum)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                serde_json::json!({
                    "name": state_name(i),
                    "label": s.label,
                    "timer_free": s.timer_free,
                    "tag": s.tag,
                })
            })
            .collect();
        let trans: Vec<_> = self
            .transitions
            .iter()
            .map(|t| {
                serde_json::json!({
                    "from": state_name(t.from),
                    "step": t.step,
                    "prob": fmt_q(&t.prob),
                    "to": state_name(t.to),
                })
            })
            .collect();
        serde_json::json!({
            "initial": state_name(self.initial),
            "states": states,
            "transitions": trans,
        })
    }

    /// DOT rendering: ovals for s-tangible, double ovals for w-tangible,
    /// boxes for vanishing states.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = match s.tag {
                Tag::ST => "shape=oval",
                Tag::WT => "shape=oval, peripheries=2",
                Tag::V => "shape=box",
            };
            out.push_str(&format!(
                "  {} [{shape}, label=\"{}\", tooltip=\"{}\"];\n",
                state_name(i),
                state_name(i),
                escape(&s.label)
            ));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "  {} -> {} [label=\"{} {}\"];\n",
                state_name(t.from),
                state_name(t.to),
                escape(&t.step.to_string()),
                fmt_q(&t.prob)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            let init = if i == self.initial { " (initial)" } else { "" };
            out.push_str(&format!("{} [{:?}]{init} {}\n", state_name(i), s.tag, s.label));
            for t in self.outgoing(i) {
                out.push_str(&format!("    --{} {}--> {}\n", t.step, fmt_q(&t.prob), state_name(t.to)));
            }
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
