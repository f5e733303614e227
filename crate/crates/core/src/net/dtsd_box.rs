//! Labelled dtsd-boxes and their export formats.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::{print_activity, Activity, Kind, KindClass};
use crate::rational::fmt_q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PlaceKind {
    #[serde(rename = "e")]
    Entry,
    #[serde(rename = "i")]
    Internal,
    #[serde(rename = "x")]
    Exit,
}

impl PlaceKind {
    pub fn symbol(self) -> &'static str {
        match self {
            PlaceKind::Entry => "e",
            PlaceKind::Internal => "i",
            PlaceKind::Exit => "x",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Place {
    pub name: String,
    pub kind: PlaceKind,
}

/// A transition of a plain box: its activity label (with numbering) and
/// arc weights to and from places (by index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub activity: Activity,
    pub pre: BTreeMap<usize, u32>,
    pub post: BTreeMap<usize, u32>,
}

impl Transition {
    /// Name derived from the numbering content, e.g. `t1` or `t1+3`.
    pub fn name(&self) -> String {
        let parts: Vec<String> = self.activity.content().iter().map(|n| n.to_string()).collect();
        format!("t{}", parts.join("+"))
    }

    pub fn class(&self) -> KindClass {
        self.activity.class()
    }
}

/// A plain dtsd-box: places labelled e/i/x and activity-labelled
/// transitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DtsdBox {
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
}

impl DtsdBox {
    pub fn entry_places(&self) -> Vec<usize> {
        self.places_of(PlaceKind::Entry)
    }

    pub fn exit_places(&self) -> Vec<usize> {
        self.places_of(PlaceKind::Exit)
    }

    pub fn places_of(&self, kind: PlaceKind) -> Vec<usize> {
        (0..self.places.len()).filter(|&i| self.places[i].kind == kind).collect()
    }

    pub fn find_transition(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name() == name)
    }

    /// Checks the structural box conditions; returns the violations.
    pub fn structural_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.entry_places().is_empty() {
            v.push("no entry place".to_string());
        }
        if self.exit_places().is_empty() {
            v.push("no exit place".to_string());
        }
        for t in &self.transitions {
            if t.pre.is_empty() || t.post.is_empty() {
                v.push(format!("{} has an empty pre- or postset", t.name()));
            }
            for p in t.post.keys() {
                if self.places[*p].kind == PlaceKind::Entry {
                    v.push(format!("{} puts tokens into entry place {}", t.name(), self.places[*p].name));
                }
            }
            for p in t.pre.keys() {
                if self.places[*p].kind == PlaceKind::Exit {
                    v.push(format!("{} consumes from exit place {}", t.name(), self.places[*p].name));
                }
            }
        }
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let places: Vec<_> = self
            .places
            .iter()
            .enumerate()
            .map(|(i, p)| serde_json::json!({"id": format!("p{}", i + 1), "name": p.name, "label": p.kind}))
            .collect();
        let transitions: Vec<_> = self
            .transitions
            .iter()
            .map(|t| {
                let kind = match &t.activity.kind {
                    Kind::Stochastic(p) => serde_json::json!({"type": "stochastic", "probability": fmt_q(p)}),
                    Kind::Deterministic { delay, weight } => {
                        serde_json::json!({"type": if *delay == 0 { "immediate" } else { "waiting" },
                                           "delay": delay, "weight": fmt_q(weight)})
                    }
                };
                serde_json::json!({
                    "id": t.name(),
                    "multiaction": t.activity.multiaction.to_string(),
                    "kind": kind,
                    "numbering": t.activity.content().into_iter().collect::<Vec<_>>(),
                    "activity": print_activity(&t.activity),
                })
            })
            .collect();
        let mut arcs = Vec::new();
        for t in &self.transitions {
            for (p, w) in &t.pre {
                arcs.push(serde_json::json!({"from": format!("p{}", p + 1), "to": t.name(), "weight": w}));
            }
            for (p, w) in &t.post {
                arcs.push(serde_json::json!({"from": t.name(), "to": format!("p{}", p + 1), "weight": w}));
            }
        }
        serde_json::json!({"places": places, "transitions": transitions, "arcs": arcs})
    }

    /// DOT rendering; deterministic transitions get thick borders.
    pub fn to_dot(&self, name: &str, marking: Option<&[u32]>) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=TB;\n");
        for (i, p) in self.places.iter().enumerate() {
            let tokens = marking.map(|m| m[i]).unwrap_or(0);
            let dots = "•".repeat(tokens as usize);
            out.push_str(&format!(
                "  p{} [shape=circle, label=\"{}\", xlabel=\"{}\"];\n",
                i + 1,
                dots,
                p.kind.symbol()
            ));
        }
        for t in &self.transitions {
            let pen = if t.class() == KindClass::Stochastic { 1 } else { 3 };
            out.push_str(&format!(
                "  \"{}\" [shape=box, penwidth={}, label=\"{}\\n{}\"];\n",
                t.name(),
                pen,
                t.name(),
                print_activity(&t.activity).replace('"', "\\\"")
            ));
            for (p, w) in &t.pre {
                out.push_str(&format!("  p{} -> \"{}\"{};\n", p + 1, t.name(), weight_attr(*w)));
            }
            for (p, w) in &t.post {
                out.push_str(&format!("  \"{}\" -> p{}{};\n", t.name(), p + 1, weight_attr(*w)));
            }
        }
        out.push_str("}\n");
        out
    }
}

fn weight_attr(w: u32) -> String {
    if w == 1 {
        String::new()
    } else {
        format!(" [label=\"{w}\"]")
    }
}
