//! Example expressions shared by the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

use dtsd_core::expr::{parse_static_with, Expr};
use dtsd_core::lts::Tag;
use dtsd_core::opsem::{State, Ts};
use dtsd_core::rational::parse_rational;
use dtsd_core::Q;

/// A worked example with its expected states. Each state is identified by a
/// signature: the enabled activity leaves with the timer values of the
/// waiting ones (e.g. `"1^2 3"`), independent of exploration order.
pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    pub states: &'static [(&'static str, Tag)],
}

pub const TRAVEL: &str = "[({a},$rho)*(({b},#1:$k);((({c},#0:$l);({d},$theta))[](({e},#0:$m);({f},$phi))))*stop]";

use Tag::{ST, V, WT};

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "tschowm",
        source: "({a},#2:1)[]({b},#3:2)",
        states: &[("1^2 2^3", ST), ("1^1 2^2", WT), ("", ST)],
    },
    Fixture {
        name: "tschowsm",
        source: "({a},#3:1)[]({b},1/3)",
        states: &[("1^3 2", ST), ("1^2 2", ST), ("1^1 2", WT), ("", ST)],
    },
    Fixture {
        name: "tsitswm",
        source: "[({a},1/2)*({b},#3:1)*({c},1/3)]",
        states: &[("1", ST), ("2^3 3", ST), ("2^2 3", ST), ("2^1 3", WT), ("", ST)],
    },
    Fixture {
        name: "tspariwm",
        source: "({a},#0:1)||({b},#2:2)||({c},#3:3)",
        states: &[("1 2^2 3^3", V), ("2^2 3^3", ST), ("2^1 3^2", WT), ("3^1", WT), ("", ST)],
    },
    Fixture {
        name: "tsparwsm",
        source: "({a},#3:1)||({b},1/3)",
        states: &[("1^3 2", ST), ("1^2 2", ST), ("1^2", ST), ("1^1 2", WT), ("1^1", WT), ("2", ST), ("", ST)],
    },
    Fixture {
        name: "tsparsyrswm",
        source: "(({a},#2:1)||({~a},#2:2)) sy a rs a",
        states: &[("1^2 2^2", ST), ("1^1 2^1", WT), ("", ST)],
    },
    Fixture {
        name: "tsparsyrsiwm",
        source: "((({a},#1:1);({b,~x},#0:2))||(({x},#0:3)[]({c},#1:4))) sy x rs x",
        states: &[("1^1 3 4^1", WT), ("2", ST)],
    },
    Fixture {
        name: "tsparsyrswwm",
        source: "((({a},#2:1);({b,~x},#2:2))||(({x},#2:3)[]({c},#2:4))) sy x rs x",
        states: &[("1^2 3^2 4^2", ST), ("1^1 3^1 4^1", WT), ("2^2", ST), ("2^1", ST)],
    },
    Fixture {
        name: "tsparsywwm",
        source: "((({a},#2:1);({b,~x},#2:2))||(({x},#2:3)[]({c},#2:4))) sy x",
        states: &[("1^2 3^2 4^2", ST), ("1^1 3^1 4^1", WT), ("2^2", ST), ("2^1", WT), ("", ST)],
    },
    Fixture {
        name: "tsitchoswm",
        source: "[({a},1/2)*(({b},#1:1)[](({c},#1:2);({d},1/3)))*stop]",
        states: &[("1", ST), ("2^1 3^1 5", WT), ("4", ST)],
    },
    Fixture {
        name: "tsitchoswim",
        source: TRAVEL,
        states: &[("1", ST), ("2^1 7", WT), ("3 5", V), ("4", ST), ("6", ST)],
    },
];

/// Signature of a state: enabled leaves (sorted) with waiting timers.
pub fn signature(s: &State) -> String {
    let mut parts: Vec<(u32, String)> = s
        .enabled
        .all()
        .iter()
        .map(|a| {
            let n = a.content().into_iter().next().unwrap_or(0);
            let txt = match s.timers.get(a) {
                Some(d) => format!("{n}^{d}"),
                None => n.to_string(),
            };
            (n, txt)
        })
        .collect();
    parts.sort();
    parts.into_iter().map(|(_, t)| t).collect::<Vec<_>>().join(" ")
}

/// Checks the state count and the tag of every expected state; returns a
/// description of the first discrepancy.
pub fn check_shape(f: &Fixture, ts: &Ts) -> Result<(), String> {
    if ts.states.len() != f.states.len() {
        return Err(format!("{} states, expected {}", ts.states.len(), f.states.len()));
    }
    let tags = ts.lts.tags();
    let mut seen = Vec::new();
    for (sig, tag) in f.states {
        let hits: Vec<usize> = (0..ts.states.len()).filter(|&i| signature(&ts.states[i]) == *sig).collect();
        if hits.len() != 1 {
            return Err(format!("signature {sig:?} matched {} states", hits.len()));
        }
        if tags[hits[0]] != *tag {
            return Err(format!("state {sig:?} tagged {:?}, expected {:?}", tags[hits[0]], tag));
        }
        seen.push(hits[0]);
    }
    if (0..ts.states.len()).any(|i| !seen.contains(&i)) {
        return Err("unmatched state".into());
    }
    Ok(())
}

pub fn params(pairs: &[(&str, &str)]) -> HashMap<String, Q> {
    pairs.iter().map(|(k, v)| (k.to_string(), parse_rational(v).unwrap())).collect()
}

/// Travel-system parameters used by the chain checks.
pub fn travel_params() -> HashMap<String, Q> {
    params(&[("rho", "1/2"), ("k", "1"), ("l", "1"), ("m", "2"), ("theta", "1/2"), ("phi", "1/3")])
}

/// Travel-system parameters used by the index checks (l = m, θ = φ = 1/2).
pub fn travel_params_sym() -> HashMap<String, Q> {
    params(&[("rho", "1/2"), ("k", "1"), ("l", "1"), ("m", "1"), ("theta", "1/2"), ("phi", "1/2")])
}

pub fn parse_fixture(f: &Fixture) -> Expr {
    parse_static_with(f.source, &travel_params()).unwrap()
}

/// Random regular expressions for the property suites.
pub mod gen {
    use proptest::prelude::*;

    fn multiaction(sync: bool) -> BoxedStrategy<&'static str> {
        if sync {
            prop::sample::select(vec!["{a}", "{~a}", "{b}", "{a,b}", "{~a,b}", "{}"]).boxed()
        } else {
            prop::sample::select(vec!["{a}", "{b}", "{c}", "{a,b}", "{}"]).boxed()
        }
    }

    fn kind() -> impl Strategy<Value = String> {
        prop_oneof![
            prop::sample::select(vec!["1/2", "1/3", "2/3", "1/4"]).prop_map(str::to_string),
            (0u32..=3, 1u32..=3).prop_map(|(d, w)| format!("#{d}:{w}")),
        ]
    }

    fn activity(sync: bool) -> impl Strategy<Value = String> {
        (multiaction(sync), kind()).prop_map(|(m, k)| format!("({m},{k})"))
    }

    /// Expressions without top-level parallelism (iteration arguments).
    fn seqlike(sync: bool) -> BoxedStrategy<String> {
        activity(sync)
            .prop_recursive(2, 3, 2, move |inner| {
                prop_oneof![
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a};{b})")),
                    (inner.clone(), inner).prop_map(|(a, b)| format!("({a}[]{b})")),
                ]
            })
            .boxed()
    }

    /// Regular expressions; `sync` adds conjugated actions, `sy` and `rs`.
    pub fn expr(sync: bool) -> BoxedStrategy<String> {
        let leaf = activity(sync).boxed();
        let rec = leaf.prop_recursive(3, 4, 3, move |inner| {
            let mut options: Vec<BoxedStrategy<String>> = vec![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a};{b})")).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}[]{b})")).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}||{b})")).boxed(),
                (seqlike(sync), seqlike(sync), prop_oneof![Just("stop".to_string()), inner.clone()])
                    .prop_map(|(a, b, c)| format!("[{a}*{b}*{c}]"))
                    .boxed(),
            ];
            if sync {
                options.push(inner.clone().prop_map(|a| format!("({a} sy a)")).boxed());
                options.push(inner.prop_map(|a| format!("(({a} sy a) rs a)")).boxed());
            }
            prop::strategy::Union::new(options)
        });
        rec.prop_filter("at most 4 activities", |s| activities(s) <= 4).boxed()
    }

    /// Number of activity occurrences in an expression text.
    pub fn activities(s: &str) -> usize {
        s.matches("({").count()
    }
}

/// Invariants of a built transition system: PT sums, kind homogeneity,
/// waiting maximality, downward closure and timer ranges.
pub fn check_ts_invariants(ts: &Ts) -> Result<(), String> {
    use dtsd_core::lts::Step;
    use num_traits::{One, Zero};
    let lts = &ts.lts;
    for s in 0..lts.len() {
        let out: Vec<_> = lts.outgoing(s).collect();
        let sum = out.iter().fold(Q::zero(), |a, t| a + &t.prob);
        if !sum.is_one() {
            return Err(format!("s{}: PT sums to {sum}", s + 1));
        }
        let tag = lts.states[s].tag;
        for t in &out {
            match t.step.class() {
                Some(c) if Tag::from_class(c) == tag => {}
                _ => return Err(format!("s{}: step {} in a {tag:?} state", s + 1, t.step)),
            }
        }
        let steps: Vec<&Step> = out.iter().map(|t| &t.step).collect();
        match tag {
            Tag::WT => {
                for u in &steps {
                    if u.is_empty() {
                        return Err(format!("s{}: empty waiting step", s + 1));
                    }
                    if steps.iter().any(|v| v != u && u.is_submultiset(v)) {
                        return Err(format!("s{}: waiting step {u} is not maximal", s + 1));
                    }
                }
            }
            Tag::ST | Tag::V => {
                for u in &steps {
                    let acts = u.activities();
                    for mask in 0..(1u32 << acts.len()) {
                        let sub = Step::new(
                            (0..acts.len()).filter(|i| mask & (1 << i) != 0).map(|i| acts[i].clone()).collect(),
                        );
                        if sub.is_empty() && tag == Tag::V {
                            continue;
                        }
                        if !steps.contains(&&sub) {
                            return Err(format!("s{}: {sub} ⊆ {u} is not executable", s + 1));
                        }
                    }
                }
            }
        }
    }
    for st in &ts.states {
        for (a, v) in &st.timers {
            let d = a.kind.delay().unwrap_or(0);
            if *v < 1 || *v > d {
                return Err(format!("timer {v} of {} outside 1..{d}", dtsd_core::expr::print_activity(a)));
            }
        }
    }
    Ok(())
}

/// Three-route φ agreement, required whenever the DTMC has a single closed
/// class. Degenerate (absorbing) chains have no EDTMC route; the others
/// must still agree.
pub fn check_phi_agreement(lts: &dtsd_core::lts::Lts) -> Result<bool, String> {
    use dtsd_core::markov::{closed_classes, dtmc, PhiRoutes};
    if closed_classes(&dtmc(lts)).len() != 1 {
        return Ok(false);
    }
    let routes = PhiRoutes::compute(lts);
    if let Err(e @ dtsd_core::Error::Internal(_)) = routes.agreed() {
        return Err(e.to_string());
    }
    for (name, r) in [("EDTMC", &routes.via_edtmc), ("DTMC", &routes.via_dtmc), ("RDTMC", &routes.via_rdtmc)] {
        if let Err(e @ dtsd_core::Error::Internal(_)) = r {
            return Err(format!("{name}: {e}"));
        }
    }
    Ok(true)
}
