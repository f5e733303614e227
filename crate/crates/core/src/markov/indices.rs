//! Performance indices over the SMC steady state, and timer-free
//! aggregation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::chain::{Pmf, Sojourn, Time};
use crate::expr::{print_activity, Activity};
use crate::lts::{state_name, Lts};
use crate::rational::{fmt_q, parse_rational};
use crate::{Error, Result, Q};

/// One performance-index query. States are named `sN` or by their printed
/// label; activities by their printed form (`({a},1/2)_1`) or numbering
/// content (`1`, `1+3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Query {
    ReturnTime { state: String },
    TimeFract { states: Vec<String> },
    RltTimeFract { states: Vec<String>, relative_to: Vec<String> },
    ExitFreq { state: String },
    ActsProb { activities: Vec<String> },
    ExecFreq { activity: String },
    Reward { rewards: BTreeMap<String, String> },
}

/// A query file: `[[index]]` tables, each with a `kind` and its arguments.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    #[serde(default)]
    pub index: Vec<Query>,
}

impl Query {
    pub fn describe(&self) -> String {
        match self {
            Query::ReturnTime { state } => format!("ReturnTime({state})"),
            Query::TimeFract { states } => format!("TimeFract({{{}}})", states.join(",")),
            Query::RltTimeFract { states, relative_to } => {
                format!("RltTimeFract({{{}}},{{{}}})", states.join(","), relative_to.join(","))
            }
            Query::ExitFreq { state } => format!("ExitFreq({state})"),
            Query::ActsProb { activities } => format!("ActsProb({{{}}})", activities.join(",")),
            Query::ExecFreq { activity } => format!("ExecFreq({activity})"),
            Query::Reward { .. } => "Prob(r)".to_string(),
        }
    }
}

fn state(lts: &Lts, name: &str) -> Result<usize> {
    lts.find_state(name).ok_or_else(|| Error::Invalid(format!("unknown state `{name}`")))
}

fn sum_phi(lts: &Lts, phi: &Pmf, names: &[String]) -> Result<Q> {
    let mut seen = Vec::new();
    let mut acc = Q::zero();
    for n in names {
        let s = state(lts, n)?;
        if !seen.contains(&s) {
            seen.push(s);
            acc += phi.get(s);
        }
    }
    Ok(acc)
}

fn matches_activity(a: &Activity, name: &str) -> bool {
    let content: Vec<String> = a.content().iter().map(|x| x.to_string()).collect();
    print_activity(a) == name || content.join("+") == name
}

fn activity(lts: &Lts, name: &str) -> Result<Activity> {
    lts.transitions
        .iter()
        .flat_map(|t| t.step.activities())
        .find(|a| matches_activity(a, name))
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("unknown activity `{name}`")))
}

/// φ(s)/SJ(s), taking 0 where φ(s) = 0 (vanishing states) or SJ(s) = ∞.
fn exit_rate(phi: &Q, sj: &Time) -> Result<Q> {
    if phi.is_zero() {
        return Ok(Q::zero());
    }
    match sj {
        Time::Infinite => Ok(Q::zero()),
        Time::Finite(x) if x.is_zero() => Err(Error::Internal("positive φ on a state with SJ = 0".into())),
        Time::Finite(x) => Ok(phi / x),
    }
}

/// Evaluates one index from φ and SJ.
pub fn evaluate(lts: &Lts, phi: &Pmf, soj: &Sojourn, query: &Query) -> Result<Q> {
    match query {
        Query::ReturnTime { state: name } => {
            let s = state(lts, name)?;
            let p = phi.get(s);
            if p.is_zero() {
                return Err(Error::Invalid(format!("{} has zero steady-state probability", state_name(s))));
            }
            Ok(p.recip())
        }
        Query::TimeFract { states } => sum_phi(lts, phi, states),
        Query::RltTimeFract { states, relative_to } => {
            let den = sum_phi(lts, phi, relative_to)?;
            if den.is_zero() {
                return Err(Error::Invalid("reference state set has zero residence time".into()));
            }
            Ok(sum_phi(lts, phi, states)? / den)
        }
        Query::ExitFreq { state: name } => {
            let s = state(lts, name)?;
            match &soj.sj[s] {
                Time::Finite(x) if x.is_zero() => {
                    Err(Error::Invalid(format!("ExitFreq undefined: {} has zero sojourn time", state_name(s))))
                }
                Time::Infinite => Ok(Q::zero()),
                Time::Finite(x) => Ok(phi.get(s) / x),
            }
        }
        Query::ActsProb { activities } => {
            let xi: Vec<Activity> = activities.iter().map(|n| activity(lts, n)).collect::<Result<_>>()?;
            let xi = crate::lts::Step::new(xi);
            let mut acc = Q::zero();
            for t in &lts.transitions {
                if xi.is_submultiset(&t.step) {
                    acc += phi.get(t.from) * &t.prob;
                }
            }
            Ok(acc)
        }
        Query::ExecFreq { activity: name } => {
            let a = activity(lts, name)?;
            let mut acc = Q::zero();
            for t in &lts.transitions {
                if t.step.contains(&a) {
                    acc += exit_rate(&phi.get(t.from), &soj.sj[t.from])? * &t.prob;
                }
            }
            Ok(acc)
        }
        Query::Reward { rewards } => {
            let mut acc = Q::zero();
            let mut seen = Vec::new();
            for (name, r) in rewards {
                let s = state(lts, name)?;
                if seen.contains(&s) {
                    return Err(Error::Invalid(format!("reward for {} given twice", state_name(s))));
                }
                seen.push(s);
                let r = parse_rational(r)?;
                if r < Q::zero() || r > Q::one() {
                    return Err(Error::Invalid(format!("reward {} for {name} outside [0,1]", fmt_q(&r))));
                }
                acc += phi.get(s) * r;
            }
            Ok(acc)
        }
    }
}

/// Sums over one timer-free state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AggregateRow {
    pub timer_free: String,
    pub members: Vec<usize>,
    pub sj: Time,
    pub var: Time,
    #[serde(with = "crate::rational::serde_q")]
    pub phi: Q,
}

/// Groups states by their timer-free label (first-occurrence order) and
/// sums SJ, VAR and φ.
pub fn timer_free_aggregate(lts: &Lts, phi: &Pmf, soj: &Sojourn) -> Vec<AggregateRow> {
    let mut rows: Vec<AggregateRow> = Vec::new();
    for (s, st) in lts.states.iter().enumerate() {
        let row = match rows.iter_mut().position(|r| r.timer_free == st.timer_free) {
            Some(i) => &mut rows[i],
            None => {
                rows.push(AggregateRow {
                    timer_free: st.timer_free.clone(),
                    members: Vec::new(),
                    sj: Time::Finite(Q::zero()),
                    var: Time::Finite(Q::zero()),
                    phi: Q::zero(),
                });
                rows.last_mut().unwrap()
            }
        };
        row.members.push(s);
        row.sj = Time::sum([&row.sj, &soj.sj[s]]);
        row.var = Time::sum([&row.var, &soj.var[s]]);
        row.phi += phi.get(s);
    }
    rows
}
