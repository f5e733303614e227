//! DTMC, EDTMC and RDTMC of a transition system and their steady states.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Serialize, Serializer};

use super::matrix::{self, Matrix};
use crate::lts::{state_name, Lts};
use crate::rational::{fmt_q, serde_qmat, serde_qvec};
use crate::{Error, Result, Q};

/// A mean or variance that may be infinite (absorbing states).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Time {
    Finite(Q),
    Infinite,
}

impl Time {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Time::Finite(q) => Some(q),
            Time::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Time::Finite(q) if q.is_zero())
    }

    pub fn sum<'a>(it: impl IntoIterator<Item = &'a Time>) -> Time {
        let mut acc = Q::zero();
        for t in it {
            match t {
                Time::Finite(q) => acc += q,
                Time::Infinite => return Time::Infinite,
            }
        }
        Time::Finite(acc)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::Finite(q) => f.write_str(&fmt_q(q)),
            Time::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Per-state sojourn time mean, variance and self-loop abstraction factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sojourn {
    pub sj: Vec<Time>,
    pub var: Vec<Time>,
    #[serde(with = "serde_qvec")]
    pub sl: Vec<Q>,
}

/// SJ, VAR and SL of every state of `lts`.
pub fn sojourn(lts: &Lts) -> Sojourn {
    let n = lts.len();
    let mut out = Sojourn { sj: Vec::with_capacity(n), var: Vec::with_capacity(n), sl: Vec::with_capacity(n) };
    for s in 0..n {
        let loop_p = lts.pm(s, s);
        let stay = Q::one() - &loop_p;
        let sl = if loop_p.is_zero() || stay.is_zero() { Q::one() } else { stay.recip() };
        let (sj, var) = if !lts.states[s].tag.is_tangible() {
            (Time::Finite(Q::zero()), Time::Finite(Q::zero()))
        } else if stay.is_zero() {
            (Time::Infinite, Time::Infinite)
        } else {
            let var = &loop_p / (&stay * &stay);
            (Time::Finite(stay.recip()), Time::Finite(var))
        };
        out.sj.push(sj);
        out.var.push(var);
        out.sl.push(sl);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ChainKind {
    Dtmc,
    Edtmc,
    Rdtmc,
}

/// Square transition matrix over an ordered sublist of LTS states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainModel {
    pub kind: ChainKind,
    /// LTS indices of the chain states, in matrix order.
    pub states: Vec<usize>,
    #[serde(with = "serde_qmat")]
    pub tpm: Matrix,
    /// Matrix index of the initial state.
    pub initial: usize,
}

impl ChainModel {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.states.iter().map(|&s| state_name(s)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("chain serializes");
        v["names"] = serde_json::json!(self.names());
        v
    }

    /// Matrix as CSV with a header row and a leading name column.
    pub fn to_csv(&self) -> String {
        let names = self.names();
        let mut out = format!("state,{}\n", names.join(","));
        for (name, row) in names.iter().zip(&self.tpm) {
            let cells: Vec<String> = row.iter().map(fmt_q).collect();
            out.push_str(&format!("{name},{}\n", cells.join(",")));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let names = self.names();
        let mut out = format!("{:?} over {} states (initial {})\n", self.kind, self.len(), names[self.initial]);
        for (name, row) in names.iter().zip(&self.tpm) {
            let cells: Vec<String> = row.iter().map(fmt_q).collect();
            out.push_str(&format!("  {name}: {}\n", cells.join(" ")));
        }
        out
    }

    /// Checks row sums and, for the EDTMC, the zero diagonal.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.tpm.iter().enumerate() {
            if row.iter().any(|x| *x < Q::zero()) {
                return Err(Error::Internal(format!("negative entry in row {i}")));
            }
            let sum: Q = row.iter().fold(Q::zero(), |a, b| a + b);
            let ok = match self.kind {
                ChainKind::Edtmc => (sum.is_one() || sum.is_zero()) && row[i].is_zero(),
                _ => sum.is_one(),
            };
            if !ok {
                return Err(Error::Internal(format!("{:?} row {} sums to {}", self.kind, i, fmt_q(&sum))));
            }
        }
        Ok(())
    }
}

/// Probability vector over a list of LTS states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pmf {
    pub states: Vec<usize>,
    #[serde(with = "serde_qvec")]
    pub values: Vec<Q>,
}

impl Pmf {
    pub fn get(&self, lts_state: usize) -> Q {
        self.states.iter().position(|&s| s == lts_state).map_or_else(Q::zero, |i| self.values[i].clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names: Vec<String> = self.states.iter().map(|&s| state_name(s)).collect();
        let values: Vec<String> = self.values.iter().map(fmt_q).collect();
        serde_json::json!({ "states": names, "values": values })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("state,probability\n");
        for (&s, v) in self.states.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", state_name(s), fmt_q(v)));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> =
            self.states.iter().zip(&self.values).map(|(&s, v)| format!("{}={}", state_name(s), fmt_q(v))).collect();
        parts.join(" ")
    }
}

/// Stationary PMF with the closed class it lives on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SteadyState {
    pub pmf: Pmf,
    /// LTS indices of the unique closed class.
    pub closed_class: Vec<usize>,
    /// gcd of the cycle lengths in the closed class; 1 means aperiodic, so
    /// the stationary PMF is also the limiting one.
    pub period: u64,
}

/// P: PM(sᵢ, sⱼ) over all states.
pub fn dtmc(lts: &Lts) -> ChainModel {
    ChainModel { kind: ChainKind::Dtmc, states: (0..lts.len()).collect(), tpm: lts.pm_matrix(), initial: lts.initial }
}

/// P*: self-loops abstracted away by SL; absorbing states get a zero row.
pub fn edtmc(lts: &Lts) -> (ChainModel, Sojourn) {
    let soj = sojourn(lts);
    let mut tpm = lts.pm_matrix();
    for (i, row) in tpm.iter_mut().enumerate() {
        row[i] = Q::zero();
        for x in row.iter_mut() {
            *x *= &soj.sl[i];
        }
    }
    let c = ChainModel { kind: ChainKind::Edtmc, states: (0..lts.len()).collect(), tpm, initial: lts.initial };
    (c, soj)
}

/// Closed communicating classes of the chain graph (matrix indices). A zero
/// row counts as an absorbing state.
pub fn closed_classes(c: &ChainModel) -> Vec<Vec<usize>> {
    let n = c.len();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (i, row) in c.tpm.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|scc| {
            let mut v: Vec<usize> = scc.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|class| {
            class.iter().all(|&i| c.tpm[i].iter().enumerate().all(|(j, x)| x.is_zero() || class.contains(&j)))
        })
        .collect();
    classes.sort();
    classes
}

fn period(tpm: &Matrix, class: &[usize]) -> u64 {
    let pos = |s: usize| class.iter().position(|&x| x == s);
    let mut level = vec![None::<u64>; class.len()];
    level[0] = Some(0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        let row = &tpm[class[u]];
        let succ: Vec<usize> = if row.iter().all(Q::is_zero) {
            vec![u]
        } else {
            row.iter().enumerate().filter(|(_, x)| !x.is_zero()).filter_map(|(j, _)| pos(j)).collect()
        };
        for v in succ {
            edges.push((u, v));
            if level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    edges.into_iter().fold(0u64, |g, (u, v)| {
        let d = (level[u].unwrap() as i64 + 1 - level[v].unwrap() as i64).unsigned_abs();
        g.gcd(&d)
    })
}

/// Stationary PMF of a chain with a single closed class.
pub fn steady_state(c: &ChainModel) -> Result<SteadyState> {
    let classes = closed_classes(c);
    if classes.len() != 1 {
        let names: Vec<String> = classes
            .iter()
            .map(|cl| {
                let v: Vec<String> = cl.iter().map(|&i| state_name(c.states[i])).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        return Err(Error::Chain(format!(
            "{} closed communicating classes {}; a single one is required",
            classes.len(),
            names.join(" ")
        )));
    }
    let class = &classes[0];
    let mut sub = matrix::select(&c.tpm, class, class);
    for (i, row) in sub.iter_mut().enumerate() {
        if row.iter().all(Q::is_zero) {
            row[i] = Q::one();
        }
    }
    let v = matrix::stationary(&sub)
        .ok_or_else(|| Error::Internal("singular stationary system on a closed class".into()))?;
    let mut values = vec![Q::zero(); c.len()];
    for (&i, x) in class.iter().zip(v) {
        values[i] = x;
    }
    Ok(SteadyState {
        pmf: Pmf { states: c.states.clone(), values },
        closed_class: class.iter().map(|&i| c.states[i]).collect(),
        period: period(&c.tpm, class),
    })
}

fn normalize_tangible(lts: &Lts, weights: Vec<Q>) -> Result<Pmf> {
    let total: Q = weights.iter().fold(Q::zero(), |a, b| a + b);
    if total.is_zero() {
        return Err(Error::Chain("the closed class contains only vanishing states".into()));
    }
    let values = weights.into_iter().map(|w| w / &total).collect();
    Ok(Pmf { states: (0..lts.len()).collect(), values })
}

/// φ from the EDTMC: ψ*·SJ normalized over tangible states.
pub fn smc_pmf(lts: &Lts) -> Result<Pmf> {
    let (c, soj) = edtmc(lts);
    let psi_star = steady_state(&c)?.pmf;
    let mut weights = Vec::with_capacity(lts.len());
    for (s, p) in psi_star.values.iter().enumerate() {
        match &soj.sj[s] {
            Time::Infinite if !p.is_zero() => {
                return Err(Error::Chain(format!(
                    "degenerate semi-Markov chain: absorbing state {} has infinite sojourn time",
                    state_name(s)
                )))
            }
            Time::Infinite => weights.push(Q::zero()),
            Time::Finite(sj) => weights.push(p * sj),
        }
    }
    normalize_tangible(lts, weights)
}

/// φ from the DTMC: ψ renormalized over tangible states.
pub fn smc_pmf_via_dtmc(lts: &Lts) -> Result<Pmf> {
    let psi = steady_state(&dtmc(lts))?.pmf;
    let weights = psi
        .values
        .into_iter()
        .enumerate()
        .map(|(s, p)| if lts.states[s].tag.is_tangible() { p } else { Q::zero() })
        .collect();
    normalize_tangible(lts, weights)
}

/// Blocks of P after the stable vanishing-first reordering.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub vanishing: Vec<usize>,
    pub tangible: Vec<usize>,
    pub c: Matrix,
    pub d: Matrix,
    pub e: Matrix,
    pub f: Matrix,
    /// G = Σ Cᵏ (nilpotent C) or (I − C)⁻¹.
    pub g: Matrix,
    /// Whether C was nilpotent, so G is a finite Neumann sum.
    pub nilpotent: bool,
}

pub fn decompose(lts: &Lts) -> Result<Decomposition> {
    let p = lts.pm_matrix();
    let (tangible, vanishing): (Vec<usize>, Vec<usize>) =
        (0..lts.len()).partition(|&s| lts.states[s].tag.is_tangible());
    if tangible.is_empty() {
        return Err(Error::Chain("no tangible states; the reduced DTMC is empty".into()));
    }
    let c = matrix::select(&p, &vanishing, &vanishing);
    let d = matrix::select(&p, &vanishing, &tangible);
    let e = matrix::select(&p, &tangible, &vanishing);
    let f = matrix::select(&p, &tangible, &tangible);
    let k = vanishing.len();

    let mut neumann = matrix::identity(k);
    let mut power = matrix::identity(k);
    for _ in 1..k {
        power = matrix::mul(&power, &c);
        neumann = matrix::add(&neumann, &power);
    }
    let nilpotent = k == 0 || matrix::is_zero(&matrix::mul(&power, &c));
    let i_minus_c: Matrix = matrix::identity(k)
        .into_iter()
        .zip(&c)
        .map(|(r, s)| r.into_iter().zip(s).map(|(x, y)| x - y).collect())
        .collect();
    let inverse = matrix::inverse(&i_minus_c);
    let g = match (nilpotent, inverse) {
        (true, Some(inv)) => {
            if inv != neumann {
                return Err(Error::Internal("Neumann sum disagrees with (I - C)^-1".into()));
            }
            neumann
        }
        (true, None) => return Err(Error::Internal("nilpotent C with singular I - C".into())),
        (false, Some(inv)) => inv,
        (false, None) => {
            let names: Vec<String> = vanishing.iter().map(|&s| state_name(s)).collect();
            return Err(Error::Chain(format!(
                "absorbing loops among vanishing states {{{}}}; the model must be corrected",
                names.join(",")
            )));
        }
    };
    Ok(Decomposition { vanishing, tangible, c, d, e, f, g, nilpotent })
}

/// P◇ = F + E·G·D over the tangible states.
pub fn rdtmc(lts: &Lts) -> Result<ChainModel> {
    if !lts.states[lts.initial].tag.is_tangible() {
        return Err(Error::Chain(format!(
            "initial state {} is vanishing; the reduced DTMC needs a tangible initial state \
             (prefix the expression with a stochastic or waiting activity)",
            state_name(lts.initial)
        )));
    }
    let dec = decompose(lts)?;
    let egd = matrix::mul(&matrix::mul(&dec.e, &dec.g), &dec.d);
    let tpm = if dec.vanishing.is_empty() { dec.f.clone() } else { matrix::add(&dec.f, &egd) };
    let initial = dec.tangible.iter().position(|&s| s == lts.initial).expect("initial is tangible");
    Ok(ChainModel { kind: ChainKind::Rdtmc, states: dec.tangible, tpm, initial })
}

/// φ from the RDTMC: ψ◇ embedded into the full state list.
pub fn smc_pmf_via_rdtmc(lts: &Lts) -> Result<Pmf> {
    let psi = steady_state(&rdtmc(lts)?)?.pmf;
    let mut values = vec![Q::zero(); lts.len()];
    for (&s, v) in psi.states.iter().zip(psi.values) {
        values[s] = v;
    }
    Ok(Pmf { states: (0..lts.len()).collect(), values })
}

/// k-step PMF from the unit vector at the initial state.
pub fn transient(c: &ChainModel, k: usize) -> Pmf {
    let mut v = vec![Q::zero(); c.len()];
    v[c.initial] = Q::one();
    for _ in 0..k {
        v = matrix::vec_mul(&v, &c.tpm);
    }
    Pmf { states: c.states.clone(), values: v }
}
