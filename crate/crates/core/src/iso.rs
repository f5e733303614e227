//! Label- and probability-preserving isomorphism of transition systems.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::lts::{state_name, Lts, Step, Tag};
use crate::Q;

/// A bijection between the states of two transition systems:
/// `map[i]` is the image of state `i` of the first system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub map: Vec<usize>,
}

impl IsoWitness {
    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<_> = self.map.iter().enumerate().map(|(i, j)| serde_json::json!([i, j])).collect();
        serde_json::json!({ "pairs": pairs })
    }
}

type Edges = BTreeMap<(usize, usize), Vec<(Step, Q)>>;

fn edges(l: &Lts) -> Edges {
    let mut e: Edges = BTreeMap::new();
    for t in &l.transitions {
        e.entry((t.from, t.to)).or_default().push((t.step.clone(), t.prob.clone()));
    }
    for v in e.values_mut() {
        v.sort();
    }
    e
}

/// Isomorphism-invariant description of a state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    tag: Tag,
    /// (step, probability, self loop)
    out: Vec<(Step, Q, bool)>,
    incoming: usize,
}

fn signatures(l: &Lts) -> Vec<Signature> {
    let mut sig: Vec<Signature> =
        l.states.iter().map(|s| Signature { tag: s.tag, out: Vec::new(), incoming: 0 }).collect();
    for t in &l.transitions {
        sig[t.from].out.push((t.step.clone(), t.prob.clone(), t.from == t.to));
        sig[t.to].incoming += 1;
    }
    for s in &mut sig {
        s.out.sort();
    }
    sig
}

/// Searches for an isomorphism; on failure returns a human-readable reason.
pub fn find_iso(a: &Lts, b: &Lts) -> Result<IsoWitness, String> {
    if a.len() != b.len() {
        return Err(format!("state counts differ: {} vs {}", a.len(), b.len()));
    }
    if a.transitions.len() != b.transitions.len() {
        return Err(format!("transition counts differ: {} vs {}", a.transitions.len(), b.transitions.len()));
    }
    let (sa, sb) = (signatures(a), signatures(b));
    let mut ms_a = sa.clone();
    let mut ms_b = sb.clone();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        let i = (0..a.len()).find(|&i| !sb.contains(&sa[i])).unwrap_or(0);
        return Err(format!(
            "no state of the second system matches {} (tag {:?}, {} outgoing transitions)",
            state_name(i),
            sa[i].tag,
            sa[i].out.len()
        ));
    }
    let (ea, eb) = (edges(a), edges(b));
    // Search order: breadth-first from the initial state of `a`.
    let mut order = Vec::new();
    let mut seen = vec![false; a.len()];
    let mut q = VecDeque::from([a.initial]);
    seen[a.initial] = true;
    while let Some(s) = q.pop_front() {
        order.push(s);
        for t in a.outgoing(s) {
            if !seen[t.to] {
                seen[t.to] = true;
                q.push_back(t.to);
            }
        }
    }
    order.extend((0..a.len()).filter(|&i| !seen[i]));

    let mut map: Vec<Option<usize>> = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    let cands: Vec<Vec<usize>> = (0..a.len())
        .map(|i| {
            if i == a.initial {
                if sa[i] == sb[b.initial] {
                    vec![b.initial]
                } else {
                    vec![]
                }
            } else {
                (0..b.len()).filter(|&j| j != b.initial && sb[j] == sa[i]).collect()
            }
        })
        .collect();

    fn consistent(s: usize, img: usize, map: &[Option<usize>], ea: &Edges, eb: &Edges) -> bool {
        let empty = Vec::new();
        for (s2, m2) in map.iter().enumerate() {
            let Some(img2) = m2.or(if s2 == s { Some(img) } else { None }) else { continue };
            for (x, y, bx, by) in [(s, s2, img, img2), (s2, s, img2, img)] {
                if ea.get(&(x, y)).unwrap_or(&empty) != eb.get(&(bx, by)).unwrap_or(&empty) {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        k: usize,
        order: &[usize],
        cands: &[Vec<usize>],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        ea: &Edges,
        eb: &Edges,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let s = order[k];
        for &c in &cands[s] {
            if used[c] || !consistent(s, c, map, ea, eb) {
                continue;
            }
            map[s] = Some(c);
            used[c] = true;
            if search(k + 1, order, cands, map, used, ea, eb) {
                return true;
            }
            map[s] = None;
            used[c] = false;
        }
        false
    }

    if !search(0, &order, &cands, &mut map, &mut used, &ea, &eb) {
        return Err("no label- and probability-preserving bijection exists".into());
    }
    let w = IsoWitness { map: map.into_iter().map(|m| m.expect("complete map")).collect() };
    validate_witness(a, b, &w)?;
    Ok(w)
}

/// Independently re-checks a witness transition by transition.
pub fn validate_witness(a: &Lts, b: &Lts, w: &IsoWitness) -> Result<(), String> {
    if w.map.len() != a.len() || a.len() != b.len() {
        return Err("witness size does not match".into());
    }
    let mut hit = vec![false; b.len()];
    for &j in &w.map {
        if j >= b.len() || hit[j] {
            return Err("witness is not a bijection".into());
        }
        hit[j] = true;
    }
    if w.map[a.initial] != b.initial {
        return Err("initial states do not correspond".into());
    }
    let mut rest: Vec<(usize, &Step, &Q, usize)> =
        b.transitions.iter().map(|t| (t.from, &t.step, &t.prob, t.to)).collect();
    for t in &a.transitions {
        let want = (w.map[t.from], &t.step, &t.prob, w.map[t.to]);
        match rest.iter().position(|x| *x == want) {
            Some(i) => {
                rest.swap_remove(i);
            }
            None => {
                return Err(format!(
                    "transition {} --{}--> {} has no counterpart",
                    state_name(t.from),
                    t.step,
                    state_name(t.to)
                ))
            }
        }
    }
    if let Some((f, s, _, to)) = rest.first() {
        return Err(format!(
            "transition {} --{}--> {} of the second system is unmatched",
            state_name(*f),
            s,
            state_name(*to)
        ));
    }
    Ok(())
}
