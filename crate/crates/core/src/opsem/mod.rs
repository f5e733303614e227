//! Operational semantics: structural equivalence, action and empty-move
//! rules, and transition systems.

mod can;
mod inaction;
mod rules;
mod state;
mod ts;

pub use can::{can, now, stang, sync_closure, tang, wtang};
pub use inaction::{backward_steps, closure, forward_steps, is_operative, timer_decrement};
pub use rules::{classify, pf, pt, Move, Semantics};
pub use state::{EnabledSets, State};
pub use ts::{build_ts, build_ts_with_budget, prepare, Ts};

use crate::expr::Expr;
use crate::Result;

/// The structural-equivalence class of `g`.
pub fn equivalence_class(g: &Expr) -> Result<State> {
    State::of(g)
}

/// The saturated operative member of the class of `g` that differs from
/// `g` only in timer values (falls back to the canonical member when `g` is
/// not operative).
pub fn saturate(g: &Expr) -> Result<Expr> {
    let s = State::of(g)?;
    if s.members.contains(g) {
        return Ok(g.clone());
    }
    let bare = crate::expr::strip_timers(g);
    Ok(s.members.iter().find(|m| crate::expr::strip_timers(m) == bare).cloned().unwrap_or(s.canonical))
}

pub fn enabled_sets(s: &State) -> EnabledSets {
    s.enabled.clone()
}
