//! Regularity: no parallelism at the top level of iteration initial parts
//! and bodies.

use super::ast::Expr;
use super::print::print_static;
use crate::{Error, Result};

/// Outcome of the regularity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub regular: bool,
    /// Child-index path from the root to the offending iteration.
    pub path: Vec<usize>,
    pub message: String,
}

// D ::= act | D;E | D[]D | D[f] | D rs a | D sy a | [D*D*E]
fn is_d(e: &Expr) -> bool {
    match e {
        Expr::Act(_) | Expr::Stamped(..) => true,
        Expr::Seq(a, b) => is_d(a) && first_violation(b, &mut vec![]).is_none(),
        Expr::Choice(a, b) => is_d(a) && is_d(b),
        Expr::Relabel(a, _) | Expr::Restrict(a, _) | Expr::Sync(a, _) => is_d(a),
        Expr::Iter(a, b, c) => is_d(a) && is_d(b) && first_violation(c, &mut vec![]).is_none(),
        Expr::Par(..) => false,
        Expr::Over(a) | Expr::Under(a) => is_d(a),
    }
}

fn first_violation(e: &Expr, path: &mut Vec<usize>) -> Option<(Vec<usize>, String)> {
    if let Expr::Iter(a, b, _) = e {
        if !is_d(a) || !is_d(b) {
            let which = if !is_d(a) { "initial part" } else { "body" };
            return Some((
                path.clone(),
                format!("parallel composition at the top level of the iteration {which} in {}", print_static(e)),
            ));
        }
    }
    for (i, c) in e.children().into_iter().enumerate() {
        path.push(i);
        if let Some(v) = first_violation(c, path) {
            return Some(v);
        }
        path.pop();
    }
    None
}

pub fn check_regular(e: &Expr) -> RegularityReport {
    match first_violation(e, &mut vec![]) {
        None => RegularityReport { regular: true, path: vec![], message: "regular".into() },
        Some((path, message)) => RegularityReport { regular: false, path, message },
    }
}

pub fn is_regular(e: &Expr) -> Result<()> {
    let r = check_regular(e);
    if r.regular {
        Ok(())
    } else {
        Err(Error::NotRegular(r.message))
    }
}
