//! Canonical printer. Static expressions print in the input grammar;
//! dynamic ones add `over(..)`, `under(..)` and `^δ` timer superscripts.

use super::activity::{Activity, Kind, Numbering};
use super::ast::Expr;
use crate::rational::fmt_q;

const PAR: u8 = 1;
const CHOICE: u8 = 2;
const SEQ: u8 = 3;
const ATOM: u8 = 4;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Par(..) => PAR,
        Expr::Choice(..) => CHOICE,
        Expr::Seq(..) => SEQ,
        _ => ATOM,
    }
}

fn kind_str(k: &Kind) -> String {
    match k {
        Kind::Stochastic(p) => fmt_q(p),
        Kind::Deterministic { delay, weight } => format!("#{delay}:{}", fmt_q(weight)),
    }
}

fn numbering_str(n: &Numbering) -> String {
    let c: Vec<String> = n.content().iter().map(|x| x.to_string()).collect();
    c.join("+")
}

/// Activity with its numbering content, e.g. `({a},1/2)_1` or `({},#2:3)_1+2`.
pub fn print_activity(a: &Activity) -> String {
    format!("({},{})_{}", a.multiaction, kind_str(&a.kind), numbering_str(&a.numbering))
}

fn plain_activity(a: &Activity) -> String {
    format!("({},{})", a.multiaction, kind_str(&a.kind))
}

fn go(e: &Expr, min: u8, out: &mut String) {
    let paren = prec(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Act(a) => out.push_str(&plain_activity(a)),
        Expr::Stamped(a, d) => {
            out.push_str(&plain_activity(a));
            out.push_str(&format!("^{d}"));
        }
        Expr::Seq(a, b) => {
            go(a, SEQ, out);
            out.push(';');
            go(b, ATOM, out);
        }
        Expr::Choice(a, b) => {
            go(a, CHOICE, out);
            out.push_str("[]");
            go(b, SEQ, out);
        }
        Expr::Par(a, b) => {
            go(a, PAR, out);
            out.push_str("||");
            go(b, CHOICE, out);
        }
        Expr::Relabel(a, f) => {
            go(a, ATOM, out);
            let pairs: Vec<String> = f.0.iter().map(|(x, y)| format!("{x}->{y}")).collect();
            out.push_str(&format!("[{}]", pairs.join(",")));
        }
        Expr::Restrict(..) if e.is_stop() => out.push_str("stop"),
        Expr::Restrict(a, x) => {
            go(a, ATOM, out);
            out.push_str(&format!(" rs {x}"));
        }
        Expr::Sync(a, x) => {
            go(a, ATOM, out);
            out.push_str(&format!(" sy {x}"));
        }
        Expr::Iter(a, b, c) => {
            out.push('[');
            go(a, PAR, out);
            out.push('*');
            go(b, PAR, out);
            out.push('*');
            go(c, PAR, out);
            out.push(']');
        }
        Expr::Over(a) => {
            out.push_str("over(");
            go(a, PAR, out);
            out.push(')');
        }
        Expr::Under(a) => {
            out.push_str("under(");
            go(a, PAR, out);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

/// Prints a static expression in the input grammar.
pub fn print_static(e: &Expr) -> String {
    let mut s = String::new();
    go(e, PAR, &mut s);
    s
}

/// Prints any expression; bars and timer values use the extended notation.
pub fn print_dynamic(e: &Expr) -> String {
    print_static(e)
}
