//! Syntax of the calculus: actions, multiactions, activities and expressions.

mod action;
mod activity;
mod ast;
mod parse;
mod print;
mod regular;

pub use action::{sync_multiactions, Action, Multiaction, STOP_ACTION};
pub use activity::{sync_activities, Activity, Kind, KindClass, Numbering};
pub use ast::{activity_sets, enumerate, strip_timers, ActivitySets, DynExpr, Expr, Relabeling, StaticExpr};
pub use parse::{parse_static, parse_static_with};
pub use print::{print_activity, print_dynamic, print_static};
pub use regular::{check_regular, is_regular, RegularityReport};
