//! Net semantics: dtsd-boxes, the firing rule and reachability graphs.

mod build;
mod dtsd_box;
mod firing;
mod rg;

pub use build::{apply_rho, box_of_expr_unchecked, box_of_static, plain_box, refine, OperatorBox, Rho};
pub use dtsd_box::{DtsdBox, Place, PlaceKind, Transition};
pub use firing::{enabled, fire, fire_unchecked, fireable, mark_final, mark_initial, pf, NetState};
pub use rg::{build_rg, build_rg_from, check_safe_clean, check_safe_clean_with_budget, Rg, SafetyReport};
