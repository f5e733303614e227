//! Stochastic processes of a transition system: sojourn times, DTMC, EDTMC,
//! SMC steady state, reduced DTMC, transient PMFs, performance indices and
//! timer-free aggregation.

mod chain;
mod indices;
pub mod matrix;

pub use chain::{
    closed_classes, decompose, dtmc, edtmc, rdtmc, smc_pmf, smc_pmf_via_dtmc, smc_pmf_via_rdtmc, sojourn, steady_state,
    transient, ChainKind, ChainModel, Decomposition, Pmf, Sojourn, SteadyState, Time,
};
pub use indices::{evaluate, timer_free_aggregate, AggregateRow, Query, QueryFile};

use crate::lts::Lts;
use crate::{Error, Result};

/// φ computed by the three independent routes.
#[derive(Clone, Debug)]
pub struct PhiRoutes {
    pub via_edtmc: Result<Pmf>,
    pub via_dtmc: Result<Pmf>,
    pub via_rdtmc: Result<Pmf>,
}

impl PhiRoutes {
    pub fn compute(lts: &Lts) -> Self {
        PhiRoutes { via_edtmc: smc_pmf(lts), via_dtmc: smc_pmf_via_dtmc(lts), via_rdtmc: smc_pmf_via_rdtmc(lts) }
    }

    /// The common φ of all routes that succeeded; an internal error if two
    /// of them disagree, or the first error if none succeeded.
    pub fn agreed(&self) -> Result<Pmf> {
        let ok: Vec<(&str, &Pmf)> = [("EDTMC", &self.via_edtmc), ("DTMC", &self.via_dtmc), ("RDTMC", &self.via_rdtmc)]
            .into_iter()
            .filter_map(|(n, r)| r.as_ref().ok().map(|p| (n, p)))
            .collect();
        let Some(&(first_name, first)) = ok.first() else {
            return Err(self.via_edtmc.clone().unwrap_err());
        };
        for &(name, p) in &ok[1..] {
            if p != first {
                return Err(Error::Internal(format!(
                    "φ via {first_name} ({}) differs from φ via {name} ({})",
                    first.to_text(),
                    p.to_text()
                )));
            }
        }
        Ok(first.clone())
    }
}
