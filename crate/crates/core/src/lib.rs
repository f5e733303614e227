//! Discrete time stochastic and deterministic Petri box calculus.
//!
//! The crate covers the whole pipeline: parsing regular static expressions,
//! deriving their labelled probabilistic transition systems, compiling them
//! into dtsd-boxes and reachability graphs, checking that both semantics
//! agree, and analysing the underlying semi-Markov chain, DTMC and reduced
//! DTMC with exact rational arithmetic.

pub mod error;
pub mod expr;
pub mod iso;
pub mod lts;
pub mod markov;
pub mod net;
pub mod opsem;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Q;

/// Default bound on the number of explored states.
pub const DEFAULT_BUDGET: usize = 100_000;
