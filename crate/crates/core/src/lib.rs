//! Entanglement monotones of pure states as expectation values of
//! local-unitary-invariant observables on several copies of a state,
//! measurable lower bounds for mixed states, and a simulated imperfect
//! multi-copy measurement protocol.

pub mod error;
pub mod invariants;
pub mod mixedbounds;
pub mod monotones;
pub mod oracles;
pub mod report;
pub mod source_sim;
pub mod tensorkit;

pub use error::{Error, Result};
