//! Permutation operators, symmetric and antisymmetric projectors, and
//! composite observables invariant under local unitaries applied to every
//! copy.

mod eval;
mod projector;
mod spec;
mod twirl;

pub use eval::{
    apply_spec, expectation_dense, expectation_mixed, expectation_power_mixed, expectation_power_pure,
    expectation_pure, realize,
};
pub use projector::{antisym_projector, permutation_operator, swap_operator, sym_projector};
pub use spec::{FactorKind, ObservableSpec, ProjectorFactor, Term};
pub use twirl::{twirl_deviation_dense, twirl_invariance_check, TWIRL_DENSE_MAX};
