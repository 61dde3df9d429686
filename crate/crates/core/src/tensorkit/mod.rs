//! Dense complex linear algebra over composite Hilbert spaces with explicit
//! `(copy, subsystem)` leg bookkeeping.

use num_complex::Complex64;

pub mod dd;
pub mod io;
mod layout;
mod legs;
mod linalg;
pub mod named;
mod random;
mod state;

pub use layout::{Leg, LegLayout};
pub use legs::{apply_to_legs, permute_legs, Amplitude};
pub use linalg::{
    basis_state, hermitian_eigensystem, identity, inf_norm, kron, partial_trace, partial_transpose, psd_sqrt,
    schmidt_coefficients, EIGEN_HERMITIAN_TOL, PSD_FLOOR,
};
pub use random::{haar_random_unitary, random_density, random_schmidt_rank_state, random_state};
pub use state::{DensityOperator, StateVector};

pub(crate) use legs::{apply_amplitudes, apply_planned, LegOperator, LegPlan};
pub(crate) use linalg::conjugate_on_legs;

pub type CMatrix = nalgebra::DMatrix<Complex64>;
pub type CVector = nalgebra::DVector<Complex64>;

/// Largest total dimension for which dense operators are built.
pub const DENSE_CAP: usize = 4096;
