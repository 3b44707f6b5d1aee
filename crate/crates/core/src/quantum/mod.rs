//! Light and spin states, moments and moment matrices.
//!
//! Conventions: `X = (a + a†)/2`, `P = (a − a†)/(2i)`, so `[X, P] = i/2` and the
//! vacuum has `⟨X²⟩ = 1/4`. The classical reference state uses the `d²α/π`
//! measure, which makes it unit trace.

mod moments;
mod state;

pub use moments::{
    classical_reference, classical_reference_moments, classical_reference_with_cutoff,
    moment_matrix, moment_matrix_test, moments_from_fock, quadrature_moment,
    witness_expectation, MomentEntry, MomentJson, MomentMatrix, MomentTable, MomentTestReport,
};
pub(crate) use moments::ladder_weights;
pub use state::{DickeState, FockState, StateJson};
pub(crate) use state::hermitian_min_eig;
