//! Detection of nonclassical light and spin states through nonnegative-polynomial
//! certificates and semidefinite-programming hierarchies.

// Links the system BLAS/LAPACK used by the conic solver.
use openblas_src as _;

pub mod catalog;
pub mod certify;
pub mod detect;
pub mod error;
pub mod polyalg;
pub mod quantum;
pub mod sdpcore;
pub mod spinmap;

pub use error::{Error, Result};
