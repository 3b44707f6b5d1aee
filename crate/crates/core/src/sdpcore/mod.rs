//! Solver-agnostic semidefinite programs.
//!
//! A [`ConicProblem`] minimizes a linear functional over free scalars and
//! symmetric PSD blocks subject to linear equalities. Functionals address block
//! entries by their upper-triangle position. Backends implement [`Backend`]; the
//! native one wraps Clarabel, and [`CandidateBackend`] only checks a supplied point.

mod problem;
mod solve;

pub use problem::{
    BlockId, BlockJson, ConicProblem, FunctionalJson, LinExpr, ProblemJson, ScalarId,
    TripletJson, Var,
};
pub use solve::{
    backend_from_env, psd_min_eig, solve, Backend, CandidateBackend, ClarabelBackend,
    SolveOptions, SolveResult, Status,
};
