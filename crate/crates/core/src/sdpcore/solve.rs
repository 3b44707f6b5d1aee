use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, NonnegativeConeT, PSDTriangleConeT, SolverStatus,
    SupportedConeT, ZeroConeT,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::problem::{ConicProblem, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: u32,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-8,
            max_iter: 100_000,
            verbose: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    /// Objective including its constant term. `NaN` unless optimal.
    pub objective: f64,
    pub blocks: Vec<DMatrix<f64>>,
    pub scalars: Vec<f64>,
    /// Largest `|aᵀx − b|` over the equalities.
    pub max_equality_residual: f64,
    /// Smallest eigenvalue over all PSD blocks (`+∞` when there are none).
    pub min_block_eigenvalue: f64,
    pub iterations: u32,
    /// Raw backend status text, for diagnostics.
    pub backend_status: String,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn value(&self, e: &super::LinExpr) -> f64 {
        e.eval(&self.blocks, &self.scalars)
    }
}

/// Anything that can produce a [`SolveResult`] for a [`ConicProblem`].
pub trait Backend: Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, p: &ConicProblem, opts: &SolveOptions) -> Result<SolveResult>;
}

/// Smallest eigenvalue of `(A + Aᵀ)/2`.
pub fn psd_min_eig(a: &DMatrix<f64>) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    let s = (a + a.transpose()) * 0.5;
    Ok(s.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}

/// Fills equality residuals, block eigenvalues and the objective of a candidate point.
fn diagnose(p: &ConicProblem, blocks: &[DMatrix<f64>], scalars: &[f64]) -> (f64, f64, bool, f64) {
    let mut worst: f64 = 0.0;
    let mut scaled_ok = true;
    for (e, rhs) in p.equalities() {
        let lhs = e.eval(blocks, scalars);
        let r = (lhs - rhs).abs();
        worst = worst.max(r);
        let mag: f64 = e
            .terms()
            .map(|(v, c)| {
                (c * match v {
                    Var::Scalar(i) => scalars[i],
                    Var::Entry { block, row, col } => blocks[block][(row, col)],
                })
                .abs()
            })
            .sum();
        if r > 1e-6 * (1.0 + rhs.abs() + mag) {
            scaled_ok = false;
        }
    }
    let min_eig = blocks
        .iter()
        .map(|b| psd_min_eig(b).unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let obj = p.objective().eval(blocks, scalars);
    (worst, min_eig, scaled_ok, obj)
}

/// Adapter for the Clarabel interior-point solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClarabelBackend;

fn svec_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

impl Backend for ClarabelBackend {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn solve(&self, p: &ConicProblem, opts: &SolveOptions) -> Result<SolveResult> {
        p.validate()?;
        let ns = p.scalars().len();
        let mut offsets = Vec::with_capacity(p.blocks().len());
        let mut n = ns;
        for (_, size) in p.blocks() {
            offsets.push(n);
            n += size * (size + 1) / 2;
        }
        // variable index and the factor turning a matrix-entry coefficient into
        // an svec coefficient (off-diagonals are stored times √2)
        let locate = |v: Var| -> (usize, f64) {
            match v {
                Var::Scalar(i) => (i, 1.0),
                Var::Entry { block, row, col } => {
                    let f = if row == col { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                    (offsets[block] + svec_index(row, col), f)
                }
            }
        };

        let mut q = vec![0.0; n];
        for (v, c) in p.objective().terms() {
            let (j, f) = locate(v);
            q[j] += c * f;
        }

        let (mut ri, mut ci, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        let mut b = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        for (row, (e, rhs)) in p.equalities().iter().enumerate() {
            for (v, c) in e.terms() {
                let (j, f) = locate(v);
                ri.push(row);
                ci.push(j);
                vals.push(c * f);
            }
            b.push(*rhs);
        }
        if !p.equalities().is_empty() {
            cones.push(ZeroConeT(p.equalities().len()));
        }
        let mut row = p.equalities().len();
        for (k, (_, size)) in p.blocks().iter().enumerate() {
            let len = size * (size + 1) / 2;
            if len == 0 {
                continue;
            }
            for t in 0..len {
                ri.push(row + t);
                ci.push(offsets[k] + t);
                vals.push(-1.0);
                b.push(0.0);
            }
            row += len;
            if *size == 1 {
                cones.push(NonnegativeConeT(1));
            } else {
                cones.push(PSDTriangleConeT(*size));
            }
        }
        let a = CscMatrix::new_from_triplets(row, n, ri, ci, vals);
        let pmat = CscMatrix::<f64>::zeros((n, n));

        let settings = DefaultSettings {
            max_iter: opts.max_iter,
            verbose: opts.verbose,
            tol_feas: opts.tol_feas,
            tol_gap_abs: opts.tol_gap,
            tol_gap_rel: opts.tol_gap,
            ..DefaultSettings::default()
        };
        let mut solver = DefaultSolver::new(&pmat, &q, &a, &b, &cones, settings)
            .map_err(|e| Error::Backend(format!("{e:?}")))?;
        solver.solve();
        let sol = &solver.solution;

        let scalars = sol.x[..ns].to_vec();
        let blocks: Vec<DMatrix<f64>> = p
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, (_, size))| {
                let mut m = DMatrix::zeros(*size, *size);
                for col in 0..*size {
                    for r in 0..=col {
                        let raw = sol.x[offsets[k] + svec_index(r, col)];
                        let v = if r == col { raw } else { raw * std::f64::consts::FRAC_1_SQRT_2 };
                        m[(r, col)] = v;
                        m[(col, r)] = v;
                    }
                }
                m
            })
            .collect();

        let (max_res, min_eig, scaled_ok, obj) = diagnose(p, &blocks, &scalars);
        let point_ok = scaled_ok && min_eig >= -1e-6;
        let status = match sol.status {
            SolverStatus::Solved if point_ok => Status::Optimal,
            SolverStatus::AlmostSolved if point_ok => Status::Optimal,
            SolverStatus::PrimalInfeasible => Status::Infeasible,
            SolverStatus::DualInfeasible => Status::Unbounded,
            _ => Status::NumericalFailure,
        };
        Ok(SolveResult {
            status,
            objective: if status == Status::Optimal { obj } else { f64::NAN },
            blocks,
            scalars,
            max_equality_residual: max_res,
            min_block_eigenvalue: min_eig,
            iterations: sol.iterations,
            backend_status: format!("{:?}", sol.status),
        })
    }
}

/// Solver-free backend: checks a supplied candidate point against the problem.
///
/// The result is `Optimal` when the candidate satisfies every equality within
/// `tol_feas` (scaled) and every block is PSD within `-tol_feas`; otherwise
/// `Infeasible`. Optimality itself is not checked.
#[derive(Clone, Debug)]
pub struct CandidateBackend {
    pub blocks: Vec<DMatrix<f64>>,
    pub scalars: Vec<f64>,
}

impl Backend for CandidateBackend {
    fn name(&self) -> &'static str {
        "candidate"
    }

    fn solve(&self, p: &ConicProblem, opts: &SolveOptions) -> Result<SolveResult> {
        p.validate()?;
        if self.blocks.len() != p.blocks().len() || self.scalars.len() != p.scalars().len() {
            return Err(Error::InvalidArgument(
                "candidate does not match the problem's variables".into(),
            ));
        }
        for (m, (_, size)) in self.blocks.iter().zip(p.blocks()) {
            if m.nrows() != *size || m.ncols() != *size {
                return Err(Error::InvalidArgument("candidate block has the wrong size".into()));
            }
        }
        let (max_res, min_eig, _, obj) = diagnose(p, &self.blocks, &self.scalars);
        let mut ok = min_eig >= -opts.tol_feas;
        for (e, rhs) in p.equalities() {
            let r = (e.eval(&self.blocks, &self.scalars) - rhs).abs();
            if r > opts.tol_feas * (1.0 + rhs.abs()) {
                ok = false;
            }
        }
        let status = if ok { Status::Optimal } else { Status::Infeasible };
        Ok(SolveResult {
            status,
            objective: obj,
            blocks: self.blocks.clone(),
            scalars: self.scalars.clone(),
            max_equality_residual: max_res,
            min_block_eigenvalue: min_eig,
            iterations: 0,
            backend_status: "candidate".into(),
        })
    }
}

/// Backend named by `NONCLASS_SOLVER` (default and only native choice: `clarabel`).
pub fn backend_from_env() -> Result<Box<dyn Backend>> {
    match std::env::var("NONCLASS_SOLVER").ok().as_deref() {
        None | Some("") | Some("clarabel") => Ok(Box::new(ClarabelBackend)),
        Some(other) => Err(Error::Backend(format!("unknown solver backend {other:?}"))),
    }
}

/// Solves with the default backend.
pub fn solve(p: &ConicProblem, opts: &SolveOptions) -> Result<SolveResult> {
    ClarabelBackend.solve(p, opts)
}

#[cfg(test)]
mod tests {
    use super::super::{LinExpr, Var};
    use super::*;

    #[test]
    fn scalar_psd_minimum() {
        let mut p = ConicProblem::new();
        let b = p.add_psd_block("x", 1);
        p.set_objective(LinExpr::var(Var::entry(b, 0, 0)));
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(r.objective.abs() < 1e-7);
    }

    #[test]
    fn trace_with_pinned_corner() {
        let mut p = ConicProblem::new();
        let b = p.add_psd_block("Q", 2);
        p.set_objective(p.trace_expr(b));
        p.add_equality(LinExpr::var(Var::entry(b, 0, 0)), 1.0);
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-7);
        assert!(r.min_block_eigenvalue > -1e-9);
    }

    #[test]
    fn off_diagonal_scaling() {
        // maximize X01 with X00 = X11 = 1  → X01 = 1
        let mut p = ConicProblem::new();
        let b = p.add_psd_block("X", 2);
        p.set_objective(LinExpr::var(Var::entry(b, 0, 1)).scaled(-1.0));
        p.add_equality(LinExpr::var(Var::entry(b, 0, 0)), 1.0);
        p.add_equality(LinExpr::var(Var::entry(b, 1, 1)), 1.0);
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert!((r.blocks[0][(0, 1)] - 1.0).abs() < 1e-6);
        assert!((r.objective + 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_reported() {
        let mut p = ConicProblem::new();
        let b = p.add_psd_block("X", 2);
        p.add_equality(LinExpr::var(Var::entry(b, 0, 0)), -1.0);
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
    }

    #[test]
    fn unbounded_reported() {
        let mut p = ConicProblem::new();
        let s = p.add_scalar("t");
        p.set_objective(LinExpr::var(Var::scalar(s)));
        let r = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Unbounded);
    }

    #[test]
    fn min_eig_checks() {
        assert_eq!(psd_min_eig(&DMatrix::identity(3, 3)).unwrap(), 1.0);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0]));
        assert!((psd_min_eig(&d).unwrap() + 2.0).abs() < 1e-15);
        assert!(matches!(
            psd_min_eig(&DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn candidate_backend_flags_violations() {
        let mut p = ConicProblem::new();
        let b = p.add_psd_block("X", 2);
        p.add_equality(LinExpr::var(Var::entry(b, 0, 0)), 1.0);
        let good = CandidateBackend {
            blocks: vec![DMatrix::identity(2, 2)],
            scalars: vec![],
        };
        assert_eq!(good.solve(&p, &SolveOptions::default()).unwrap().status, Status::Optimal);
        let mut m = DMatrix::identity(2, 2);
        m[(1, 1)] = -1e-3;
        let bad = CandidateBackend {
            blocks: vec![m],
            scalars: vec![],
        };
        assert_eq!(bad.solve(&p, &SolveOptions::default()).unwrap().status, Status::Infeasible);
    }
}
