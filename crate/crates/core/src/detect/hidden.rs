//! States invisible to every degree-`D̃` SOS witness but seen by a given
//! non-SOS witness.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Detector;
use crate::certify::herm_entry;
use crate::error::{Error, Result};
use crate::polyalg::{graded_lex_basis, quadrature_to_ladder, Exp, RealBivarPoly};
use crate::quantum::{
    ladder_weights, moment_matrix_test, moments_from_fock, witness_expectation, FockState,
};
use crate::sdpcore::{ConicProblem, LinExpr, SolveOptions, Status, Var};

const HIDDEN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HiddenStateResult {
    pub status: Status,
    /// The minimizing state, projected onto the PSD cone and renormalized.
    pub state: Option<FockState>,
    /// `Tr(W_f ρ)` on the returned state.
    pub value: f64,
    /// Raw solver optimum.
    pub solver_value: f64,
    /// Smallest eigenvalue of `M_{D̃}` of the returned state.
    pub moment_min_eigenvalue: f64,
}

/// `⟨a†^k a^l⟩` as real and imaginary functionals of the density-matrix block.
fn moment_expr(
    block: crate::sdpcore::BlockId,
    n: usize,
    k: usize,
    l: usize,
    complex: bool,
) -> (LinExpr, LinExpr) {
    let mut re = LinExpr::new();
    let mut im = LinExpr::new();
    for (row, col, w) in ladder_weights(k, l, n - 1) {
        let (r, i) = herm_entry(block, n, row, col, complex);
        re.add_scaled(&r, w);
        im.add_scaled(&i, w);
    }
    (re, im)
}

/// Clips negative eigenvalues and restores unit trace.
fn project_density(rho: &DMatrix<Complex64>) -> Result<FockState> {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.clone().symmetric_eigen();
    let vals = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0), 0.0));
    let mut out = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint();
    let tr = out.trace().re;
    if !(tr > 0.0) {
        return Err(Error::Backend("solver returned a state with no positive part".into()));
    }
    out /= Complex64::new(tr, 0.0);
    FockState::new(out)
}

impl Detector<'_> {
    /// `min Tr(W_f ρ)` over states on `|0⟩ … |n_max⟩` with `ρ ⪰ 0`, `Tr ρ = 1`
    /// and `M_{D̃}(ρ) ⪰ 0`.
    pub fn construct_hidden_state(
        &self,
        f: &RealBivarPoly,
        n_max: usize,
        d_tilde: usize,
    ) -> Result<HiddenStateResult> {
        if f.degree() % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "polynomial degree {} is odd",
                f.degree()
            )));
        }
        if d_tilde % 2 == 1 {
            return Err(Error::InvalidArgument(format!("D̃ = {d_tilde} must be even")));
        }
        let w = quadrature_to_ladder(f);
        // real W admits a real optimal ρ: conjugation flips P, which only
        // changes signs of rows and columns of the moment matrix
        let complex = !w.has_real_coeffs(1e-14);
        let n = n_max + 1;
        let mut p = ConicProblem::new();
        let rho = p.add_psd_block("rho", if complex { 2 * n } else { n });
        let half = d_tilde / 2;
        let basis = graded_lex_basis(half);
        let mblock = p.add_psd_block("moments", basis.len());

        let mut mu: BTreeMap<Exp, (LinExpr, LinExpr)> = BTreeMap::new();
        let mut mu_of = |k: usize, l: usize| {
            mu.entry(Exp(k, l))
                .or_insert_with(|| moment_expr(rho, n, k, l, complex))
                .clone()
        };
        let real_part = |poly: &crate::polyalg::HermBivarPoly, mu_of: &mut dyn FnMut(usize, usize) -> (LinExpr, LinExpr)| {
            let mut e = LinExpr::new();
            for (ex, c) in poly.terms() {
                let (re, im) = mu_of(ex.0, ex.1);
                e.add_scaled(&re, c.re);
                e.add_scaled(&im, -c.im);
            }
            e
        };

        let mut quad: BTreeMap<Exp, LinExpr> = BTreeMap::new();
        for g in graded_lex_basis(2 * half) {
            let lad = quadrature_to_ladder(&RealBivarPoly::from_terms([(g.0, g.1, 1.0)]));
            quad.insert(g, real_part(&lad, &mut mu_of));
        }
        for c in 0..basis.len() {
            for r in 0..=c {
                let mut row = LinExpr::var(Var::entry(mblock, r, c));
                row.add_scaled(&quad[&(basis[r] + basis[c])], -1.0);
                p.add_equality(row, 0.0);
            }
        }
        let mut tr = LinExpr::new();
        for i in 0..n {
            tr.add_scaled(&herm_entry(rho, n, i, i, complex).0, 1.0);
        }
        p.add_equality(tr, 1.0);
        p.set_objective(real_part(&w, &mut mu_of));

        // the optimum sits on the boundary of M ⪰ 0; default tolerances leave
        // eigenvalues near −2e-8 there
        let opts = SolveOptions {
            tol_feas: self.opts.tol_feas.min(HIDDEN_TOL),
            tol_gap: self.opts.tol_gap.min(HIDDEN_TOL),
            ..self.opts
        };
        let r = self.backend.solve(&p, &opts)?;
        if !r.is_optimal() {
            return Ok(HiddenStateResult {
                status: r.status,
                state: None,
                value: f64::NAN,
                solver_value: f64::NAN,
                moment_min_eigenvalue: f64::NAN,
            });
        }
        let raw = crate::certify::extract_hermitian(&r.blocks[rho.0], complex);
        let state = project_density(&raw)?;
        let t = moments_from_fock(&state, d_tilde.max(f.degree()));
        let value = witness_expectation(&w, &t)?;
        let moment_min_eigenvalue = moment_matrix_test(&t, half, 0.0)?.min_eigenvalue;
        Ok(HiddenStateResult {
            status: r.status,
            state: Some(state),
            value,
            solver_value: r.objective,
            moment_min_eigenvalue,
        })
    }
}

/// [`Detector::construct_hidden_state`] with the default solver.
pub fn construct_hidden_state(
    f: &RealBivarPoly,
    n_max: usize,
    d_tilde: usize,
) -> Result<HiddenStateResult> {
    Detector::default().construct_hidden_state(f, n_max, d_tilde)
}
