//! Stereographic projection between symmetric spin observables and polynomials.
//!
//! With `|ψ(β)⟩ ∝ |0⟩ + β|1⟩`, the product state expands in the Dicke basis as
//! `|ψ^{⊗m}⟩ = (1+|β|²)^{-m/2} Σ_l √C(m,l) β^l |m,l⟩`, so
//! `(1+|β|²)^m ⟨ψ^{⊗m}|V|ψ^{⊗m}⟩ = Σ_ij V_ij √(C(m,i) C(m,j)) β̄^i β^j =: p̃_V`.
//! The pole `β → ∞` (the state `|1…1⟩`) is outside the chart; its value is `V_mm`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyalg::{binomial, HermBivarPoly, Support};
use crate::quantum::StateJson;

/// Hermitian `(m+1)×(m+1)` observable on the symmetric subspace of `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinObservable {
    v: DMatrix<Complex64>,
}

impl SpinObservable {
    pub fn new(v: DMatrix<Complex64>) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::NotSquare {
                rows: v.nrows(),
                cols: v.ncols(),
            });
        }
        if v.nrows() == 0 {
            return Err(Error::InvalidArgument("empty observable".into()));
        }
        let n = v.nrows();
        for i in 0..n {
            for j in i..n {
                if (v[(i, j)] - v[(j, i)].conj()).norm() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "observable not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { v })
    }

    pub fn from_real(v: DMatrix<f64>) -> Result<Self> {
        Self::new(v.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity(m: usize) -> Self {
        Self {
            v: DMatrix::identity(m + 1, m + 1),
        }
    }

    pub fn m(&self) -> usize {
        self.v.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.v
    }

    pub fn trace(&self) -> f64 {
        self.v.trace().re
    }

    /// Value at the pole `|1…1⟩`.
    pub fn pole_value(&self) -> f64 {
        let m = self.m();
        self.v[(m, m)].re
    }

    /// `⟨ψ(β)^{⊗m}|V|ψ(β)^{⊗m}⟩` for the normalized product state.
    pub fn product_expectation(&self, beta: Complex64) -> f64 {
        let m = self.m();
        let amp = product_amplitudes(m, beta);
        let mut acc = Complex64::default();
        for i in 0..=m {
            for j in 0..=m {
                acc += amp[i].conj() * self.v[(i, j)] * amp[j];
            }
        }
        acc.re
    }

    pub fn to_json(&self) -> StateJson {
        StateJson::from_matrix("dicke-observable", self.m(), &self.v)
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        if j.kind != "dicke-observable" {
            return Err(Error::InvalidArgument(format!(
                "expected a dicke-observable, got kind {:?}",
                j.kind
            )));
        }
        let v = j.to_matrix()?;
        if v.nrows() != j.dim_param + 1 {
            return Err(Error::InvalidArgument(format!(
                "dim_param {} does not match a {}x{} matrix",
                j.dim_param,
                v.nrows(),
                v.ncols()
            )));
        }
        Self::new(v)
    }
}

/// Dicke amplitudes of the normalized product state `|ψ(β)⟩^{⊗m}`.
pub fn product_amplitudes(m: usize, beta: Complex64) -> Vec<Complex64> {
    let norm = (1.0 + beta.norm_sqr()).powf(-(m as f64) / 2.0);
    (0..=m)
        .map(|l| beta.powu(l as u32) * binomial(m, l).sqrt() * norm)
        .collect()
}

/// `p̃_V(β̄, β) = Σ_ij V_ij √(C(m,i) C(m,j)) β̄^i β^j` with box support of degree `m`.
pub fn stereographic_poly(v: &SpinObservable) -> HermBivarPoly {
    let m = v.m();
    let mut p = HermBivarPoly::zero(Support::Box, m);
    for i in 0..=m {
        for j in i..=m {
            let c = v.v[(i, j)];
            if c != Complex64::default() {
                // √ of the product keeps perfect squares exact
                let w = (binomial(m, i) * binomial(m, j)).sqrt();
                p.set(i, j, c * w).expect("box support holds every (i, j) ≤ m");
            }
        }
    }
    p
}

/// Light witness obtained by reading `β̄ → a†`, `β → a` in `p̃_V`.
pub fn spin_to_light_witness(v: &SpinObservable) -> HermBivarPoly {
    stereographic_poly(v)
}

/// Membership of a polynomial's exponent support in the three nested sets
/// `P_m` (`k + l ≤ m`), `S_m` (`k, l ≤ m`) and `P_2m` (`k + l ≤ 2m`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionFlags {
    pub in_p_m: bool,
    pub in_s_m: bool,
    pub in_p_2m: bool,
}

pub fn support_inclusion_check(p: &HermBivarPoly, m: usize) -> InclusionFlags {
    let mut flags = InclusionFlags {
        in_p_m: true,
        in_s_m: true,
        in_p_2m: true,
    };
    for (e, c) in p.terms() {
        if c == Complex64::default() {
            continue;
        }
        flags.in_p_m &= e.total() <= m;
        flags.in_s_m &= e.0 <= m && e.1 <= m;
        flags.in_p_2m &= e.total() <= 2 * m;
    }
    flags
}
