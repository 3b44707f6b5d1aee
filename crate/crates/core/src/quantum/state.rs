use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;

/// Checks Hermiticity, unit trace and positivity of a density matrix.
fn validate_density(rho: &DMatrix<Complex64>, trace_tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::NotSquare {
            rows: rho.nrows(),
            cols: rho.ncols(),
        });
    }
    if rho.nrows() == 0 {
        return Err(Error::InvalidState("empty density matrix".into()));
    }
    let scale = rho.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let n = rho.nrows();
    for i in 0..n {
        for j in i..n {
            if (rho[(i, j)] - rho[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::InvalidState(format!(
                    "not Hermitian at ({i},{j})"
                )));
            }
        }
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let min = hermitian_min_eig(rho);
    if min < -PSD_TOL * tr.re.abs().max(1.0) {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

pub(crate) fn hermitian_min_eig(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Single-mode light state in the Fock basis `|0⟩ … |n_max⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    rho: DMatrix<Complex64>,
}

impl FockState {
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        validate_density(&rho, TRACE_TOL)?;
        Ok(Self { rho })
    }

    /// Like [`FockState::new`] with a looser trace tolerance, for solver output.
    pub(crate) fn with_trace_tol(rho: DMatrix<Complex64>, trace_tol: f64) -> Result<Self> {
        validate_density(&rho, trace_tol)?;
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(amps: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(amps);
        Self::new(&v * v.adjoint())
    }

    /// Fock-diagonal state with the given photon-number distribution.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = probs.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    /// `|n⟩⟨n|` with cutoff `n_max ≥ n`.
    pub fn number(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidArgument(format!(
                "Fock level {n} exceeds cutoff {n_max}"
            )));
        }
        let mut p = vec![0.0; n_max + 1];
        p[n] = 1.0;
        Self::diagonal(&p)
    }

    /// Convex mixture `Σ p_i ρ_i`; all components must share a cutoff.
    pub fn mixture(parts: &[(f64, &FockState)]) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1
            .dim();
        let mut rho = DMatrix::zeros(dim, dim);
        for (p, s) in parts {
            if s.dim() != dim {
                return Err(Error::InvalidArgument("mixture cutoffs differ".into()));
            }
            rho += s.rho() * Complex64::new(*p, 0.0);
        }
        Self::new(rho)
    }

    pub fn n_max(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// Copy of the state embedded in a larger cutoff.
    pub fn padded(&self, n_max: usize) -> Self {
        let n = n_max.max(self.n_max()) + 1;
        let mut rho = DMatrix::zeros(n, n);
        rho.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.rho);
        Self { rho }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.rho.iter().all(|c| c.im.abs() <= tol)
    }

    pub fn to_json(&self) -> StateJson {
        StateJson::from_matrix("fock", self.n_max(), &self.rho)
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        if j.kind != "fock" {
            return Err(Error::InvalidArgument(format!(
                "expected a fock state, got kind {:?}",
                j.kind
            )));
        }
        let rho = j.to_matrix()?;
        if rho.nrows() != j.dim_param + 1 {
            return Err(Error::InvalidArgument(format!(
                "dim_param {} does not match a {}x{} matrix",
                j.dim_param,
                rho.nrows(),
                rho.ncols()
            )));
        }
        Self::new(rho)
    }
}

/// Symmetric state of `m` qubits in the Dicke basis `|m,0⟩ … |m,m⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    rho: DMatrix<Complex64>,
}

impl DickeState {
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        validate_density(&rho, TRACE_TOL)?;
        Ok(Self { rho })
    }

    /// `|m,l⟩⟨m,l|`.
    pub fn dicke(m: usize, l: usize) -> Result<Self> {
        if l > m {
            return Err(Error::InvalidArgument(format!(
                "Dicke index {l} exceeds qubit count {m}"
            )));
        }
        let mut rho = DMatrix::zeros(m + 1, m + 1);
        rho[(l, l)] = Complex64::new(1.0, 0.0);
        Self::new(rho)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(m: usize) -> Result<Self> {
        let mut rho = DMatrix::zeros(m + 1, m + 1);
        let h = Complex64::new(0.5, 0.0);
        rho[(0, 0)] = h;
        rho[(m, m)] = h;
        rho[(0, m)] = h;
        rho[(m, 0)] = h;
        Self::new(rho)
    }

    pub fn m(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.rho.iter().all(|c| c.im.abs() <= tol)
    }

    /// `Tr(ρ V)`.
    pub fn expectation(&self, v: &DMatrix<Complex64>) -> f64 {
        (&self.rho * v).trace().re
    }

    pub fn to_json(&self) -> StateJson {
        StateJson::from_matrix("dicke", self.m(), &self.rho)
    }

    pub fn from_json(j: &StateJson) -> Result<Self> {
        if j.kind != "dicke" {
            return Err(Error::InvalidArgument(format!(
                "expected a dicke state, got kind {:?}",
                j.kind
            )));
        }
        let rho = j.to_matrix()?;
        if rho.nrows() != j.dim_param + 1 {
            return Err(Error::InvalidArgument(format!(
                "dim_param {} does not match a {}x{} matrix",
                j.dim_param,
                rho.nrows(),
                rho.ncols()
            )));
        }
        Self::new(rho)
    }
}

/// Wire form shared by states and spin observables.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub kind: String,
    pub dim_param: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl StateJson {
    pub fn from_matrix(kind: &str, dim_param: usize, m: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            kind: kind.to_string(),
            dim_param,
            re: rows(|c| c.re),
            im: rows(|c| c.im),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.re.len();
        if self.re.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: self.re.first().map_or(0, |r| r.len()),
            });
        }
        let has_im = !self.im.is_empty();
        if has_im && (self.im.len() != n || self.im.iter().any(|r| r.len() != n)) {
            return Err(Error::InvalidArgument(
                "real and imaginary parts differ in shape".into(),
            ));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.re[i][j], if has_im { self.im[i][j] } else { 0.0 })
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_states() {
        let mut rho = DMatrix::zeros(2, 2);
        rho[(0, 0)] = Complex64::new(0.5, 0.0);
        assert!(FockState::new(rho.clone()).is_err());
        rho[(1, 1)] = Complex64::new(0.5, 0.0);
        rho[(0, 1)] = Complex64::new(0.9, 0.0);
        rho[(1, 0)] = Complex64::new(0.9, 0.0);
        assert!(matches!(
            FockState::new(rho),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = DickeState::ghz(3).unwrap();
        let j = serde_json::to_string(&s.to_json()).unwrap();
        let back: StateJson = serde_json::from_str(&j).unwrap();
        assert_eq!(DickeState::from_json(&back).unwrap(), s);
        assert!(FockState::from_json(&back).is_err());
    }

    #[test]
    fn ghz_has_half_corners() {
        let s = DickeState::ghz(4).unwrap();
        assert_eq!(s.rho()[(0, 4)].re, 0.5);
        assert!(s.is_real(0.0));
    }
}
