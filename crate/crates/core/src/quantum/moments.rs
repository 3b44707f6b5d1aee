use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FockState;
use crate::error::{Error, Result};
use crate::polyalg::{graded_lex_basis, quadrature_to_ladder, Exp, HermBivarPoly, RealBivarPoly};

/// Normally ordered moments `μ_kl = ⟨a†^k a^l⟩` for `k + l ≤ D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MomentJson", into = "MomentJson")]
pub struct MomentTable {
    degree: usize,
    entries: BTreeMap<Exp, Complex64>,
}

impl MomentTable {
    /// Builds a table from `(k, l, μ_kl)` triples. Only one of each conjugate pair
    /// is needed; missing partners are filled in. `μ_00` defaults to 1.
    pub fn from_entries<I>(degree: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut map: BTreeMap<Exp, Complex64> = BTreeMap::new();
        for (k, l, mu) in entries {
            if k + l > degree {
                return Err(Error::OutOfSupport {
                    k,
                    l,
                    support: "total",
                    degree,
                });
            }
            let tol = 1e-9 * (1.0 + mu.norm());
            if let Some(prev) = map.get(&Exp(l, k)) {
                if (prev.conj() - mu).norm() > tol {
                    return Err(Error::NotHermitian { k, l });
                }
            }
            if k == l && mu.im.abs() > tol {
                return Err(Error::NotHermitian { k, l });
            }
            map.insert(Exp(k, l), mu);
            map.insert(Exp(l, k), mu.conj());
        }
        let one = map.entry(Exp(0, 0)).or_insert(Complex64::new(1.0, 0.0));
        if (*one - 1.0).norm() > 1e-9 {
            return Err(Error::InvalidState(format!("<1> = {one}, expected 1")));
        }
        *one = Complex64::new(1.0, 0.0);
        Ok(Self {
            degree,
            entries: map,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, k: usize, l: usize) -> Result<Complex64> {
        self.entries
            .get(&Exp(k, l))
            .copied()
            .ok_or(Error::MissingMoment { k, l })
    }

    pub fn entries(&self) -> impl Iterator<Item = (Exp, Complex64)> + '_ {
        self.entries.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.values().all(|c| c.im.abs() <= tol)
    }

    /// `t·self + (1 − t)·other`, entrywise on the common degree.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        let degree = self.degree.min(other.degree);
        let mut out = BTreeMap::new();
        for (e, a) in self.entries() {
            if e.total() <= degree {
                let b = other.get(e.0, e.1)?;
                out.insert(e, a * t + b * (1.0 - t));
            }
        }
        Ok(Self {
            degree,
            entries: out,
        })
    }

    /// Keeps only moments of total degree `≤ degree`.
    pub fn truncated(&self, degree: usize) -> Self {
        Self {
            degree: degree.min(self.degree),
            entries: self
                .entries
                .iter()
                .filter(|(e, _)| e.total() <= degree)
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentJson {
    #[serde(rename = "D")]
    pub degree: usize,
    pub entries: Vec<MomentEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentEntry {
    pub k: usize,
    pub l: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<MomentTable> for MomentJson {
    fn from(t: MomentTable) -> Self {
        MomentJson {
            degree: t.degree,
            entries: t
                .entries
                .iter()
                .filter(|(e, _)| e.0 >= e.1)
                .map(|(e, c)| MomentEntry {
                    k: e.0,
                    l: e.1,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<MomentJson> for MomentTable {
    type Error = Error;
    fn try_from(j: MomentJson) -> Result<Self> {
        MomentTable::from_entries(
            j.degree,
            j.entries
                .into_iter()
                .map(|e| (e.k, e.l, Complex64::new(e.re, e.im))),
        )
    }
}

/// `√((j+k)!/j!)`, the amplitude picked up by `a†^k` on `|j⟩`.
pub(crate) fn raise_factor(j: usize, k: usize) -> f64 {
    ((j + 1)..=(j + k)).map(|v| (v as f64).sqrt()).product()
}

/// Weights `c` with `Tr(ρ a†^k a^l) = Σ c · ρ[row, col]`, for states with cutoff `n_max`.
pub(crate) fn ladder_weights(k: usize, l: usize, n_max: usize) -> Vec<(usize, usize, f64)> {
    let top = k.max(l);
    if top > n_max {
        return Vec::new();
    }
    (0..=(n_max - top))
        .map(|j| (j + l, j + k, raise_factor(j, k) * raise_factor(j, l)))
        .collect()
}

/// All moments `⟨a†^k a^l⟩` with `k + l ≤ degree`.
pub fn moments_from_fock(s: &FockState, degree: usize) -> MomentTable {
    let rho = s.rho();
    let mut entries = BTreeMap::new();
    for e in graded_lex_basis(degree) {
        let mu: Complex64 = ladder_weights(e.0, e.1, s.n_max())
            .into_iter()
            .map(|(r, c, w)| rho[(r, c)] * w)
            .sum();
        entries.insert(e, mu);
    }
    entries.insert(Exp(0, 0), Complex64::new(1.0, 0.0));
    // the trace of a valid state is 1 only up to 1e-10; pin μ_00 exactly
    MomentTable { degree, entries }
}

/// `⟨:X^i P^j:⟩` from ladder moments.
pub fn quadrature_moment(t: &MomentTable, i: usize, j: usize) -> Result<f64> {
    let w = quadrature_to_ladder(&RealBivarPoly::from_terms([(i, j, 1.0)]));
    witness_expectation(&w, t)
}

/// `⟨W⟩ = Σ w_kl μ_kl`.
pub fn witness_expectation(w: &HermBivarPoly, t: &MomentTable) -> Result<f64> {
    let mut acc = Complex64::default();
    for (e, c) in w.terms() {
        acc += c * t.get(e.0, e.1)?;
    }
    Ok(acc.re)
}

/// `M_{2D}(ρ)`: rows and columns indexed by exponents `(m₁, m₂)` with
/// `m₁ + m₂ ≤ D` in graded-lex order, entries `⟨:X^{m₁+n₁} P^{m₂+n₂}:⟩`.
#[derive(Clone, Debug)]
pub struct MomentMatrix {
    pub half_degree: usize,
    pub basis: Vec<Exp>,
    pub matrix: DMatrix<f64>,
}

pub fn moment_matrix(t: &MomentTable, half_degree: usize) -> Result<MomentMatrix> {
    if t.degree() < 2 * half_degree {
        return Err(Error::InsufficientMoments {
            need: 2 * half_degree,
            have: t.degree(),
        });
    }
    let basis = graded_lex_basis(half_degree);
    let mut cache: BTreeMap<Exp, f64> = BTreeMap::new();
    for e in graded_lex_basis(2 * half_degree) {
        cache.insert(e, quadrature_moment(t, e.0, e.1)?);
    }
    let n = basis.len();
    let matrix = DMatrix::from_fn(n, n, |r, c| cache[&(basis[r] + basis[c])]);
    Ok(MomentMatrix {
        half_degree,
        basis,
        matrix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentTestReport {
    pub min_eigenvalue: f64,
    pub detected: bool,
}

/// Smallest eigenvalue of `M_{2D}(ρ)`; `detected` when it lies below `-tol`.
pub fn moment_matrix_test(t: &MomentTable, half_degree: usize, tol: f64) -> Result<MomentTestReport> {
    let m = moment_matrix(t, half_degree)?;
    let min_eigenvalue = crate::sdpcore::psd_min_eig(&m.matrix)?;
    Ok(MomentTestReport {
        min_eigenvalue,
        detected: min_eigenvalue < -tol,
    })
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|v| (v as f64).ln()).sum()
}

/// Husimi-smoothed classical reference `ρ0 = ∫ d²α/π ⟨α|ρ|α⟩ |α⟩⟨α|`, cut off at
/// `n_out` and renormalized. Returns the state and the retained trace before
/// renormalization.
pub fn classical_reference_with_cutoff(s: &FockState, n_out: usize) -> Result<(FockState, f64)> {
    let rho = s.rho();
    let n_in = s.n_max();
    let lf: Vec<f64> = (0..=(n_in + n_out + 1)).map(ln_factorial).collect();
    let mut out = DMatrix::<Complex64>::zeros(n_out + 1, n_out + 1);
    for m in 0..=n_out {
        for n in 0..=n_out {
            // selection rule j + n = k + m
            let mut acc = Complex64::default();
            for j in 0..=n_in {
                if j + n < m {
                    continue;
                }
                let k = j + n - m;
                if k > n_in {
                    continue;
                }
                let sdeg = j + n;
                let w = (lf[sdeg]
                    - (sdeg as f64 + 1.0) * std::f64::consts::LN_2
                    - 0.5 * (lf[j] + lf[k] + lf[m] + lf[n]))
                    .exp();
                acc += rho[(j, k)] * w;
            }
            out[(m, n)] = acc;
        }
    }
    let kept = out.trace().re;
    out /= Complex64::new(kept, 0.0);
    let state = FockState::with_trace_tol(out, 1e-8)?;
    Ok((state, kept))
}

/// [`classical_reference_with_cutoff`] at the input's own cutoff.
pub fn classical_reference(s: &FockState) -> Result<(FockState, f64)> {
    classical_reference_with_cutoff(s, s.n_max())
}

/// Exact moments of the untruncated reference state `ρ0` of `s`.
///
/// `⟨a†^k a^l⟩_{ρ0} = ∫ d²α/π ⟨α|ρ|α⟩ ᾱ^k α^l`, a finite sum over the entries of `ρ`.
pub fn classical_reference_moments(s: &FockState, degree: usize) -> MomentTable {
    let rho = s.rho();
    let n = s.n_max();
    let lf: Vec<f64> = (0..=(n + degree + 1)).map(ln_factorial).collect();
    let mut entries = BTreeMap::new();
    for e in graded_lex_basis(degree) {
        let (k, l) = (e.0, e.1);
        let mut acc = Complex64::default();
        // ⟨α|ρ|α⟩ = e^{-|α|²} Σ ρ_{jj'} ᾱ^j α^{j'} / √(j! j'!); the angular integral
        // forces j + k = j' + l =: s and the radial one gives s!
        for j in 0..=n {
            if j + k < l {
                continue;
            }
            let jp = j + k - l;
            if jp > n {
                continue;
            }
            let sdeg = j + k;
            let w = (lf[sdeg] - 0.5 * (lf[j] + lf[jp])).exp();
            acc += rho[(j, jp)] * w;
        }
        entries.insert(e, acc);
    }
    entries.insert(Exp(0, 0), Complex64::new(1.0, 0.0));
    MomentTable { degree, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_moments_vanish() {
        let t = moments_from_fock(&FockState::number(0, 3).unwrap(), 4);
        for (e, c) in t.entries() {
            let expect = if e == Exp(0, 0) { 1.0 } else { 0.0 };
            assert_eq!(c, Complex64::new(expect, 0.0));
        }
    }

    #[test]
    fn single_photon_moments() {
        let t = moments_from_fock(&FockState::number(1, 3).unwrap(), 4);
        assert_eq!(t.get(1, 1).unwrap().re, 1.0);
        assert_eq!(t.get(2, 2).unwrap().re, 0.0);
        assert_eq!(t.get(1, 0).unwrap().norm(), 0.0);
    }

    #[test]
    fn moment_matrices_of_fock_states() {
        let vac = moments_from_fock(&FockState::number(0, 2).unwrap(), 2);
        let m = moment_matrix(&vac, 1).unwrap().matrix;
        assert_eq!(m, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0])));
        let one = moments_from_fock(&FockState::number(1, 2).unwrap(), 2);
        let m = moment_matrix(&one, 1).unwrap().matrix;
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.5, 0.5]));
        assert!((m - expect).abs().max() < 1e-14);
        assert!(matches!(
            moment_matrix(&one, 2),
            Err(Error::InsufficientMoments { need: 4, have: 2 })
        ));
    }

    #[test]
    fn sub_poissonian_single_photon() {
        let t = moments_from_fock(&FockState::number(1, 4).unwrap(), 4);
        assert!(moment_matrix_test(&t, 2, 1e-9).unwrap().detected);
        let vac = moments_from_fock(&FockState::number(0, 4).unwrap(), 6);
        assert!(!moment_matrix_test(&vac, 3, 1e-9).unwrap().detected);
    }

    #[test]
    fn vacuum_reference_is_thermal() {
        let (r, kept) = classical_reference_with_cutoff(&FockState::number(0, 0).unwrap(), 30).unwrap();
        assert!((kept - (1.0 - 0.5f64.powi(31))).abs() < 1e-12);
        assert!((r.rho()[(0, 0)].re * kept - 0.5).abs() < 1e-12);
        let t = classical_reference_moments(&FockState::number(0, 0).unwrap(), 4);
        // thermal n̄ = 1: ⟨a†^k a^k⟩ = k!
        assert!((t.get(1, 1).unwrap().re - 1.0).abs() < 1e-12);
        assert!((t.get(2, 2).unwrap().re - 2.0).abs() < 1e-12);
        assert_eq!(t.get(1, 0).unwrap().norm(), 0.0);
    }

    #[test]
    fn json_schema() {
        let t = moments_from_fock(&FockState::number(1, 2).unwrap(), 2);
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["D"], 2);
        let back: MomentTable = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
