//! Named polynomials, observables and states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyalg::{binomial, quadrature_to_ladder, HermBivarPoly, PolyJson, RealBivarPoly};
use crate::quantum::{DickeState, FockState, StateJson};
use crate::spinmap::SpinObservable;

/// `x⁴y² + x²y⁴ − 3x²y² + 1`.
pub fn motzkin() -> RealBivarPoly {
    RealBivarPoly::from_terms([(4, 2, 1.0), (2, 4, 1.0), (2, 2, -3.0), (0, 0, 1.0)])
}

/// `x⁶ − x⁴y² − x²y⁴ + y⁶ − x⁴ + 3x²y² − y⁴ − x² − y² + 1`.
pub fn robinson() -> RealBivarPoly {
    RealBivarPoly::from_terms([
        (6, 0, 1.0),
        (4, 2, -1.0),
        (2, 4, -1.0),
        (0, 6, 1.0),
        (4, 0, -1.0),
        (2, 2, 3.0),
        (0, 4, -1.0),
        (2, 0, -1.0),
        (0, 2, -1.0),
        (0, 0, 1.0),
    ])
}

/// `x⁴y² − 3x²y² + y⁴ + x²`.
pub fn choi_lam() -> RealBivarPoly {
    RealBivarPoly::from_terms([(4, 2, 1.0), (2, 2, -3.0), (0, 4, 1.0), (2, 0, 1.0)])
}

/// Normally ordered witness `W_M` of the Motzkin polynomial.
pub fn motzkin_witness() -> HermBivarPoly {
    quadrature_to_ladder(&motzkin())
}

/// Mixture of two pure states on `n_max = 10` that passes every degree-6 SOS
/// test yet has `⟨W_M⟩ < 0`:
/// `ρ = p|ψ₁⟩⟨ψ₁| + (1−p)|ψ₂⟩⟨ψ₂|`, `ψ₁ = a|1⟩ + b|5⟩ + c|9⟩`, `ψ₂ = d|2⟩ + e|6⟩ + f|10⟩`.
pub fn motzkin_hidden_state() -> FockState {
    let (p, a, b, d, e): (f64, f64, f64, f64, f64) = (0.06619, 0.69896, -0.68135, -0.94138, 0.3124);
    let c = -(1.0 - a * a - b * b).sqrt();
    let f = (1.0 - d * d - e * e).sqrt();
    let pure = |amps: &[(usize, f64)]| {
        let mut v = vec![Complex64::default(); 11];
        for &(n, x) in amps {
            v[n] = Complex64::new(x, 0.0);
        }
        FockState::pure(&v).expect("normalized by construction")
    };
    let s1 = pure(&[(1, a), (5, b), (9, c)]);
    let s2 = pure(&[(2, d), (6, e), (10, f)]);
    FockState::mixture(&[(p, &s1), (1.0 - p, &s2)]).expect("convex mixture of valid states")
}

/// GHZ fidelity witness `𝟙/2 − |GHZ⟩⟨GHZ|` in the Dicke basis.
pub fn ghz_witness(m: usize) -> Result<SpinObservable> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "GHZ witness needs m >= 2, got {m}"
        )));
    }
    let mut v = DMatrix::<f64>::identity(m + 1, m + 1) * 0.5;
    v[(0, 0)] = 0.0;
    v[(m, m)] = 0.0;
    v[(0, m)] = -0.5;
    v[(m, 0)] = -0.5;
    SpinObservable::from_real(v)
}

/// `f_k(a)` for `k = lo..=hi` from `f_0 = 1`, `f_1 = 1 + a`,
/// `f_{k+2} = (2 + a) f_{k+1} − f_k`, run backwards for negative `k`.
pub fn tura_sequence(a: f64, lo: i64, hi: i64) -> Vec<f64> {
    let lo = lo.min(0);
    let hi = hi.max(1);
    let len = (hi - lo + 1) as usize;
    let zero = (-lo) as usize;
    let mut f = vec![0.0; len];
    f[zero] = 1.0;
    f[zero + 1] = 1.0 + a;
    for i in (zero + 2)..len {
        f[i] = (2.0 + a) * f[i - 1] - f[i - 2];
    }
    for i in (0..zero).rev() {
        f[i] = (2.0 + a) * f[i + 1] - f[i + 2];
    }
    f
}

/// Symmetric `m = 2K + 1` qubit state `[η(a) + γ(b)] / (2(4+a)^K)` with
/// `η = Σ_l C(m,l) f_{K−l}(a) |m,l⟩⟨m,l|` and `γ = b(|m,0⟩⟨m,m| + |m,m⟩⟨m,0|)`.
pub fn tura_state(a: f64, b: i32, k: usize) -> Result<DickeState> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    if b != 1 && b != -1 {
        return Err(Error::InvalidArgument(format!("b must be ±1, got {b}")));
    }
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K must be >= 2, got {k}")));
    }
    let m = 2 * k + 1;
    let lo = k as i64 - m as i64;
    let f = tura_sequence(a, lo, k as i64);
    let at = |i: i64| f[(i - lo.min(0)) as usize];
    let norm = 2.0 * (4.0 + a).powi(k as i32);
    let mut rho = DMatrix::<Complex64>::zeros(m + 1, m + 1);
    for l in 0..=m {
        rho[(l, l)] = Complex64::new(binomial(m, l) * at(k as i64 - l as i64) / norm, 0.0);
    }
    rho[(0, m)] = Complex64::new(b as f64 / norm, 0.0);
    rho[(m, 0)] = rho[(0, m)];
    DickeState::new(rho)
}

/// Standard single-mode states before truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StandardState {
    Fock { n: usize },
    Coherent { alpha: Complex64 },
    Thermal { nbar: f64 },
    SqueezedVacuum { r: f64 },
}

/// A truncated standard state and the probability mass cut off above `n_max`.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub state: FockState,
    pub tail: f64,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|v| (v as f64).ln()).sum()
}

const TAIL_LIMIT: f64 = 1e-6;

/// Truncates to `|0⟩ … |n_max⟩` and renormalizes. A tail above `1e-6` is an
/// error unless `allow_tail` is set.
pub fn standard_state(kind: StandardState, n_max: usize, allow_tail: bool) -> Result<Truncated> {
    let n = n_max + 1;
    let (rho, kept) = match kind {
        StandardState::Fock { n: k } => {
            if k > n_max {
                return Err(Error::InvalidArgument(format!(
                    "Fock state |{k}⟩ exceeds cutoff {n_max}"
                )));
            }
            let s = FockState::number(k, n_max)?;
            return Ok(Truncated { state: s, tail: 0.0 });
        }
        StandardState::Coherent { alpha } => {
            let r2 = alpha.norm_sqr();
            let amps: Vec<Complex64> = (0..n)
                .map(|k| {
                    let mag = (-0.5 * r2 + 0.5 * k as f64 * r2.ln() - 0.5 * ln_factorial(k)).exp();
                    if r2 == 0.0 {
                        Complex64::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)
                    } else {
                        Complex64::from_polar(mag, k as f64 * alpha.arg())
                    }
                })
                .collect();
            pure_truncated(amps)
        }
        StandardState::Thermal { nbar } => {
            if !(nbar >= 0.0) {
                return Err(Error::InvalidArgument(format!("negative mean photon number {nbar}")));
            }
            let q = nbar / (1.0 + nbar);
            let p: Vec<f64> = (0..n).map(|k| (1.0 - q) * q.powi(k as i32)).collect();
            let kept: f64 = p.iter().sum();
            let d = nalgebra::DVector::from_iterator(n, p.iter().map(|&x| Complex64::new(x, 0.0)));
            (DMatrix::from_diagonal(&d), kept)
        }
        StandardState::SqueezedVacuum { r } => {
            let ch = r.cosh();
            let th = r.tanh();
            let amps: Vec<Complex64> = (0..n)
                .map(|k| {
                    if k % 2 == 1 {
                        return Complex64::default();
                    }
                    let h = k / 2;
                    // √((2h)!) / (2^h h!) in logs
                    let mag = 0.5 * ln_factorial(k) - h as f64 * std::f64::consts::LN_2 - ln_factorial(h);
                    Complex64::new((-th).powi(h as i32) * mag.exp() / ch.sqrt(), 0.0)
                })
                .collect();
            pure_truncated(amps)
        }
    };
    let tail = (1.0 - kept).max(0.0);
    if tail > TAIL_LIMIT && !allow_tail {
        return Err(Error::InvalidArgument(format!(
            "truncation at n_max = {n_max} drops probability {tail:e}"
        )));
    }
    let rho = rho / Complex64::new(kept, 0.0);
    Ok(Truncated {
        state: FockState::new(rho)?,
        tail,
    })
}

fn pure_truncated(amps: Vec<Complex64>) -> (DMatrix<Complex64>, f64) {
    let v = nalgebra::DVector::from_vec(amps);
    let kept = v.norm_squared();
    (&v * v.adjoint(), kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    Polynomial,
    SpinObservable,
    FockState,
    DickeState,
}

#[derive(Clone, Debug)]
pub enum Payload {
    /// Quadrature polynomial together with its normally ordered witness.
    Polynomial(RealBivarPoly),
    SpinObservable(SpinObservable),
    FockState(FockState),
    DickeState(DickeState),
}

#[derive(Clone, Debug)]
pub struct NamedEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub payload: Payload,
}

impl NamedEntry {
    pub fn kind(&self) -> EntryKind {
        match self.payload {
            Payload::Polynomial(_) => EntryKind::Polynomial,
            Payload::SpinObservable(_) => EntryKind::SpinObservable,
            Payload::FockState(_) => EntryKind::FockState,
            Payload::DickeState(_) => EntryKind::DickeState,
        }
    }

    /// Polynomials are written as their witness in the polynomial schema,
    /// everything else in the state schema.
    pub fn to_json(&self) -> serde_json::Value {
        match &self.payload {
            Payload::Polynomial(f) => {
                serde_json::to_value(PolyJson::from(quadrature_to_ladder(f))).expect("plain data")
            }
            Payload::SpinObservable(v) => state_value(v.to_json()),
            Payload::FockState(s) => state_value(s.to_json()),
            Payload::DickeState(s) => state_value(s.to_json()),
        }
    }
}

fn state_value(j: StateJson) -> serde_json::Value {
    serde_json::to_value(j).expect("plain data")
}

const NAMES: [(&str, &str); 11] = [
    ("motzkin", "Motzkin polynomial x⁴y² + x²y⁴ − 3x²y² + 1"),
    ("robinson", "Robinson sextic"),
    ("choi-lam", "Choi-Lam polynomial x⁴y² − 3x²y² + y⁴ + x²"),
    ("motzkin-hidden-state", "11-level mixture undetected by degree-6 SOS, detected by W_M"),
    ("ghz-witness-3", "GHZ fidelity witness for 3 qubits"),
    ("ghz-3", "3-qubit GHZ state"),
    ("tura-17", "17-qubit state rho(1, 1, 8)"),
    ("vacuum", "vacuum |0⟩, n_max = 4"),
    ("fock-1", "single photon |1⟩, n_max = 4"),
    ("coherent-1", "coherent state alpha = 1, n_max = 20"),
    ("squeezed-0.3", "squeezed vacuum r = 0.3, n_max = 20"),
];

pub fn list() -> Vec<(&'static str, &'static str)> {
    NAMES.to_vec()
}

pub fn get(name: &str) -> Result<NamedEntry> {
    let (name, description) = NAMES
        .iter()
        .copied()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown catalog entry {name:?}")))?;
    let payload = match name {
        "motzkin" => Payload::Polynomial(motzkin()),
        "robinson" => Payload::Polynomial(robinson()),
        "choi-lam" => Payload::Polynomial(choi_lam()),
        "motzkin-hidden-state" => Payload::FockState(motzkin_hidden_state()),
        "ghz-witness-3" => Payload::SpinObservable(ghz_witness(3)?),
        "ghz-3" => Payload::DickeState(DickeState::ghz(3)?),
        "tura-17" => Payload::DickeState(tura_state(1.0, 1, 8)?),
        "vacuum" => Payload::FockState(FockState::number(0, 4)?),
        "fock-1" => Payload::FockState(FockState::number(1, 4)?),
        "coherent-1" => Payload::FockState(
            standard_state(StandardState::Coherent { alpha: Complex64::new(1.0, 0.0) }, 20, false)?.state,
        ),
        "squeezed-0.3" => {
            Payload::FockState(standard_state(StandardState::SqueezedVacuum { r: 0.3 }, 20, false)?.state)
        }
        _ => unreachable!("NAMES and the match cover the same entries"),
    };
    Ok(NamedEntry {
        name,
        description,
        payload,
    })
}
