use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Exp;
use crate::error::{Error, Result};

/// Which exponent pairs a [`HermBivarPoly`] may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// `k + l ≤ degree`.
    Total,
    /// `k ≤ degree` and `l ≤ degree` independently (stereographic images of spin observables).
    Box,
}

impl Support {
    fn admits(self, degree: usize, k: usize, l: usize) -> bool {
        match self {
            Support::Total => k + l <= degree,
            Support::Box => k <= degree && l <= degree,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Support::Total => "total",
            Support::Box => "box",
        }
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Hermitian bivariate polynomial `p(ᾱ, α) = Σ w_kl ᾱ^k α^l`.
///
/// Both halves of every conjugate pair are stored, so `coeff(k, l)` is a plain
/// lookup. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct HermBivarPoly {
    support: Support,
    degree: usize,
    coeffs: BTreeMap<Exp, Complex64>,
}

impl HermBivarPoly {
    pub fn zero(support: Support, degree: usize) -> Self {
        Self {
            support,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant polynomial `c` (the observable `c·𝟙`).
    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero(Support::Total, 0);
        p.set(0, 0, Complex64::new(c, 0.0)).expect("constant fits");
        p
    }

    /// Builds a polynomial from `(k, l, w_kl)` triples.
    ///
    /// A triple sets both `w_kl` and `w_lk = conj(w_kl)`. Listing both halves is
    /// allowed as long as they agree.
    pub fn from_terms<I>(support: Support, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut p = Self::zero(support, degree);
        let mut seen: BTreeMap<Exp, Complex64> = BTreeMap::new();
        for (k, l, c) in terms {
            if let Some(prev) = seen.get(&Exp(l, k)) {
                if (prev.conj() - c).norm() > 1e-12 * (1.0 + c.norm()) {
                    return Err(Error::NotHermitian { k, l });
                }
            }
            if k == l && c.im.abs() > 1e-12 * (1.0 + c.norm()) {
                return Err(Error::NotHermitian { k, l });
            }
            seen.insert(Exp(k, l), c);
            p.set(k, l, c)?;
        }
        Ok(p)
    }

    /// Sets `w_kl = c` and `w_lk = conj(c)`. Diagonal entries keep only the real part.
    pub fn set(&mut self, k: usize, l: usize, c: Complex64) -> Result<()> {
        if !self.support.admits(self.degree, k, l) {
            return Err(Error::OutOfSupport {
                k,
                l,
                support: self.support.label(),
                degree: self.degree,
            });
        }
        if k == l {
            self.put(Exp(k, k), Complex64::new(c.re, 0.0));
        } else {
            self.put(Exp(k, l), c);
            self.put(Exp(l, k), c.conj());
        }
        Ok(())
    }

    fn put(&mut self, e: Exp, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    /// Builds from a full coefficient map that is already Hermitian (internal use).
    pub(crate) fn from_raw(support: Support, degree: usize, raw: BTreeMap<Exp, Complex64>) -> Self {
        let scale = raw.values().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = BTreeMap::new();
        for (&e, &c) in &raw {
            if e.0 > e.1 {
                continue;
            }
            let partner = raw.get(&e.swapped()).copied().unwrap_or_default();
            // average the two halves so the stored table is exactly Hermitian
            let w = (c + partner.conj()) * 0.5;
            let w = if e.0 == e.1 { Complex64::new(w.re, 0.0) } else { w };
            if w.norm() > 1e-15 * scale {
                coeffs.insert(e, w);
                if e.0 != e.1 {
                    coeffs.insert(e.swapped(), w.conj());
                }
            }
        }
        for (&e, &c) in &raw {
            if e.0 > e.1 && !raw.contains_key(&e.swapped()) && c.norm() > 1e-15 * scale {
                let w = c * 0.5;
                coeffs.insert(e, w);
                coeffs.insert(e.swapped(), w.conj());
            }
        }
        Self {
            support,
            degree,
            coeffs,
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// The degree bound (`k + l ≤ D` for total support, `k, l ≤ D` for box support).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: usize, l: usize) -> Complex64 {
        self.coeffs.get(&Exp(k, l)).copied().unwrap_or_default()
    }

    /// All stored `(exponent, w_kl)` pairs, both halves, in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Exp, Complex64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `k + l` over nonzero coefficients (0 for the zero polynomial).
    pub fn total_degree(&self) -> usize {
        self.coeffs.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every coefficient is real.
    pub fn has_real_coeffs(&self, tol: f64) -> bool {
        let scale = self.max_abs_coeff().max(1.0);
        self.coeffs.values().all(|c| c.im.abs() <= tol * scale)
    }

    /// `p(ᾱ, α)` including any (tiny) imaginary residue.
    pub fn eval_complex(&self, alpha: Complex64) -> Complex64 {
        let ab = alpha.conj();
        self.coeffs
            .iter()
            .map(|(e, c)| c * ab.powu(e.0 as u32) * alpha.powu(e.1 as u32))
            .sum()
    }

    pub fn eval(&self, alpha: Complex64) -> f64 {
        self.eval_complex(alpha).re
    }

    /// `p(r e^{-iθ}, r e^{iθ})`.
    pub fn eval_polar(&self, r: f64, theta: f64) -> f64 {
        self.eval(Complex64::from_polar(r, theta))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero(self.support, self.degree);
        for (&e, &c) in &self.coeffs {
            out.put(e, c * s);
        }
        out
    }

    /// Sum of two polynomials; the result takes the wider support and degree bound.
    pub fn add(&self, other: &Self) -> Self {
        let support = if self.support == Support::Box || other.support == Support::Box {
            Support::Box
        } else {
            Support::Total
        };
        let degree = self.degree.max(other.degree);
        let mut out = Self {
            support,
            degree,
            coeffs: self.coeffs.clone(),
        };
        for (&e, &c) in &other.coeffs {
            let v = out.coeffs.get(&e).copied().unwrap_or_default() + c;
            out.put(e, v);
        }
        out
    }

    /// Same coefficients under a different support declaration.
    pub fn with_support(&self, support: Support, degree: usize) -> Result<Self> {
        for e in self.coeffs.keys() {
            if !support.admits(degree, e.0, e.1) {
                return Err(Error::OutOfSupport {
                    k: e.0,
                    l: e.1,
                    support: support.label(),
                    degree,
                });
            }
        }
        Ok(Self {
            support,
            degree,
            coeffs: self.coeffs.clone(),
        })
    }

    /// Largest coefficient mismatch between two polynomials.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&e, &c) in &self.coeffs {
            worst = worst.max((c - other.coeff(e.0, e.1)).norm());
        }
        for (&e, &c) in &other.coeffs {
            if !self.coeffs.contains_key(&e) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

/// Wire form of a [`HermBivarPoly`]. Only the `k ≥ l` triangle is written.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub support: Support,
    pub degree: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub k: usize,
    pub l: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<HermBivarPoly> for PolyJson {
    fn from(p: HermBivarPoly) -> Self {
        let terms = p
            .coeffs
            .iter()
            .filter(|(e, _)| e.0 >= e.1)
            .map(|(e, c)| TermJson {
                k: e.0,
                l: e.1,
                re: c.re,
                im: c.im,
            })
            .collect();
        PolyJson {
            support: p.support,
            degree: p.degree,
            terms,
        }
    }
}

impl TryFrom<PolyJson> for HermBivarPoly {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Self> {
        HermBivarPoly::from_terms(
            j.support,
            j.degree,
            j.terms
                .into_iter()
                .map(|t| (t.k, t.l, Complex64::new(t.re, t.im))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn set_fills_conjugate_partner() {
        let mut p = HermBivarPoly::zero(Support::Total, 3);
        p.set(2, 1, c(1.0, 2.0)).unwrap();
        assert_eq!(p.coeff(1, 2), c(1.0, -2.0));
        let v = p.eval_complex(c(0.3, -1.1));
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn support_is_enforced() {
        let mut p = HermBivarPoly::zero(Support::Total, 2);
        assert!(p.set(2, 1, c(1.0, 0.0)).is_err());
        let mut b = HermBivarPoly::zero(Support::Box, 2);
        b.set(2, 1, c(1.0, 0.0)).unwrap();
        b.set(2, 2, c(1.0, 0.0)).unwrap();
        assert!(b.set(3, 0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn inconsistent_halves_rejected() {
        let r = HermBivarPoly::from_terms(
            Support::Total,
            2,
            vec![(1, 0, c(1.0, 1.0)), (0, 1, c(1.0, 1.0))],
        );
        assert!(matches!(r, Err(Error::NotHermitian { .. })));
        let r = HermBivarPoly::from_terms(Support::Total, 2, vec![(1, 1, c(0.0, 1.0))]);
        assert!(r.is_err());
    }

    #[test]
    fn json_writes_lower_triangle_and_restores() {
        let mut p = HermBivarPoly::zero(Support::Box, 3);
        p.set(0, 3, c(-0.5, 0.0)).unwrap();
        p.set(1, 1, c(1.5, 0.0)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let j: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(j["support"], "box");
        let terms = j["terms"].as_array().unwrap();
        assert_eq!(terms.len(), 2);
        assert!(terms.iter().all(|t| t["k"].as_u64() >= t["l"].as_u64()));
        let back: HermBivarPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
