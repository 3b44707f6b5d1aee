use std::collections::BTreeMap;

use super::{binomial, Exp};

/// Real bivariate polynomial `f(x, y) = Σ c_ij x^i y^j`. Exact zeros are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealBivarPoly {
    coeffs: BTreeMap<Exp, f64>,
}

impl RealBivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([(0, 0, c)])
    }

    /// Builds from `(i, j, c_ij)` triples; repeated exponents accumulate.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: f64) {
        let e = Exp(i, j);
        let v = self.coeffs.get(&e).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, v);
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(&Exp(i, j)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exp, f64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| c * x.powi(e.0 as i32) * y.powi(e.1 as i32))
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e.0, e.1, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e.0, e.1, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let e = e1 + e2;
                out.add_term(e.0, e.1, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// `(1 + x² + y²)^b`, expanded by the trinomial formula.
    pub fn reznick_multiplier(b: usize) -> Self {
        let mut out = Self::zero();
        for i in 0..=b {
            for j in 0..=(b - i) {
                let c = binomial(b, i) * binomial(b - i, j);
                out.add_term(2 * i, 2 * j, c);
            }
        }
        out
    }

    /// Largest coefficient mismatch.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs_coeff()
    }
}
