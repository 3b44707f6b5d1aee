//! Polynomial algebra for witnesses and their certificates.
//!
//! Four polynomial families live here:
//!
//! * [`HermBivarPoly`]: `p(ᾱ, α) = Σ w_kl ᾱ^k α^l` with `w_kl = conj(w_lk)`. The
//!   same coefficient table is the normally ordered observable `Σ w_kl a†^k a^l`.
//! * [`RealBivarPoly`]: `f(x, y) = Σ c_ij x^i y^j` with `α = x + iy`.
//! * [`UnivariatePoly`]: dense real coefficients.
//! * [`TrigPoly`]: `q(θ) = Σ_{|j| ≤ t} c_j e^{ijθ}` with `c_{-j} = conj(c_j)`.
//!
//! Exponent pairs are ordered graded-lexicographically everywhere (total degree
//! first, then larger first exponent first), so the Gram basis of degree 1 is
//! `1, x, y`.

mod herm;
mod real;
mod transform;
mod trig;
mod univariate;

use std::cmp::Ordering;

pub use herm::{HermBivarPoly, PolyJson, Support, TermJson};
pub use real::RealBivarPoly;
pub use transform::{
    ladder_to_real, pascal_step, pascal_steps, polar_decompose, quadrature_to_ladder,
    restrict_to_line, reznick_multiply,
};
pub use trig::TrigPoly;
pub use univariate::UnivariatePoly;

/// Exponent pair. For Hermitian polynomials this is `(k, l)` for `ᾱ^k α^l`;
/// for real polynomials `(i, j)` for `x^i y^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exp(pub usize, pub usize);

impl Exp {
    pub fn total(self) -> usize {
        self.0 + self.1
    }

    pub fn swapped(self) -> Exp {
        Exp(self.1, self.0)
    }
}

impl std::ops::Add for Exp {
    type Output = Exp;
    fn add(self, rhs: Exp) -> Exp {
        Exp(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponents of total degree at most `d`, graded-lex ordered.
pub fn graded_lex_basis(d: usize) -> Vec<Exp> {
    let mut out = Vec::with_capacity((d + 1) * (d + 2) / 2);
    for deg in 0..=d {
        for i in (0..=deg).rev() {
            out.push(Exp(i, deg - i));
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}
