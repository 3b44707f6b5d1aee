//! Hermitian Gram certificates in the complex monomials `α^a ᾱ^b`, split into
//! blocks by rotation charge.
//!
//! If every coefficient of `p(ᾱ, α)` sits at a charge `l − k` divisible by `n`,
//! then `p` is invariant under `α → e^{2πi/n} α` and, averaging any Gram
//! certificate over that group, `p` is SOS iff it has a Gram matrix that is
//! block diagonal in the classes `a − b mod n` (`n = 0`: exact charge). The
//! blocks are mapped back to a single real Gram matrix over the graded-lex
//! monomials `x^i y^j`, `α = x + iy`, so the certificate has the usual form.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::constraints::{gram_half_degree, herm_entry, Affine};
use crate::polyalg::{binomial, graded_lex_basis, Exp, HermBivarPoly};
use crate::sdpcore::{BlockId, ConicProblem, LinExpr};

/// Real and imaginary coefficient functionals of an affine Hermitian polynomial,
/// keyed by `(k, l)` for `ᾱ^k α^l`.
pub fn herm_coeffs(a: &Affine<HermBivarPoly>) -> BTreeMap<Exp, (LinExpr, LinExpr)> {
    let mut out: BTreeMap<Exp, (LinExpr, LinExpr)> = BTreeMap::new();
    let parts = a
        .constant
        .iter()
        .map(|p| (None, p))
        .chain(a.terms.iter().map(|(v, p)| (Some(*v), p)));
    for (v, p) in parts {
        for (e, c) in p.terms() {
            let slot = out.entry(e).or_default();
            match v {
                Some(v) => {
                    slot.0.add(v, c.re);
                    slot.1.add(v, c.im);
                }
                None => {
                    slot.0.constant += c.re;
                    slot.1.constant += c.im;
                }
            }
        }
    }
    out
}

/// Rotation class of the charge `c`.
pub fn charge_class(c: isize, modulus: usize) -> isize {
    if modulus == 0 {
        c
    } else {
        c.rem_euclid(modulus as isize)
    }
}

/// Largest `n` such that every charge is a multiple of `n`; 0 if all vanish.
pub fn charge_modulus(charges: impl IntoIterator<Item = isize>) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    charges
        .into_iter()
        .fold(0, |g, c| gcd(g, c.unsigned_abs()))
}

#[derive(Clone, Debug)]
struct ChargeBlock {
    block: BlockId,
    /// Complex monomials `(a, b)` for `α^a ᾱ^b`.
    basis: Vec<Exp>,
    weights: Vec<f64>,
}

/// Block-diagonal Hermitian Gram certificate of one polynomial.
#[derive(Clone, Debug)]
pub struct HermGram {
    blocks: Vec<ChargeBlock>,
    half_degree: usize,
}

/// `(x + iy)^a (x − iy)^b` in the real monomials `x^i y^j`.
fn real_expansion(a: usize, b: usize) -> Vec<(Exp, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    let mut acc: BTreeMap<Exp, Complex64> = BTreeMap::new();
    for p in 0..=a {
        for q in 0..=b {
            let c = binomial(a, p) * binomial(b, q) * i.powu(p as u32) * (-i).powu(q as u32);
            *acc.entry(Exp(a + b - p - q, p + q)).or_default() += c;
        }
    }
    acc.into_iter().filter(|(_, c)| c.norm() != 0.0).collect()
}

impl HermGram {
    /// `T` with `α^a ᾱ^b = Σ_m T_{(a,b), m} m` over the graded-lex basis.
    fn transfer(&self) -> (Vec<Exp>, DMatrix<Complex64>) {
        let real_basis = graded_lex_basis(self.half_degree);
        let index: BTreeMap<Exp, usize> =
            real_basis.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let n = real_basis.len();
        let mut t = DMatrix::zeros(n, n);
        for (row, v) in real_basis.iter().enumerate() {
            for (m, c) in real_expansion(v.0, v.1) {
                t[(row, index[&m])] = c;
            }
        }
        (real_basis, t)
    }

    /// Trace of the real Gram matrix returned by [`HermGram::lift`].
    pub fn trace_expr(&self) -> LinExpr {
        let (cbasis, t) = self.transfer();
        let pos: BTreeMap<Exp, usize> = cbasis.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let k = &t * t.adjoint();
        let mut e = LinExpr::new();
        for b in &self.blocks {
            let nb = b.basis.len();
            for i in 0..nb {
                for j in 0..nb {
                    let kv = k[(pos[&b.basis[j]], pos[&b.basis[i]])];
                    if kv.norm() == 0.0 {
                        continue;
                    }
                    let w = b.weights[i] * b.weights[j];
                    let (re, im) = herm_entry(b.block, nb, i, j, true);
                    e.add_scaled(&re, w * kv.re);
                    e.add_scaled(&im, -w * kv.im);
                }
            }
        }
        e
    }

    /// The real Gram matrix `Re(Tᴴ G T)` over the graded-lex monomials.
    pub fn lift(&self, solved: &[DMatrix<f64>]) -> DMatrix<f64> {
        let (cbasis, t) = self.transfer();
        let pos: BTreeMap<Exp, usize> = cbasis.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let n = cbasis.len();
        let mut g = DMatrix::<Complex64>::zeros(n, n);
        for b in &self.blocks {
            let q = super::extract_hermitian(&solved[b.block.0], true);
            for (i, ei) in b.basis.iter().enumerate() {
                for (j, ej) in b.basis.iter().enumerate() {
                    g[(pos[ei], pos[ej])] = q[(i, j)] * (b.weights[i] * b.weights[j]);
                }
            }
        }
        let full = t.adjoint() * g * t;
        DMatrix::from_fn(n, n, |i, j| 0.5 * (full[(i, j)].re + full[(j, i)].re))
    }
}

/// `f = Σ conj(v_r) G_rc v_c` over complex monomials `v = α^a ᾱ^b`, `a + b ≤ d`,
/// with `G ⪰ 0` block diagonal in the charge classes mod `modulus`.
///
/// Every coefficient of `f` must sit at a charge divisible by `modulus`. The
/// monomial `α^a ᾱ^b` carries weight `√(C(d, a+b) C(a+b, a) / 2^{a+b})`, which
/// keeps `(1 + |α|²)^d` well conditioned.
pub fn add_hermitian_gram(
    p: &mut ConicProblem,
    f: &BTreeMap<Exp, (LinExpr, LinExpr)>,
    modulus: usize,
    name: &str,
) -> HermGram {
    let nonzero = |e: &LinExpr| !(e.is_constant() && e.constant == 0.0);
    let deg = f
        .iter()
        .filter(|(_, (re, im))| nonzero(re) || nonzero(im))
        .map(|(k, _)| k.total())
        .max()
        .unwrap_or(0);
    let d = gram_half_degree(deg);
    let mut classes: BTreeMap<isize, Vec<Exp>> = BTreeMap::new();
    for e in graded_lex_basis(d) {
        let c = charge_class(e.0 as isize - e.1 as isize, modulus);
        classes.entry(c).or_default().push(e);
    }
    let mut rows: BTreeMap<Exp, (LinExpr, LinExpr)> = BTreeMap::new();
    let mut blocks = Vec::new();
    for (c, basis) in classes {
        let nb = basis.len();
        let weights: Vec<f64> = basis
            .iter()
            .map(|e| {
                let s = e.total();
                (binomial(d, s) / (s + 1) as f64).sqrt()
            })
            .collect();
        let block = p.add_psd_block(format!("{name}{c}"), 2 * nb);
        for (i, r) in basis.iter().enumerate() {
            for (j, col) in basis.iter().enumerate() {
                // conj(α^{r0} ᾱ^{r1}) α^{c0} ᾱ^{c1} = ᾱ^{r0 + c1} α^{r1 + c0}
                let k = r.0 + col.1;
                let l = r.1 + col.0;
                if k > l {
                    continue;
                }
                let w = weights[i] * weights[j];
                let (re, im) = herm_entry(block, nb, i, j, true);
                let slot = rows.entry(Exp(k, l)).or_default();
                slot.0.add_scaled(&re, w);
                if k < l {
                    slot.1.add_scaled(&im, w);
                }
            }
        }
        blocks.push(ChargeBlock {
            block,
            basis,
            weights,
        });
    }
    // coefficients no Gram entry can reach must vanish
    for (e, (re, im)) in f {
        if e.0 <= e.1 && (nonzero(re) || nonzero(im)) {
            rows.entry(*e).or_default();
        }
    }
    for (e, (mut re, mut im)) in rows {
        if let Some((fre, fim)) = f.get(&e) {
            re.add_scaled(fre, -1.0);
            im.add_scaled(fim, -1.0);
        }
        p.add_equality(re, 0.0);
        if e.0 < e.1 {
            p.add_equality(im, 0.0);
        }
    }
    HermGram {
        blocks,
        half_degree: d,
    }
}
