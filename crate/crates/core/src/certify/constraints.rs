use std::collections::BTreeMap;

use crate::polyalg::{graded_lex_basis, Exp, RealBivarPoly, TrigPoly, UnivariatePoly};
use crate::sdpcore::{BlockId, ConicProblem, LinExpr, Var};

/// A polynomial-valued affine function of decision variables:
/// `constant + Σ var · P_var`.
#[derive(Clone, Debug)]
pub struct Affine<P> {
    pub constant: Option<P>,
    pub terms: Vec<(Var, P)>,
}

impl<P> Affine<P> {
    pub fn fixed(p: P) -> Self {
        Self {
            constant: Some(p),
            terms: Vec::new(),
        }
    }

    pub fn linear(terms: Vec<(Var, P)>) -> Self {
        Self {
            constant: None,
            terms,
        }
    }

    /// Applies a linear map to every component.
    pub fn map<Q>(&self, f: impl Fn(&P) -> Q) -> Affine<Q> {
        Affine {
            constant: self.constant.as_ref().map(&f),
            terms: self.terms.iter().map(|(v, p)| (*v, f(p))).collect(),
        }
    }

    fn parts(&self) -> impl Iterator<Item = (Option<Var>, &P)> {
        self.constant
            .iter()
            .map(|p| (None, p))
            .chain(self.terms.iter().map(|(v, p)| (Some(*v), p)))
    }
}

fn push(e: &mut LinExpr, v: Option<Var>, c: f64) {
    match v {
        Some(v) => e.add(v, c),
        None => e.constant += c,
    }
}

/// Coefficient functionals of an affine real bivariate polynomial.
pub fn real_coeffs(a: &Affine<RealBivarPoly>) -> BTreeMap<Exp, LinExpr> {
    let mut out: BTreeMap<Exp, LinExpr> = BTreeMap::new();
    for (v, p) in a.parts() {
        for (e, c) in p.terms() {
            push(out.entry(e).or_default(), v, c);
        }
    }
    out
}

/// Coefficient functionals of an affine univariate polynomial.
pub fn uni_coeffs(a: &Affine<UnivariatePoly>) -> Vec<LinExpr> {
    let mut out: Vec<LinExpr> = Vec::new();
    for (v, p) in a.parts() {
        for (i, &c) in p.coeffs().iter().enumerate() {
            if out.len() <= i {
                out.resize(i + 1, LinExpr::new());
            }
            push(&mut out[i], v, c);
        }
    }
    out
}

/// Coefficient functionals `c_j = re_j + i·im_j`, `j = 0..=t`, of an affine
/// trigonometric polynomial.
#[derive(Clone, Debug, Default)]
pub struct LinTrig {
    pub re: Vec<LinExpr>,
    pub im: Vec<LinExpr>,
}

impl LinTrig {
    fn is_zero(e: &LinExpr) -> bool {
        e.is_constant() && e.constant == 0.0
    }

    /// Largest `j` with a nonzero functional, `None` if all vanish.
    pub fn half_degree(&self) -> Option<usize> {
        (0..self.re.len())
            .rev()
            .find(|&j| !Self::is_zero(&self.re[j]) || !Self::is_zero(&self.im[j]))
    }

    /// True when no imaginary part can be nonzero.
    pub fn is_real(&self) -> bool {
        self.im.iter().all(Self::is_zero)
    }
}

/// Coefficient functionals of each `q_s` in an affine sequence of trigonometric polynomials.
pub fn trig_coeffs(a: &Affine<Vec<TrigPoly>>) -> Vec<LinTrig> {
    let mut out: Vec<LinTrig> = Vec::new();
    for (v, qs) in a.parts() {
        if out.len() < qs.len() {
            out.resize(qs.len(), LinTrig::default());
        }
        for (s, q) in qs.iter().enumerate() {
            let t = q.half_degree();
            let lt = &mut out[s];
            if lt.re.len() <= t {
                lt.re.resize(t + 1, LinExpr::new());
                lt.im.resize(t + 1, LinExpr::new());
            }
            for j in 0..=t {
                let c = q.coeff(j as isize);
                push(&mut lt.re[j], v, c.re);
                push(&mut lt.im[j], v, c.im);
            }
        }
    }
    out
}

/// Half-degree of the Gram basis for a polynomial whose largest exponent has
/// total degree `deg`.
pub fn gram_half_degree(deg: usize) -> usize {
    deg.div_ceil(2)
}

/// PSD block `X'` standing for the certificate matrix `G = D X' D`, `D = diag(weights)`.
#[derive(Clone, Debug)]
pub struct ScaledBlock {
    pub block: BlockId,
    pub weights: Vec<f64>,
}

impl ScaledBlock {
    /// `Tr G` as a functional.
    pub fn trace_expr(&self) -> LinExpr {
        let mut e = LinExpr::new();
        for (i, w) in self.weights.iter().enumerate() {
            e.add(Var::entry(self.block, i, i), w * w);
        }
        e
    }

    /// `G` from a solved `X'`.
    pub fn unscale(&self, x: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
        let w = &self.weights;
        nalgebra::DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| w[i] * w[j] * x[(i, j)])
    }
}

fn ln_fact(n: usize) -> f64 {
    (2..=n).map(|v| (v as f64).ln()).sum()
}

/// `f = m_dᵀ G m_d` with `G ⪰ 0` over the graded-lex basis `m_d`. Returns the Gram block.
pub fn add_sos_gram(p: &mut ConicProblem, f: &BTreeMap<Exp, LinExpr>, name: &str) -> BlockId {
    add_sos_gram_scaled(p, f, name, false).block
}

/// [`add_sos_gram`] with optional multinomial weights `√(d! / (i! j! (d−i−j)!))` on
/// the monomial `x^i y^j`, which makes `(1 + x² + y²)^d` the identity Gram matrix.
pub fn add_sos_gram_scaled(
    p: &mut ConicProblem,
    f: &BTreeMap<Exp, LinExpr>,
    name: &str,
    multinomial: bool,
) -> ScaledBlock {
    let deg = f
        .iter()
        .filter(|(_, e)| !LinTrig::is_zero(e))
        .map(|(k, _)| k.total())
        .max()
        .unwrap_or(0);
    let d = gram_half_degree(deg);
    let basis = graded_lex_basis(d);
    let weights: Vec<f64> = basis
        .iter()
        .map(|e| {
            if multinomial {
                (0.5 * (ln_fact(d) - ln_fact(e.0) - ln_fact(e.1) - ln_fact(d - e.total()))).exp()
            } else {
                1.0
            }
        })
        .collect();
    let g = p.add_psd_block(name, basis.len());
    let mut rows: BTreeMap<Exp, LinExpr> = BTreeMap::new();
    for c in 0..basis.len() {
        for r in 0..=c {
            let w = if r == c { 1.0 } else { 2.0 } * weights[r] * weights[c];
            rows.entry(basis[r] + basis[c])
                .or_default()
                .add(Var::entry(g, r, c), w);
        }
    }
    for (gamma, mut row) in rows {
        if let Some(e) = f.get(&gamma) {
            row.add_scaled(e, -1.0);
        }
        p.add_equality(row, 0.0);
    }
    ScaledBlock { block: g, weights }
}

/// Univariate `f(x) = Σ f_s x^s` as `v_dᵀ H v_d` with `H ⪰ 0`, `v_d = (1, x, …, x^d)`.
pub fn add_hankel_sos(p: &mut ConicProblem, f: &[LinExpr], name: &str) -> BlockId {
    add_hankel_sos_scaled(p, f, name, false).block
}

/// [`add_hankel_sos`] with optional weights `√C(d, i)` on `x^i`, which makes
/// `(1 + x²)^d` the identity Gram matrix.
pub fn add_hankel_sos_scaled(p: &mut ConicProblem, f: &[LinExpr], name: &str, binomial: bool) -> ScaledBlock {
    let deg = (0..f.len()).rev().find(|&i| !LinTrig::is_zero(&f[i])).unwrap_or(0);
    let d = gram_half_degree(deg);
    let weights: Vec<f64> = (0..=d)
        .map(|i| {
            if binomial {
                (0.5 * (ln_fact(d) - ln_fact(i) - ln_fact(d - i))).exp()
            } else {
                1.0
            }
        })
        .collect();
    let h = p.add_psd_block(name, d + 1);
    for s in 0..=(2 * d) {
        let mut row = LinExpr::new();
        for i in s.saturating_sub(d)..=s.min(d) {
            let j = s - i;
            if i <= j {
                let w = if i == j { 1.0 } else { 2.0 } * weights[i] * weights[j];
                row.add(Var::entry(h, i, j), w);
            }
        }
        if let Some(e) = f.get(s) {
            row.add_scaled(e, -1.0);
        }
        p.add_equality(row, 0.0);
    }
    ScaledBlock { block: h, weights }
}

/// Toeplitz-trace block of a Fejér–Riesz constraint.
#[derive(Clone, Copy, Debug)]
pub struct FrBlock {
    pub block: BlockId,
    /// Side length of the Hermitian matrix `Q` (`t + 1`).
    pub size: usize,
    /// `Q` is embedded as the real block `[[A, −B], [B, A]]` of side `2·size`.
    pub complex: bool,
    /// The block holds `Q / scale`.
    pub scale: f64,
}

impl FrBlock {
    /// `Tr Q` as a functional.
    pub fn trace_expr(&self, p: &ConicProblem) -> LinExpr {
        let t = p.trace_expr(self.block);
        if self.complex {
            t.scaled(0.5 * self.scale)
        } else {
            t.scaled(self.scale)
        }
    }

    /// The Hermitian `Q` from a solved block.
    pub fn extract(&self, m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<num_complex::Complex64> {
        extract_hermitian(m, self.complex) * num_complex::Complex64::new(self.scale, 0.0)
    }
}

/// `Re Q_ij` and `Im Q_ij` as functionals of the embedding block.
pub(crate) fn herm_entry(b: BlockId, n: usize, i: usize, j: usize, complex: bool) -> (LinExpr, LinExpr) {
    let mut re = LinExpr::new();
    let mut im = LinExpr::new();
    if complex {
        re.add(Var::entry(b, i, j), 0.5);
        re.add(Var::entry(b, n + i, n + j), 0.5);
        im.add(Var::entry(b, n + i, j), 0.5);
        im.add(Var::entry(b, i, n + j), -0.5);
    } else {
        re.add(Var::entry(b, i, j), 1.0);
    }
    (re, im)
}

/// `c_j = Σ_m Q_{m+j, m}` for `j = 0..=t` with `Q ⪰ 0`, which holds iff
/// `q(θ) ≥ 0` for all `θ`. Identically zero `q` needs no block and returns `None`.
///
/// With `complex = false` the imaginary parts of `q` must vanish identically
/// and `Q` is real.
pub fn add_fejer_riesz(
    p: &mut ConicProblem,
    q: &LinTrig,
    complex: bool,
    name: &str,
) -> Option<FrBlock> {
    add_fejer_riesz_scaled(p, q, complex, name, 1.0)
}

/// Largest coefficient magnitude in the functionals of `q`.
pub fn lin_trig_scale(q: &LinTrig) -> f64 {
    q.re.iter()
        .chain(&q.im)
        .flat_map(|e| e.terms().map(|(_, c)| c.abs()).chain([e.constant.abs()]))
        .fold(0.0, f64::max)
}

/// [`add_fejer_riesz`] with the PSD block holding `Q / scale`.
pub fn add_fejer_riesz_scaled(
    p: &mut ConicProblem,
    q: &LinTrig,
    complex: bool,
    name: &str,
    scale: f64,
) -> Option<FrBlock> {
    let t = q.half_degree()?;
    let inv = 1.0 / scale;
    debug_assert!(complex || q.is_real());
    let n = t + 1;
    let block = p.add_psd_block(name, if complex { 2 * n } else { n });
    for j in 0..=t {
        let mut re_row = LinExpr::new();
        let mut im_row = LinExpr::new();
        for m in 0..(n - j) {
            let (re, im) = herm_entry(block, n, m + j, m, complex);
            re_row.add_scaled(&re, 1.0);
            im_row.add_scaled(&im, 1.0);
        }
        re_row.add_scaled(&q.re[j], -inv);
        p.add_equality(re_row, 0.0);
        if complex && j > 0 {
            im_row.add_scaled(&q.im[j], -inv);
            p.add_equality(im_row, 0.0);
        }
    }
    Some(FrBlock {
        block,
        size: n,
        complex,
        scale,
    })
}

/// Recovers the Hermitian `Q` from a solved embedding block.
pub fn extract_hermitian(
    m: &nalgebra::DMatrix<f64>,
    complex: bool,
) -> nalgebra::DMatrix<num_complex::Complex64> {
    use num_complex::Complex64;
    if !complex {
        return m.map(|v| Complex64::new(v, 0.0));
    }
    let n = m.nrows() / 2;
    nalgebra::DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (m[(i, j)] + m[(n + i, n + j)]),
            0.5 * (m[(n + i, j)] - m[(i, n + j)]),
        )
    })
}
