use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{binomial, Exp, HermBivarPoly, RealBivarPoly, Support, TrigPoly, UnivariatePoly};

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Substitutes `α = x + iy` and returns the real polynomial in `(x, y)`.
pub fn ladder_to_real(p: &HermBivarPoly) -> RealBivarPoly {
    let mut acc: BTreeMap<Exp, Complex64> = BTreeMap::new();
    for (e, w) in p.terms() {
        let (k, l) = (e.0, e.1);
        // (x - iy)^k (x + iy)^l
        for a in 0..=k {
            let ca = binomial(k, a) * if a % 2 == 1 { -1.0 } else { 1.0 };
            for b in 0..=l {
                let c = w * i_pow(a + b) * ca * binomial(l, b);
                *acc.entry(Exp(k + l - a - b, a + b)).or_default() += c;
            }
        }
    }
    RealBivarPoly::from_terms(acc.into_iter().map(|(e, c)| (e.0, e.1, c.re)))
}

/// Expands `Σ w̃_ij :X^i P^j:` into ladder coefficients, with
/// `X = (a + a†)/2`, `P = (a − a†)/(2i)` and `a, a†` commuting under `:·:`.
///
/// Equivalently this converts `f(x, y)` into `p(ᾱ, α)` with `x = Re α`, `y = Im α`.
pub fn quadrature_to_ladder(f: &RealBivarPoly) -> HermBivarPoly {
    let mut acc: BTreeMap<Exp, Complex64> = BTreeMap::new();
    for (e, c) in f.terms() {
        let (i, j) = (e.0, e.1);
        // (ᾱ + α)^i / 2^i * (α − ᾱ)^j / (2i)^j
        let pref = Complex64::new(c / 2f64.powi((i + j) as i32), 0.0) / i_pow(j);
        for a in 0..=i {
            for b in 0..=j {
                let sign = if b % 2 == 1 { -1.0 } else { 1.0 };
                let v = pref * binomial(i, a) * binomial(j, b) * sign;
                *acc.entry(Exp(a + b, i + j - a - b)).or_default() += v;
            }
        }
    }
    HermBivarPoly::from_raw(Support::Total, f.degree(), acc)
}

/// Splits `p(r e^{-iθ}, r e^{iθ}) = Σ_s q_s(θ) r^s`.
///
/// `q_s` carries `c_{l-k} = w_kl` for `k + l = s`; the result has one entry per
/// radial power up to the largest nonzero one.
pub fn polar_decompose(p: &HermBivarPoly) -> Vec<TrigPoly> {
    let top = p.total_degree();
    let mut qs: Vec<TrigPoly> = (0..=top).map(TrigPoly::zero).collect();
    for (e, w) in p.terms() {
        let j = e.1 as isize - e.0 as isize;
        // each (k, l) with k + l = s owns a distinct j; set() also writes the
        // conjugate slot, which is exactly the partner term (l, k)
        qs[e.total()].set(j, w);
    }
    qs
}

/// One multiplication of `Σ q_s r^s` by `(1 + r)`.
pub fn pascal_step(q: &[TrigPoly]) -> Vec<TrigPoly> {
    assert!(!q.is_empty(), "pascal_step needs at least one coefficient");
    let n = q.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(q[0].clone());
    for s in 1..n {
        out.push(q[s - 1].add(&q[s]));
    }
    out.push(q[n - 1].clone());
    out
}

/// `b` successive [`pascal_step`]s.
pub fn pascal_steps(q: &[TrigPoly], b: usize) -> Vec<TrigPoly> {
    let mut cur = q.to_vec();
    for _ in 0..b {
        cur = pascal_step(&cur);
    }
    cur
}

/// `f(r) = p(r e^{-iθ}, r e^{iθ})` for `r ∈ ℝ`, i.e. the line through the
/// origin at angle `θ`. Coefficients below `1e-13` of the largest are dropped.
pub fn restrict_to_line(p: &HermBivarPoly, theta: f64) -> UnivariatePoly {
    let qs = polar_decompose(p);
    let mut c: Vec<f64> = qs.iter().map(|q| q.eval(theta)).collect();
    let scale = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for v in c.iter_mut() {
        if v.abs() <= 1e-13 * scale {
            *v = 0.0;
        }
    }
    UnivariatePoly::new(c)
}

/// `(1 + ᾱα)^b p`. The degree bound grows by `2b` (total support) or `b` (box support).
pub fn reznick_multiply(p: &HermBivarPoly, b: usize) -> HermBivarPoly {
    if b == 0 {
        return p.clone();
    }
    let mut acc: BTreeMap<Exp, Complex64> = BTreeMap::new();
    for (e, w) in p.terms() {
        for j in 0..=b {
            *acc.entry(Exp(e.0 + j, e.1 + j)).or_default() += w * binomial(b, j);
        }
    }
    let degree = match p.support() {
        Support::Total => p.degree() + 2 * b,
        Support::Box => p.degree() + b,
    };
    HermBivarPoly::from_raw(p.support(), degree, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn modulus_squared_is_x2_plus_y2() {
        let p = HermBivarPoly::from_terms(Support::Total, 2, [(1, 1, c(1.0))]).unwrap();
        let f = ladder_to_real(&p);
        assert_eq!(f, RealBivarPoly::from_terms([(2, 0, 1.0), (0, 2, 1.0)]));
    }

    #[test]
    fn real_part_is_x() {
        let p = HermBivarPoly::from_terms(Support::Total, 1, [(1, 0, c(0.5))]).unwrap();
        assert_eq!(ladder_to_real(&p), RealBivarPoly::from_terms([(1, 0, 1.0)]));
    }

    #[test]
    fn p_squared_expansion() {
        let p = quadrature_to_ladder(&RealBivarPoly::from_terms([(0, 2, 1.0)]));
        assert!((p.coeff(2, 0) - c(-0.25)).norm() < 1e-15);
        assert!((p.coeff(0, 2) - c(-0.25)).norm() < 1e-15);
        assert!((p.coeff(1, 1) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn x_expansion() {
        let p = quadrature_to_ladder(&RealBivarPoly::from_terms([(1, 0, 1.0)]));
        assert_eq!(p.coeff(1, 0), c(0.5));
        assert_eq!(p.coeff(0, 1), c(0.5));
    }

    #[test]
    fn polar_of_alpha_squared_plus_conj() {
        let p = HermBivarPoly::from_terms(Support::Total, 2, [(0, 2, c(1.0))]).unwrap();
        let qs = polar_decompose(&p);
        assert_eq!(qs.len(), 3);
        for th in [0.0, 0.4, 1.3] {
            assert!((qs[2].eval(th) - 2.0 * (2.0 * th).cos()).abs() < 1e-12);
            assert_eq!(qs[0].eval(th), 0.0);
        }
    }

    #[test]
    fn pascal_boundary_rules() {
        let q0 = TrigPoly::constant(1.0);
        let q1 = TrigPoly::constant(3.0);
        let out = pascal_step(&[q0.clone(), q1.clone()]);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], q0);
        assert_eq!(out[1].coeff(0), c(4.0));
        assert_eq!(out[2], q1);
        let single = pascal_step(std::slice::from_ref(&q0));
        assert_eq!(single, vec![q0.clone(), q0]);
    }

    #[test]
    fn line_restriction_signs() {
        // x² − y²
        let p = quadrature_to_ladder(&RealBivarPoly::from_terms([(2, 0, 1.0), (0, 2, -1.0)]));
        let f = restrict_to_line(&p, std::f64::consts::FRAC_PI_2);
        assert_eq!(f.degree(), Some(2));
        assert!((f.coeff(2) + 1.0).abs() < 1e-14);
        assert_eq!(f.coeff(0), 0.0);
    }

    #[test]
    fn reznick_of_one() {
        let one = HermBivarPoly::constant(1.0);
        let p = reznick_multiply(&one, 2);
        assert_eq!(p.coeff(0, 0), c(1.0));
        assert_eq!(p.coeff(1, 1), c(2.0));
        assert_eq!(p.coeff(2, 2), c(1.0));
        assert_eq!(p.degree(), 4);
        assert_eq!(reznick_multiply(&one, 0), one);
    }
}
