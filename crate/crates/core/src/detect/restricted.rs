//! Criteria that see only part of the state: photon-number moments,
//! photon-number probabilities, or moments of one or both quadratures.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DetectionResult, Detector};
use crate::certify::{
    add_hankel_sos, Certificate, CertificateKind, VerifyReport,
};
use crate::error::{Error, Result};
use crate::polyalg::{graded_lex_basis, quadrature_to_ladder, Exp, HermBivarPoly, RealBivarPoly, Support, UnivariatePoly};
use crate::quantum::{quadrature_moment, MomentTable};
use crate::sdpcore::{BlockId, ConicProblem, LinExpr, SolveResult, Var};

/// Normalization of a restricted-data problem.
#[derive(Clone, Debug)]
pub enum DataNormalization<T> {
    GramTrace,
    /// The witness expectation on this reference data is 1.
    Reference(T),
}

impl<T> DataNormalization<T> {
    pub fn label(&self) -> &'static str {
        match self {
            DataNormalization::GramTrace => "gram-trace",
            DataNormalization::Reference(_) => "reference",
        }
    }
}

/// Normalization for photon-probability witnesses `W = Σ w_n |n⟩⟨n|`.
#[derive(Clone, Debug, Default)]
pub enum ProbNormalization {
    /// `w_0 + w_N = 2` for probabilities up to `N`.
    #[default]
    Endpoints,
    /// `Σ coeffs_n w_n = rhs`.
    Linear { coeffs: Vec<f64>, rhs: f64 },
    GramTrace,
}

impl ProbNormalization {
    fn label(&self) -> &'static str {
        match self {
            ProbNormalization::Endpoints => "endpoints",
            ProbNormalization::Linear { .. } => "linear",
            ProbNormalization::GramTrace => "gram-trace",
        }
    }
}

/// Raw quadrature moments `⟨X^j⟩` and/or `⟨P^j⟩`, `j = 0..=d`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadratureData {
    pub x: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
}

/// `⟨a†^l a^l⟩` from `⟨n^j⟩` through the falling factorials
/// `n(n−1)…(n−l+1) = Σ_j s(l,j) n^j` (signed Stirling numbers of the first kind).
pub fn factorial_moments(raw: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mut out = Vec::with_capacity(raw.len());
    for l in 0..raw.len() {
        out.push(poly.iter().zip(raw).map(|(c, m)| c * m).sum());
        // multiply by (n − l)
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= l as f64 * c;
        }
        poly = next;
    }
    out
}

/// `⟨n^j⟩`, `j = 0..=d`, from ladder moments via `n^j = Σ_l S(j,l) a†^l a^l`.
pub fn photon_number_moments(t: &MomentTable, d: usize) -> Result<Vec<f64>> {
    let mut f = Vec::with_capacity(d + 1);
    for l in 0..=d {
        f.push(t.get(l, l)?.re);
    }
    // Stirling numbers of the second kind, row by row
    let mut s = vec![1.0];
    let mut out = Vec::with_capacity(d + 1);
    for j in 0..=d {
        out.push(s.iter().zip(&f).map(|(a, b)| a * b).sum());
        let mut next = vec![0.0; j + 2];
        for (l, &c) in s.iter().enumerate() {
            next[l] += l as f64 * c;
            next[l + 1] += c;
        }
        s = next;
    }
    Ok(out)
}

fn quad_coeff(n: usize, k: usize) -> f64 {
    let lf = |m: usize| (2..=m).map(|v| v as f64).product::<f64>();
    lf(n) / (lf(n - 2 * k) * lf(k) * 8f64.powi(k as i32))
}

/// `⟨:X^n:⟩ = Σ_k n! / ((n−2k)! k! (−8)^k) ⟨X^{n−2k}⟩`.
pub fn normal_ordered_moments(raw: &[f64]) -> Vec<f64> {
    (0..raw.len())
        .map(|n| {
            (0..=n / 2)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * quad_coeff(n, k) * raw[n - 2 * k]
                })
                .sum()
        })
        .collect()
}

/// Inverse of [`normal_ordered_moments`]: `⟨X^n⟩ = Σ_k n! / ((n−2k)! k! 8^k) ⟨:X^{n−2k}:⟩`.
pub fn raw_quadrature_moments(normal: &[f64]) -> Vec<f64> {
    (0..normal.len())
        .map(|n| (0..=n / 2).map(|k| quad_coeff(n, k) * normal[n - 2 * k]).sum())
        .collect()
}

/// Raw `⟨X^j⟩` and `⟨P^j⟩` up to `d` from ladder moments.
pub fn quadrature_data(t: &MomentTable, d: usize) -> Result<QuadratureData> {
    let mut nx = Vec::with_capacity(d + 1);
    let mut np = Vec::with_capacity(d + 1);
    for j in 0..=d {
        nx.push(quadrature_moment(t, j, 0)?);
        np.push(quadrature_moment(t, 0, j)?);
    }
    Ok(QuadratureData {
        x: Some(raw_quadrature_moments(&nx)),
        p: Some(raw_quadrature_moments(&np)),
    })
}

fn scalars(p: &mut ConicProblem, prefix: &str, n: usize) -> Vec<Var> {
    (0..n)
        .map(|i| Var::scalar(p.add_scalar(format!("{prefix}{i}"))))
        .collect()
}

fn dot(vars: &[Var], vals: &[f64]) -> LinExpr {
    let mut e = LinExpr::new();
    for (v, &c) in vars.iter().zip(vals) {
        e.add(*v, c);
    }
    e
}

fn failed(r: &SolveResult, method: &str, norm: &str, template: HermBivarPoly) -> DetectionResult {
    DetectionResult {
        value: f64::NAN,
        status: r.status,
        method: method.into(),
        level: None,
        normalization: norm.into(),
        witness: template,
        observable: None,
        certificate: None,
        verification: None,
        rays: None,
    }
}

fn real_block(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

impl Detector<'_> {
    /// Even univariate witness `Σ c_i x^{2i}` with `c_i = scale_i · w_i`, certified by a Hankel SOS.
    fn even_univariate(
        &self,
        data: &[f64],
        scale: &[f64],
        norm: impl FnOnce(&mut ConicProblem, &[Var], BlockId),
        method: &str,
        norm_label: &str,
    ) -> Result<DetectionResult> {
        let n = data.len();
        let mut p = ConicProblem::new();
        let w = scalars(&mut p, "w", n);
        let mut f = vec![LinExpr::new(); 2 * n - 1];
        for i in 0..n {
            f[2 * i].add(w[i], scale[i]);
        }
        let h = add_hankel_sos(&mut p, &f, "hankel");
        norm(&mut p, &w, h);
        p.set_objective(dot(&w, data));
        let r = self.backend.solve(&p, &self.opts)?;
        let template = HermBivarPoly::zero(Support::Total, 2 * (n - 1));
        if !r.is_optimal() {
            return Ok(failed(&r, method, norm_label, template));
        }
        let mut witness = template;
        let mut target = vec![0.0; 2 * n - 1];
        for i in 0..n {
            let c = r.value(&LinExpr::var(w[i])) * scale[i];
            target[2 * i] = c;
            witness.set(i, i, Complex64::new(c, 0.0))?;
        }
        let certificate = Certificate {
            kind: CertificateKind::UnivariateSos,
            blocks: vec![real_block(&r.blocks[h.0])],
        };
        let verification = certificate
            .verify_univariate(&UnivariatePoly::new(target), &self.tolerance)
            .ok();
        Ok(DetectionResult {
            value: r.objective,
            status: r.status,
            method: method.into(),
            level: None,
            normalization: norm_label.into(),
            witness,
            observable: None,
            certificate: Some(certificate),
            verification,
            rays: None,
        })
    }

    /// Witness `Σ w_l |α|^{2l}` against photon-number moments `⟨n^j⟩`, `j = 0..=d`.
    pub fn detect_photon_number(
        &self,
        moments: &[f64],
        norm: &DataNormalization<Vec<f64>>,
    ) -> Result<DetectionResult> {
        if moments.len() < 2 {
            return Err(Error::InsufficientMoments {
                need: 1,
                have: moments.len().saturating_sub(1),
            });
        }
        let f = factorial_moments(moments);
        let reference = match norm {
            DataNormalization::Reference(r) => {
                if r.len() < moments.len() {
                    return Err(Error::InsufficientMoments {
                        need: moments.len() - 1,
                        have: r.len().saturating_sub(1),
                    });
                }
                Some(factorial_moments(&r[..moments.len()]))
            }
            DataNormalization::GramTrace => None,
        };
        let ones = vec![1.0; f.len()];
        self.even_univariate(
            &f,
            &ones,
            |p, w, h| match reference {
                Some(f0) => p.add_equality(dot(w, &f0), 1.0),
                None => {
                    let tr = p.trace_expr(h);
                    p.add_equality(tr, 1.0)
                }
            },
            "photon-number",
            norm.label(),
        )
    }

    /// Witness `Σ w_n |n⟩⟨n|` against photon-number probabilities `p_0 … p_N`;
    /// nonnegativity on coherent states is `Σ (w_n / n!) x^{2n} ≥ 0`. The returned
    /// witness polynomial holds the coefficients `w_n / n!`.
    pub fn detect_photon_probs(&self, probs: &[f64], norm: &ProbNormalization) -> Result<DetectionResult> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument("no probabilities given".into()));
        }
        if probs.iter().any(|&q| q < 0.0 || !q.is_finite()) {
            return Err(Error::InvalidArgument("probabilities must be nonnegative".into()));
        }
        if probs.iter().sum::<f64>() > 1.0 + 1e-9 {
            return Err(Error::InvalidArgument("probabilities sum to more than 1".into()));
        }
        let n = probs.len();
        let mut fact = 1.0;
        let scale: Vec<f64> = (0..n)
            .map(|i| {
                if i > 0 {
                    fact *= i as f64;
                }
                1.0 / fact
            })
            .collect();
        if let ProbNormalization::Linear { coeffs, .. } = norm {
            if coeffs.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "normalization has {} coefficients for {n} probabilities",
                    coeffs.len()
                )));
            }
        }
        self.even_univariate(
            probs,
            &scale,
            |p, w, h| match norm {
                ProbNormalization::Endpoints => {
                    let mut e = LinExpr::var(w[0]);
                    e.add(w[n - 1], 1.0);
                    p.add_equality(e, 2.0);
                }
                ProbNormalization::Linear { coeffs, rhs } => p.add_equality(dot(w, coeffs), *rhs),
                ProbNormalization::GramTrace => {
                    let tr = p.trace_expr(h);
                    p.add_equality(tr, 1.0)
                }
            },
            "photon-probs",
            norm.label(),
        )
    }

    /// Witnesses `q(x)`, `r(y)` or `q(x) + r(y)` against normally ordered
    /// quadrature moments.
    ///
    /// `q(x) + r(y) ≥ 0` everywhere iff the constant splits so that both parts
    /// are nonnegative, so joint data get one Hankel SOS block per axis and the
    /// normalization adds the two. The joint certificate is the sum of the two
    /// blocks embedded in the bivariate monomial basis.
    pub fn detect_quadrature(
        &self,
        data: &QuadratureData,
        norm: &DataNormalization<QuadratureData>,
    ) -> Result<DetectionResult> {
        let even = |v: &Option<Vec<f64>>| -> Option<Vec<f64>> {
            v.as_ref().filter(|m| m.len() >= 3).map(|m| {
                let d = (m.len() - 1) & !1;
                normal_ordered_moments(&m[..=d])
            })
        };
        let moments = [even(&data.x), even(&data.p)];
        if moments.iter().all(Option::is_none) {
            return Err(Error::InsufficientMoments { need: 2, have: 0 });
        }
        let reference = match norm {
            DataNormalization::GramTrace => None,
            DataNormalization::Reference(r) => {
                let pick = |mine: &Option<Vec<f64>>, theirs: &Option<Vec<f64>>| -> Result<Option<Vec<f64>>> {
                    match mine {
                        None => Ok(None),
                        Some(m) => {
                            let t = theirs
                                .as_ref()
                                .filter(|t| t.len() >= m.len())
                                .ok_or(Error::InsufficientMoments {
                                    need: m.len() - 1,
                                    have: theirs.as_ref().map_or(0, |t| t.len().saturating_sub(1)),
                                })?;
                            Ok(Some(normal_ordered_moments(&t[..m.len()])))
                        }
                    }
                };
                Some([pick(&moments[0], &r.x)?, pick(&moments[1], &r.p)?])
            }
        };

        let mut p = ConicProblem::new();
        let mut obj = LinExpr::new();
        let mut norm_expr = LinExpr::new();
        // (axis, coefficient variables, Hankel block)
        let mut axes: Vec<(usize, Vec<Var>, BlockId)> = Vec::new();
        for (axis, m) in moments.iter().enumerate() {
            let Some(m) = m else { continue };
            let vars = scalars(&mut p, if axis == 0 { "q" } else { "r" }, m.len());
            obj.add_scaled(&dot(&vars, m), 1.0);
            let f: Vec<LinExpr> = vars.iter().map(|&v| LinExpr::var(v)).collect();
            let block = add_hankel_sos(&mut p, &f, if axis == 0 { "hankel_x" } else { "hankel_p" });
            match &reference {
                None => norm_expr.add_scaled(&p.trace_expr(block), 1.0),
                Some(r) => {
                    let r = r[axis].as_ref().expect("reference picked for every axis present");
                    norm_expr.add_scaled(&dot(&vars, r), 1.0);
                }
            }
            axes.push((axis, vars, block));
        }
        p.add_equality(norm_expr, 1.0);
        p.set_objective(obj);

        let method = match (&moments[0], &moments[1]) {
            (Some(_), Some(_)) => "quadrature-xp",
            (Some(_), None) => "quadrature-x",
            _ => "quadrature-p",
        };
        let r = self.backend.solve(&p, &self.opts)?;
        let degree = axes.iter().map(|a| a.1.len() - 1).max().unwrap_or(0);
        if !r.is_optimal() {
            return Ok(failed(&r, method, norm.label(), HermBivarPoly::zero(Support::Total, degree)));
        }
        let exp = |axis: usize, i: usize| if axis == 0 { Exp(i, 0) } else { Exp(0, i) };
        let mut f = RealBivarPoly::zero();
        for (axis, vars, _) in &axes {
            for (i, v) in vars.iter().enumerate() {
                let e = exp(*axis, i);
                f.add_term(e.0, e.1, r.value(&LinExpr::var(*v)));
            }
        }
        let witness = quadrature_to_ladder(&f);
        let (certificate, verification): (Certificate, Option<VerifyReport>) = if axes.len() == 2 {
            let basis = graded_lex_basis(degree / 2);
            let pos: BTreeMap<Exp, usize> = basis.iter().enumerate().map(|(i, e)| (*e, i)).collect();
            let mut g = DMatrix::<f64>::zeros(basis.len(), basis.len());
            for (axis, _, block) in &axes {
                let h = &r.blocks[block.0];
                for i in 0..h.nrows() {
                    for j in 0..h.ncols() {
                        g[(pos[&exp(*axis, i)], pos[&exp(*axis, j)])] += h[(i, j)];
                    }
                }
            }
            let c = Certificate {
                kind: CertificateKind::SosGram,
                blocks: vec![real_block(&g)],
            };
            let v = c.verify(&witness, &self.tolerance).ok();
            (c, v)
        } else {
            let (axis, _, block) = &axes[0];
            let uni: Vec<f64> = (0..=degree)
                .map(|i| {
                    let e = exp(*axis, i);
                    f.coeff(e.0, e.1)
                })
                .collect();
            let c = Certificate {
                kind: CertificateKind::UnivariateSos,
                blocks: vec![real_block(&r.blocks[block.0])],
            };
            let v = c.verify_univariate(&UnivariatePoly::new(uni), &self.tolerance).ok();
            (c, v)
        };
        Ok(DetectionResult {
            value: r.objective,
            status: r.status,
            method: method.into(),
            level: None,
            normalization: norm.label().into(),
            witness,
            observable: None,
            certificate: Some(certificate),
            verification,
            rays: None,
        })
    }
}

pub fn detect_photon_number(
    moments: &[f64],
    norm: &DataNormalization<Vec<f64>>,
) -> Result<DetectionResult> {
    Detector::default().detect_photon_number(moments, norm)
}

pub fn detect_photon_probs(probs: &[f64], norm: &ProbNormalization) -> Result<DetectionResult> {
    Detector::default().detect_photon_probs(probs, norm)
}

pub fn detect_quadrature(
    data: &QuadratureData,
    norm: &DataNormalization<QuadratureData>,
) -> Result<DetectionResult> {
    Detector::default().detect_quadrature(data, norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_round_trip() {
        // |1⟩: ⟨n^j⟩ = 1 for j ≥ 1, factorial moments (1, 1, 0, 0)
        assert_eq!(factorial_moments(&[1.0, 1.0, 1.0, 1.0]), vec![1.0, 1.0, 0.0, 0.0]);
        let raw = [1.0, 0.3, 0.9];
        let nx = normal_ordered_moments(&raw);
        assert!((nx[2] - 0.65).abs() < 1e-15);
        let back = raw_quadrature_moments(&nx);
        assert!(back.iter().zip(raw).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn single_photon_probabilities() {
        let r = detect_photon_probs(&[0.0, 1.0, 0.0], &ProbNormalization::Endpoints).unwrap();
        assert!((r.value + std::f64::consts::SQRT_2).abs() < 1e-6, "{}", r.value);
        assert!(r.verification.unwrap().ok);
    }

    #[test]
    fn squeezed_x_detected() {
        let data = QuadratureData {
            x: Some(vec![1.0, 0.0, 0.15]),
            p: None,
        };
        let r = detect_quadrature(&data, &DataNormalization::GramTrace).unwrap();
        assert!(r.value < -1e-3, "{}", r.value);
    }
}
