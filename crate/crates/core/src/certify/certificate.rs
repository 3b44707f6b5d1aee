use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{
    graded_lex_basis, ladder_to_real, pascal_steps, polar_decompose, restrict_to_line, Exp,
    HermBivarPoly, RealBivarPoly, UnivariatePoly,
};
use crate::quantum::hermitian_min_eig;

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateKind {
    /// `f = mᵀ G m`.
    SosGram,
    /// `(1 + x² + y²)^b f = mᵀ G m`.
    Reznick { b: usize },
    /// After `b` Pascal steps every `q_s` is a Toeplitz trace of `Q_s ⪰ 0`.
    Pfr { b: usize },
    /// Univariate `f = vᵀ H v`.
    UnivariateSos,
    /// One univariate Hankel certificate per line angle.
    Rays { angles: Vec<f64> },
}

impl CertificateKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CertificateKind::SosGram => "sos-gram",
            CertificateKind::Reznick { .. } => "reznick",
            CertificateKind::Pfr { .. } => "pfr",
            CertificateKind::UnivariateSos => "univariate-sos",
            CertificateKind::Rays { .. } => "rays",
        }
    }

    /// Hierarchy level (multiplier exponent), where meaningful.
    pub fn level(&self) -> Option<usize> {
        match self {
            CertificateKind::Reznick { b } | CertificateKind::Pfr { b } => Some(*b),
            CertificateKind::SosGram => Some(0),
            _ => None,
        }
    }
}

/// A bundle of PSD matrices proving nonnegativity of a polynomial.
///
/// Real certificates store real matrices with zero imaginary part. PFR
/// certificates keep one (possibly empty) block per `q_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub blocks: Vec<DMatrix<Complex64>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyTolerance {
    /// Allowed coefficient residual relative to the largest target coefficient.
    pub residual: f64,
    /// Allowed negative eigenvalue relative to the largest target coefficient.
    pub psd: f64,
}

impl Default for VerifyTolerance {
    fn default() -> Self {
        Self {
            residual: 1e-7,
            psd: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub residual: f64,
    pub scale: f64,
    pub min_eigenvalue: f64,
    pub ok: bool,
}

fn gram_poly(g: &DMatrix<Complex64>) -> Result<RealBivarPoly> {
    let n = g.nrows();
    let mut d = 0;
    while (d + 1) * (d + 2) / 2 < n {
        d += 1;
    }
    if (d + 1) * (d + 2) / 2 != n {
        return Err(Error::InvalidArgument(format!(
            "Gram block of side {n} matches no monomial basis"
        )));
    }
    let basis = graded_lex_basis(d);
    let mut f = RealBivarPoly::zero();
    for r in 0..n {
        for c in 0..n {
            let e: Exp = basis[r] + basis[c];
            f.add_term(e.0, e.1, g[(r, c)].re);
        }
    }
    Ok(f)
}

fn hankel_poly(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut c = vec![0.0; (2 * n).saturating_sub(1)];
    for i in 0..n {
        for j in 0..n {
            c[i + j] += h[(i, j)].re;
        }
    }
    c
}

fn uni_residual(target: &[f64], got: &[f64]) -> f64 {
    let n = target.len().max(got.len());
    (0..n)
        .map(|i| (target.get(i).unwrap_or(&0.0) - got.get(i).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

impl Certificate {
    pub fn level(&self) -> Option<usize> {
        self.kind.level()
    }

    fn min_eig(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(hermitian_min_eig)
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the reassembly identity against a bivariate polynomial.
    pub fn verify(&self, p: &HermBivarPoly, tol: &VerifyTolerance) -> Result<VerifyReport> {
        let (residual, scale) = match &self.kind {
            CertificateKind::SosGram | CertificateKind::Reznick { .. } => {
                let b = self.level().unwrap_or(0);
                let target = RealBivarPoly::reznick_multiplier(b).mul(&ladder_to_real(p));
                let [g] = self.blocks.as_slice() else {
                    return Err(Error::InvalidArgument(
                        "Gram certificate must hold exactly one block".into(),
                    ));
                };
                let got = gram_poly(g)?;
                (target.max_coeff_diff(&got), target.max_abs_coeff())
            }
            CertificateKind::Pfr { b } => {
                let qs = pascal_steps(&polar_decompose(p), *b);
                let n = qs.len().max(self.blocks.len());
                let mut worst: f64 = 0.0;
                let mut scale: f64 = 0.0;
                for s in 0..n {
                    let q = qs.get(s);
                    let blk = self.blocks.get(s);
                    let size = blk.map_or(0, |m| m.nrows());
                    let t = q.map_or(0, |q| q.half_degree()).max(size);
                    for j in 0..=t {
                        let want = q.map_or(Complex64::default(), |q| q.coeff(j as isize));
                        scale = scale.max(want.norm());
                        let mut got = Complex64::default();
                        if j < size {
                            let m = blk.unwrap();
                            for k in 0..(size - j) {
                                got += m[(k + j, k)];
                            }
                        }
                        worst = worst.max((want - got).norm());
                    }
                }
                (worst, scale)
            }
            CertificateKind::Rays { angles } => {
                if angles.len() != self.blocks.len() {
                    return Err(Error::InvalidArgument(
                        "rays certificate needs one block per angle".into(),
                    ));
                }
                let mut worst: f64 = 0.0;
                let mut scale: f64 = 0.0;
                for (th, h) in angles.iter().zip(&self.blocks) {
                    let f = restrict_to_line(p, *th);
                    scale = scale.max(f.max_abs_coeff());
                    worst = worst.max(uni_residual(f.coeffs(), &hankel_poly(h)));
                }
                (worst, scale)
            }
            CertificateKind::UnivariateSos => {
                return Err(Error::InvalidArgument(
                    "univariate certificate checked against a bivariate polynomial".into(),
                ))
            }
        };
        Ok(self.report(residual, scale, tol))
    }

    /// Checks a univariate Hankel certificate.
    pub fn verify_univariate(&self, f: &UnivariatePoly, tol: &VerifyTolerance) -> Result<VerifyReport> {
        let [h] = self.blocks.as_slice() else {
            return Err(Error::InvalidArgument(
                "univariate certificate must hold exactly one block".into(),
            ));
        };
        if self.kind != CertificateKind::UnivariateSos {
            return Err(Error::InvalidArgument(format!(
                "expected a univariate certificate, got {}",
                self.kind.tag()
            )));
        }
        let residual = uni_residual(f.coeffs(), &hankel_poly(h));
        Ok(self.report(residual, f.max_abs_coeff(), tol))
    }

    fn report(&self, residual: f64, scale: f64, tol: &VerifyTolerance) -> VerifyReport {
        let min_eigenvalue = self.min_eig();
        let ok = residual <= tol.residual * scale.max(1.0) && min_eigenvalue >= -tol.psd * scale.max(1.0);
        VerifyReport {
            residual,
            scale,
            min_eigenvalue,
            ok,
        }
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            kind: self.kind.tag().to_string(),
            level: match self.kind {
                CertificateKind::Reznick { b } | CertificateKind::Pfr { b } => Some(b),
                _ => None,
            },
            angles: match &self.kind {
                CertificateKind::Rays { angles } => Some(angles.clone()),
                _ => None,
            },
            blocks: self.blocks.iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self> {
        let need_level = || {
            j.level.ok_or_else(|| {
                Error::InvalidArgument(format!("{} certificate needs a level", j.kind))
            })
        };
        let kind = match j.kind.as_str() {
            "sos-gram" => CertificateKind::SosGram,
            "reznick" => CertificateKind::Reznick { b: need_level()? },
            "pfr" => CertificateKind::Pfr { b: need_level()? },
            "univariate-sos" => CertificateKind::UnivariateSos,
            "rays" => CertificateKind::Rays {
                angles: j.angles.clone().ok_or_else(|| {
                    Error::InvalidArgument("rays certificate needs angles".into())
                })?,
            },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown certificate kind {other:?}"
                )))
            }
        };
        let blocks = j
            .blocks
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, blocks })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    pub blocks: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        let im = if m.iter().all(|c| c.im == 0.0) {
            Vec::new()
        } else {
            rows(|c| c.im)
        };
        Self {
            re: rows(|c| c.re),
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.re.len();
        if self.re.iter().any(|r| r.len() != n)
            || (!self.im.is_empty() && (self.im.len() != n || self.im.iter().any(|r| r.len() != n)))
        {
            return Err(Error::NotSquare {
                rows: n,
                cols: self.re.first().map_or(0, |r| r.len()),
            });
        }
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            Complex64::new(self.re[i][j], im)
        }))
    }
}
