//! Nonnegativity certificates.
//!
//! * SOS: `f = mᵀ G m` with `G ⪰ 0` over the graded-lex monomial basis.
//! * Reznick: `(1 + x² + y²)^b f` is SOS for some `b`.
//! * Pólya–Fejér–Riesz (PFR): write `p = Σ_s q_s(θ) r^s`, multiply by `(1 + r)^b`
//!   (Pascal steps on the `q_s`) and require every `q_s` to be a nonnegative
//!   trigonometric polynomial, certified by a Toeplitz-trace PSD matrix.
//! * Univariate SOS and the finite-lines relaxation.
//!
//! Each certifier reports "certified at level b" or "not certified up to b_max";
//! failure never claims that the polynomial is negative somewhere.

mod certificate;
mod constraints;
mod hermgram;
mod sizes;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use certificate::{
    Certificate, CertificateJson, CertificateKind, MatrixJson, VerifyReport, VerifyTolerance,
};
pub use constraints::{
    add_fejer_riesz, add_fejer_riesz_scaled, add_hankel_sos, add_hankel_sos_scaled, add_sos_gram,
    add_sos_gram_scaled, extract_hermitian, gram_half_degree, lin_trig_scale, real_coeffs,
    trig_coeffs, uni_coeffs, Affine, FrBlock, LinTrig, ScaledBlock,
};
pub(crate) use constraints::herm_entry;
pub use hermgram::{add_hermitian_gram, charge_class, charge_modulus, herm_coeffs, HermGram};
pub use sizes::{
    pfr_half_degrees, pfr_variable_count, real_degree, reznick_gram_side, reznick_variable_count,
};

use crate::error::{Error, Result};
use crate::polyalg::{
    pascal_steps, polar_decompose, restrict_to_line, HermBivarPoly,
    RealBivarPoly, TrigPoly, UnivariatePoly,
};
use crate::sdpcore::{Backend, ClarabelBackend, ConicProblem, SolveOptions, Status};

/// Outcome of a hierarchy search.
#[derive(Clone, Debug)]
pub enum CertifyOutcome {
    Certified {
        level: usize,
        certificate: Certificate,
    },
    /// Each attempted level with the solver status that ended it. A level whose
    /// solve succeeded but whose certificate failed re-verification is reported
    /// as a numerical failure.
    NotCertified { attempts: Vec<(usize, Status)> },
}

impl CertifyOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, CertifyOutcome::Certified { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified { certificate, .. } => Some(certificate),
            CertifyOutcome::NotCertified { .. } => None,
        }
    }

    pub fn level(&self) -> Option<usize> {
        match self {
            CertifyOutcome::Certified { level, .. } => Some(*level),
            CertifyOutcome::NotCertified { .. } => None,
        }
    }
}

/// Shared settings for the certifiers.
pub struct Certifier<'a> {
    pub backend: &'a dyn Backend,
    pub opts: SolveOptions,
    pub tolerance: VerifyTolerance,
}

impl Default for Certifier<'static> {
    fn default() -> Self {
        Self {
            backend: &ClarabelBackend,
            opts: SolveOptions::default(),
            tolerance: VerifyTolerance::default(),
        }
    }
}

fn real_block(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

impl Certifier<'_> {
    /// Solves a pure feasibility problem; on success, assembles and re-verifies a certificate.
    fn attempt(
        &self,
        p: &ConicProblem,
        build: impl FnOnce(&[DMatrix<f64>]) -> Certificate,
        verify: impl FnOnce(&Certificate) -> Result<VerifyReport>,
    ) -> Result<std::result::Result<Certificate, Status>> {
        let r = self.backend.solve(p, &self.opts)?;
        if r.status != Status::Optimal {
            return Ok(Err(r.status));
        }
        let cert = build(&r.blocks);
        if verify(&cert)?.ok {
            Ok(Ok(cert))
        } else {
            Ok(Err(Status::NumericalFailure))
        }
    }

    fn gram_level(&self, f: &RealBivarPoly, b: usize) -> Result<std::result::Result<Certificate, Status>> {
        let target = RealBivarPoly::reznick_multiplier(b).mul(f);
        let mut p = ConicProblem::new();
        add_sos_gram(&mut p, &real_coeffs(&Affine::fixed(target)), "G");
        let kind = if b == 0 {
            CertificateKind::SosGram
        } else {
            CertificateKind::Reznick { b }
        };
        let herm = crate::polyalg::quadrature_to_ladder(f);
        self.attempt(
            &p,
            |blocks| Certificate {
                kind,
                blocks: vec![real_block(&blocks[0])],
            },
            |c| c.verify(&herm, &self.tolerance),
        )
    }

    /// Plain SOS test. Odd-degree polynomials are rejected without a solve.
    pub fn certify_sos(&self, f: &RealBivarPoly) -> Result<CertifyOutcome> {
        if f.degree() % 2 == 1 {
            return Ok(CertifyOutcome::NotCertified { attempts: vec![] });
        }
        Ok(match self.gram_level(f, 0)? {
            Ok(certificate) => CertifyOutcome::Certified {
                level: 0,
                certificate,
            },
            Err(s) => CertifyOutcome::NotCertified {
                attempts: vec![(0, s)],
            },
        })
    }

    /// Smallest `b ≤ b_max` with `(1 + x² + y²)^b f` SOS.
    pub fn certify_reznick(&self, f: &RealBivarPoly, b_max: usize) -> Result<CertifyOutcome> {
        if f.degree() % 2 == 1 {
            return Ok(CertifyOutcome::NotCertified { attempts: vec![] });
        }
        let mut attempts = Vec::new();
        for b in 0..=b_max {
            match self.gram_level(f, b)? {
                Ok(certificate) => {
                    return Ok(CertifyOutcome::Certified {
                        level: b,
                        certificate,
                    })
                }
                Err(s) => attempts.push((b, s)),
            }
        }
        Ok(CertifyOutcome::NotCertified { attempts })
    }

    /// Fejér–Riesz test of a single trigonometric polynomial. Real
    /// coefficients get a real `Q`.
    pub fn fejer_riesz_check(&self, q: &TrigPoly) -> Result<CertifyOutcome> {
        let complex = !q.is_real(0.0);
        let lt = trig_coeffs(&Affine::fixed(vec![q.clone()])).remove(0);
        let mut p = ConicProblem::new();
        let Some(fr) = add_fejer_riesz(&mut p, &lt, complex, "Q") else {
            return Ok(CertifyOutcome::Certified {
                level: 0,
                certificate: Certificate {
                    kind: CertificateKind::Pfr { b: 0 },
                    blocks: vec![DMatrix::zeros(0, 0)],
                },
            });
        };
        let r = self.backend.solve(&p, &self.opts)?;
        if r.status != Status::Optimal {
            return Ok(CertifyOutcome::NotCertified {
                attempts: vec![(0, r.status)],
            });
        }
        let qm = fr.extract(&r.blocks[fr.block.0]);
        Ok(CertifyOutcome::Certified {
            level: 0,
            certificate: Certificate {
                kind: CertificateKind::Pfr { b: 0 },
                blocks: vec![qm],
            },
        })
    }

    fn pfr_level(&self, p: &HermBivarPoly, b: usize) -> Result<std::result::Result<Certificate, Status>> {
        let qs = pascal_steps(&polar_decompose(p), b);
        let complex = qs.iter().any(|q| !q.is_real(0.0));
        let lts = trig_coeffs(&Affine::fixed(qs));
        let mut prob = ConicProblem::new();
        let frs: Vec<Option<FrBlock>> = lts
            .iter()
            .enumerate()
            .map(|(s, lt)| {
                let scale = lin_trig_scale(lt).max(f64::MIN_POSITIVE);
                add_fejer_riesz_scaled(&mut prob, lt, complex, &format!("Q{s}"), scale)
            })
            .collect();
        self.attempt(
            &prob,
            |blocks| Certificate {
                kind: CertificateKind::Pfr { b },
                blocks: frs
                    .iter()
                    .map(|fr| match fr {
                        Some(fr) => fr.extract(&blocks[fr.block.0]),
                        None => DMatrix::zeros(0, 0),
                    })
                    .collect(),
            },
            |c| c.verify(p, &self.tolerance),
        )
    }

    /// Smallest `b' ≤ b_max` at which every Pascal-smoothed `q_s` passes Fejér–Riesz.
    pub fn certify_pfr(&self, p: &HermBivarPoly, b_max: usize) -> Result<CertifyOutcome> {
        let mut attempts = Vec::new();
        for b in 0..=b_max {
            match self.pfr_level(p, b)? {
                Ok(certificate) => {
                    return Ok(CertifyOutcome::Certified {
                        level: b,
                        certificate,
                    })
                }
                Err(s) => attempts.push((b, s)),
            }
        }
        Ok(CertifyOutcome::NotCertified { attempts })
    }

    /// Univariate SOS, which is equivalent to nonnegativity on ℝ.
    pub fn certify_univariate(&self, f: &UnivariatePoly) -> Result<CertifyOutcome> {
        if f.degree().is_some_and(|d| d % 2 == 1) {
            return Ok(CertifyOutcome::NotCertified { attempts: vec![] });
        }
        let mut p = ConicProblem::new();
        let h = add_hankel_sos_scaled(&mut p, &uni_coeffs(&Affine::fixed(f.clone())), "H", true);
        let res = self.attempt(
            &p,
            |blocks| Certificate {
                kind: CertificateKind::UnivariateSos,
                blocks: vec![real_block(&h.unscale(&blocks[h.block.0]))],
            },
            |c| c.verify_univariate(f, &self.tolerance),
        )?;
        Ok(match res {
            Ok(certificate) => CertifyOutcome::Certified {
                level: 0,
                certificate,
            },
            Err(s) => CertifyOutcome::NotCertified {
                attempts: vec![(0, s)],
            },
        })
    }

    /// Tests `p` along each line through the origin. Passing every line is
    /// necessary, not sufficient, for `p ≥ 0`.
    pub fn check_lines(&self, p: &HermBivarPoly, angles: &RaySet) -> Result<LinesReport> {
        let mut verdicts = Vec::with_capacity(angles.len());
        let mut blocks = Vec::with_capacity(angles.len());
        for &theta in angles.angles() {
            let f = restrict_to_line(p, theta);
            let out = self.certify_univariate(&f)?;
            let certified = out.is_certified();
            if let CertifyOutcome::Certified { certificate, .. } = out {
                blocks.push(certificate.blocks.into_iter().next().unwrap());
            }
            verdicts.push(LineVerdict { theta, certified });
        }
        let certificate = if verdicts.iter().all(|v| v.certified) {
            Some(Certificate {
                kind: CertificateKind::Rays {
                    angles: angles.angles().to_vec(),
                },
                blocks,
            })
        } else {
            None
        };
        Ok(LinesReport {
            verdicts,
            certificate,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineVerdict {
    pub theta: f64,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct LinesReport {
    pub verdicts: Vec<LineVerdict>,
    /// Present when every line passed.
    pub certificate: Option<Certificate>,
}

impl LinesReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.certified)
    }
}

/// Directions `θ ∈ [0, π)` of lines through the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct RaySet {
    angles: Vec<f64>,
}

impl RaySet {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument("ray set must not be empty".into()));
        }
        if let Some(a) = angles.iter().find(|a| !(0.0..PI).contains(*a)) {
            return Err(Error::InvalidArgument(format!("angle {a} outside [0, π)")));
        }
        Ok(Self { angles })
    }

    /// `θ_i = iπ/n`, `i = 0..n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i as f64 * PI / n as f64).collect())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// [`Certifier::certify_sos`] with default settings.
pub fn certify_sos(f: &RealBivarPoly) -> Result<CertifyOutcome> {
    Certifier::default().certify_sos(f)
}

/// [`Certifier::certify_reznick`] with default settings.
pub fn certify_reznick(f: &RealBivarPoly, b_max: usize) -> Result<CertifyOutcome> {
    Certifier::default().certify_reznick(f, b_max)
}

/// [`Certifier::certify_pfr`] with default settings.
pub fn certify_pfr(p: &HermBivarPoly, b_max: usize) -> Result<CertifyOutcome> {
    Certifier::default().certify_pfr(p, b_max)
}

/// [`Certifier::certify_univariate`] with default settings.
pub fn certify_univariate(f: &UnivariatePoly) -> Result<CertifyOutcome> {
    Certifier::default().certify_univariate(f)
}

/// [`Certifier::fejer_riesz_check`] with default settings.
pub fn fejer_riesz_check(q: &TrigPoly) -> Result<CertifyOutcome> {
    Certifier::default().fejer_riesz_check(q)
}

/// [`Certifier::check_lines`] with default settings.
pub fn check_lines(p: &HermBivarPoly, angles: &RaySet) -> Result<LinesReport> {
    Certifier::default().check_lines(p, angles)
}
