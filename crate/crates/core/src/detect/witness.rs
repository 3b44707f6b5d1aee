//! Parametrized witnesses and the certificate constraints placed on them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DetectionResult, Method};
use crate::certify::{
    add_fejer_riesz_scaled, add_hankel_sos_scaled, add_hermitian_gram, add_sos_gram_scaled,
    charge_class, herm_coeffs, lin_trig_scale, real_coeffs, trig_coeffs,
    uni_coeffs, Affine, Certificate, CertificateKind, FrBlock, HermGram, RaySet, ScaledBlock,
    VerifyTolerance,
};
use crate::polyalg::{
    ladder_to_real, pascal_steps, polar_decompose, restrict_to_line, reznick_multiply, HermBivarPoly, RealBivarPoly,
};
use crate::sdpcore::{ConicProblem, LinExpr, SolveResult, Var};

/// Witness as `Σ var · basis`.
pub(super) type Terms = Vec<(Var, HermBivarPoly)>;

/// How to read the certificate back out of a solved problem.
///
/// All blocks are rescaled for conditioning (binomial monomial weights for
/// Gram and Hankel blocks, coefficient magnitude for Toeplitz blocks); traces
/// and certificates always refer to the unscaled matrices.
pub(super) enum CertPlan {
    Gram { block: ScaledBlock, b: usize },
    /// Charge-blocked Hermitian Gram, lifted to a real one on output.
    HermGram { gram: HermGram, b: usize },
    Pfr { blocks: Vec<Option<FrBlock>>, b: usize },
    Rays { blocks: Vec<ScaledBlock>, angles: Vec<f64> },
}

fn real_block(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

fn gram_kind(b: usize) -> CertificateKind {
    if b == 0 {
        CertificateKind::SosGram
    } else {
        CertificateKind::Reznick { b }
    }
}

/// Keeps the witness coordinates whose rotation charge `l − k` is a multiple
/// of `modulus` (1 keeps everything, 0 only charge 0).
///
/// When the data are invariant under `α → e^{2πi/n} α`, averaging a witness
/// over that group keeps its value and the hierarchy certificates, so the
/// restriction loses nothing for [`add_hierarchy`]. The lines relaxation is
/// not rotation invariant and must see every term.
pub(super) fn restrict_charge(terms: Terms, modulus: usize) -> Terms {
    if modulus == 1 {
        return terms;
    }
    terms
        .into_iter()
        .filter(|(_, w)| {
            w.terms()
                .all(|(e, _)| charge_class(e.1 as isize - e.0 as isize, modulus) == 0)
        })
        .collect()
}

impl CertPlan {
    /// Sum of the traces of all certificate blocks.
    pub(super) fn trace(&self, p: &ConicProblem) -> LinExpr {
        let mut e = LinExpr::new();
        match self {
            CertPlan::Gram { block, .. } => e.add_scaled(&block.trace_expr(), 1.0),
            CertPlan::HermGram { gram, .. } => e.add_scaled(&gram.trace_expr(), 1.0),
            CertPlan::Pfr { blocks, .. } => {
                for fr in blocks.iter().flatten() {
                    e.add_scaled(&fr.trace_expr(p), 1.0);
                }
            }
            CertPlan::Rays { blocks, .. } => {
                for b in blocks {
                    e.add_scaled(&b.trace_expr(), 1.0);
                }
            }
        }
        e
    }

    pub(super) fn build(&self, r: &SolveResult) -> Certificate {
        match self {
            CertPlan::Gram { block, b } => Certificate {
                kind: gram_kind(*b),
                blocks: vec![real_block(&block.unscale(&r.blocks[block.block.0]))],
            },
            CertPlan::HermGram { gram, b } => Certificate {
                kind: gram_kind(*b),
                blocks: vec![real_block(&gram.lift(&r.blocks))],
            },
            CertPlan::Pfr { blocks, b } => Certificate {
                kind: CertificateKind::Pfr { b: *b },
                blocks: blocks
                    .iter()
                    .map(|fr| match fr {
                        Some(fr) => fr.extract(&r.blocks[fr.block.0]),
                        None => DMatrix::zeros(0, 0),
                    })
                    .collect(),
            },
            CertPlan::Rays { blocks, angles } => Certificate {
                kind: CertificateKind::Rays {
                    angles: angles.clone(),
                },
                blocks: blocks
                    .iter()
                    .map(|b| real_block(&b.unscale(&r.blocks[b.block.0])))
                    .collect(),
            },
        }
    }
}

/// Scalars for a Hermitian coefficient pattern: one per diagonal entry, and a
/// real and (unless `real`) an imaginary part per off-diagonal pair.
pub(super) fn hermitian_scalars<B>(
    p: &mut ConicProblem,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    real: bool,
    mut basis: impl FnMut(usize, usize, Complex64) -> B,
) -> Vec<(Var, B)> {
    let mut out = Vec::new();
    for (k, l) in pairs {
        let re = p.add_scalar(format!("re{k}_{l}"));
        out.push((Var::scalar(re), basis(k, l, Complex64::new(1.0, 0.0))));
        if k != l && !real {
            let im = p.add_scalar(format!("im{k}_{l}"));
            out.push((Var::scalar(im), basis(k, l, Complex64::new(0.0, 1.0))));
        }
    }
    out
}

/// Constrains the witness to the cone certified by `method`. Every term must
/// have charge divisible by `modulus` (see [`restrict_charge`]); for
/// `modulus != 1` the Reznick Gram matrix splits into charge blocks.
pub(super) fn add_hierarchy(
    p: &mut ConicProblem,
    terms: &Terms,
    method: Method,
    modulus: usize,
) -> CertPlan {
    let affine = Affine::linear(terms.clone());
    match method {
        Method::Reznick(b) if modulus != 1 => {
            let f = herm_coeffs(&affine.map(|w| reznick_multiply(w, b)));
            let gram = add_hermitian_gram(p, &f, modulus, "gram");
            CertPlan::HermGram { gram, b }
        }
        Method::Reznick(b) => {
            let mult = RealBivarPoly::reznick_multiplier(b);
            let f = affine.map(|w| mult.mul(&ladder_to_real(w)));
            let block = add_sos_gram_scaled(p, &real_coeffs(&f), "gram", true);
            CertPlan::Gram { block, b }
        }
        Method::Pfr(b) => {
            let qs = affine.map(|w| pascal_steps(&polar_decompose(w), b));
            let blocks = trig_coeffs(&qs)
                .iter()
                .enumerate()
                .map(|(s, lt)| {
                    let scale = lin_trig_scale(lt).max(f64::MIN_POSITIVE);
                    add_fejer_riesz_scaled(p, lt, !lt.is_real(), &format!("toeplitz{s}"), scale)
                })
                .collect();
            CertPlan::Pfr { blocks, b }
        }
    }
}

/// Univariate nonnegativity of the witness along each line `α = r e^{iθ}`.
pub(super) fn add_lines(p: &mut ConicProblem, terms: &Terms, angles: &RaySet) -> CertPlan {
    let affine = Affine::linear(terms.clone());
    let blocks = angles
        .angles()
        .iter()
        .enumerate()
        .map(|(i, &th)| {
            let f = affine.map(|w| restrict_to_line(w, th));
            add_hankel_sos_scaled(p, &uni_coeffs(&f), &format!("line{i}"), true)
        })
        .collect();
    CertPlan::Rays {
        blocks,
        angles: angles.angles().to_vec(),
    }
}

/// `Σ value(var) · basis`.
pub(super) fn assemble(terms: &Terms, r: &SolveResult, template: &HermBivarPoly) -> HermBivarPoly {
    let mut w = template.scaled(0.0);
    for (v, b) in terms {
        let x = r.value(&LinExpr::var(*v));
        if x != 0.0 {
            w = w.add(&b.scaled(x));
        }
    }
    w
}

/// Packs a solve into a [`DetectionResult`], re-verifying the certificate.
#[allow(clippy::too_many_arguments)]
pub(super) fn finish(
    r: &SolveResult,
    terms: &Terms,
    template: &HermBivarPoly,
    plan: &CertPlan,
    method: &str,
    level: Option<usize>,
    normalization: &str,
    rays: Option<usize>,
    tol: &VerifyTolerance,
) -> DetectionResult {
    if !r.is_optimal() {
        return DetectionResult {
            value: f64::NAN,
            status: r.status,
            method: method.to_string(),
            level,
            normalization: normalization.to_string(),
            witness: template.scaled(0.0),
            observable: None,
            certificate: None,
            verification: None,
            rays,
        };
    }
    let witness = assemble(terms, r, template);
    let certificate = plan.build(r);
    let verification = certificate.verify(&witness, tol).ok();
    DetectionResult {
        value: r.objective,
        status: r.status,
        method: method.to_string(),
        level,
        normalization: normalization.to_string(),
        witness,
        observable: None,
        certificate: Some(certificate),
        verification,
        rays,
    }
}
