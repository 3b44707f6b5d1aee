use super::witness::{
    add_hierarchy, add_lines, finish, hermitian_scalars, restrict_charge, CertPlan, Terms,
};
use super::{DetectionResult, Detector, Method, Normalization, WitnessSupport};
use crate::certify::{charge_modulus, RaySet};
use crate::error::{Error, Result};
use crate::polyalg::{graded_lex_basis, HermBivarPoly, Support};
use crate::quantum::{witness_expectation, MomentTable};
use crate::sdpcore::{ConicProblem, LinExpr};

/// Real moments admit a real optimal witness: averaging `W` with its
/// coefficient-wise conjugate keeps both the value and nonnegativity.
const REAL_TOL: f64 = 1e-12;

fn light_terms(p: &mut ConicProblem, degree: usize, support: WitnessSupport, real: bool) -> Terms {
    let pairs: Vec<(usize, usize)> = graded_lex_basis(degree)
        .into_iter()
        .filter(|e| e.0 <= e.1)
        .filter(|e| support == WitnessSupport::Full || e.0 == e.1)
        .map(|e| (e.0, e.1))
        .collect();
    hermitian_scalars(p, pairs, real, |k, l, c| {
        let mut w = HermBivarPoly::zero(Support::Total, degree);
        w.set(k, l, c).expect("k + l <= degree");
        w
    })
}

/// Moments below this (relative to the largest) count as zero when looking
/// for rotation symmetry.
const SYMMETRY_TOL: f64 = 1e-12;

/// Largest `n` with every nonzero moment `⟨a†^k a^l⟩`, `k + l ≤ degree`, at a
/// charge `l − k` divisible by `n`.
pub(super) fn moment_modulus<'a>(tables: impl IntoIterator<Item = &'a MomentTable>, degree: usize) -> usize {
    let mut charges = Vec::new();
    for t in tables {
        let scale = t.entries().map(|(_, c)| c.norm()).fold(1.0, f64::max);
        charges.extend(
            t.entries()
                .filter(|(e, c)| e.total() <= degree && c.norm() > SYMMETRY_TOL * scale)
                .map(|(e, _)| e.1 as isize - e.0 as isize),
        );
    }
    charge_modulus(charges)
}

fn objective(terms: &Terms, t: &MomentTable) -> Result<LinExpr> {
    let mut e = LinExpr::new();
    for (v, w) in terms {
        e.add(*v, witness_expectation(w, t)?);
    }
    Ok(e)
}

fn check_degree(t: &MomentTable, degree: usize) -> Result<()> {
    if t.degree() < degree {
        return Err(Error::InsufficientMoments {
            need: degree,
            have: t.degree(),
        });
    }
    Ok(())
}

impl Detector<'_> {
    fn light_problem(
        &self,
        t: &MomentTable,
        degree: usize,
        norm: &Normalization,
        support: WitnessSupport,
        modulus: usize,
        constrain: impl FnOnce(&mut ConicProblem, &Terms) -> CertPlan,
    ) -> Result<(ConicProblem, Terms, CertPlan)> {
        check_degree(t, degree)?;
        let real = t.is_real(REAL_TOL)
            && match norm {
                Normalization::GramTrace => true,
                Normalization::Reference(t0) => t0.is_real(REAL_TOL),
            };
        let mut p = ConicProblem::new();
        let terms = restrict_charge(light_terms(&mut p, degree, support, real), modulus);
        let plan = constrain(&mut p, &terms);
        match norm {
            Normalization::GramTrace => {
                let tr = plan.trace(&p);
                p.add_equality(tr, 1.0);
            }
            Normalization::Reference(t0) => {
                check_degree(t0, degree)?;
                p.add_equality(objective(&terms, t0)?, 1.0);
            }
        }
        p.set_objective(objective(&terms, t)?);
        Ok((p, terms, plan))
    }

    /// `v_{D,b}`: minimal `⟨W⟩` over degree-`D` witnesses certified at the given level.
    pub fn detect_light(
        &self,
        t: &MomentTable,
        degree: usize,
        method: Method,
        norm: &Normalization,
        support: WitnessSupport,
    ) -> Result<DetectionResult> {
        let modulus = match norm {
            Normalization::GramTrace => moment_modulus([t], degree),
            Normalization::Reference(t0) => moment_modulus([t, t0], degree),
        };
        let (p, terms, plan) = self.light_problem(t, degree, norm, support, modulus, |p, terms| {
            add_hierarchy(p, terms, method, modulus)
        })?;
        let r = self.backend.solve(&p, &self.opts)?;
        Ok(finish(
            &r,
            &terms,
            &HermBivarPoly::zero(Support::Total, degree),
            &plan,
            method.tag(),
            Some(method.level()),
            norm.label(),
            None,
            &self.tolerance,
        ))
    }

    /// Lower bound on every `v_{D,b}`: the witness need only be nonnegative on
    /// the given lines.
    pub fn detect_light_lower(
        &self,
        t: &MomentTable,
        degree: usize,
        angles: &RaySet,
        norm: &Normalization,
        support: WitnessSupport,
    ) -> Result<DetectionResult> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument("no line angles given".into()));
        }
        let (p, terms, plan) =
            self.light_problem(t, degree, norm, support, 1, |p, terms| add_lines(p, terms, angles))?;
        let r = self.backend.solve(&p, &self.opts)?;
        Ok(finish(
            &r,
            &terms,
            &HermBivarPoly::zero(Support::Total, degree),
            &plan,
            "rays",
            None,
            norm.label(),
            Some(angles.len()),
            &self.tolerance,
        ))
    }
}
