use nalgebra::DMatrix;
use num_complex::Complex64;

use super::witness::{add_hierarchy, add_lines, finish, hermitian_scalars, CertPlan, Terms};
use crate::certify::charge_modulus;
use super::{DetectionResult, Detector, Method};
use crate::certify::RaySet;
use crate::error::{Error, Result};
use crate::polyalg::{HermBivarPoly, Support};
use crate::quantum::DickeState;
use crate::sdpcore::{ConicProblem, LinExpr, SolveResult, Var};
use crate::spinmap::{stereographic_poly, SpinObservable};

const NORMALIZATION: &str = "trace-v";

struct SpinProblem {
    problem: ConicProblem,
    terms: Terms,
    units: Vec<(Var, DMatrix<Complex64>)>,
    plan: CertPlan,
}

/// Largest `n` with every nonzero `ρ_ij` at `j − i` divisible by `n`.
fn state_modulus(s: &DickeState) -> usize {
    let rho = s.rho();
    let scale = rho.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let charges = (0..rho.nrows())
        .flat_map(|i| (0..rho.ncols()).map(move |j| (i, j)))
        .filter(|&(i, j)| rho[(i, j)].norm() > 1e-12 * scale)
        .map(|(i, j)| j as isize - i as isize);
    charge_modulus(charges.collect::<Vec<_>>())
}

/// With `modulus != 1` only `V_ij` with `j − i` divisible by `modulus` are
/// free: `V_ij` multiplies `β̄^i β^j`, so this is the charge restriction of the
/// light case.
fn build(
    s: &DickeState,
    modulus: usize,
    constrain: impl FnOnce(&mut ConicProblem, &Terms) -> CertPlan,
) -> SpinProblem {
    let m = s.m();
    // a real state admits a real optimal V (average V with its conjugate)
    let real = s.is_real(1e-12);
    let mut p = ConicProblem::new();
    let pairs = (0..=m)
        .flat_map(|i| (i..=m).map(move |j| (i, j)))
        .filter(|&(i, j)| crate::certify::charge_class((j - i) as isize, modulus) == 0);
    let units: Vec<(Var, DMatrix<Complex64>)> = hermitian_scalars(&mut p, pairs, real, |i, j, c| {
        let mut v = DMatrix::zeros(m + 1, m + 1);
        v[(i, j)] = c;
        v[(j, i)] = c.conj();
        v
    });
    let terms: Terms = units
        .iter()
        .map(|(var, v)| {
            let obs = SpinObservable::new(v.clone()).expect("unit Hermitian pattern");
            (*var, stereographic_poly(&obs))
        })
        .collect();
    let plan = constrain(&mut p, &terms);
    let mut obj = LinExpr::new();
    let mut tr = LinExpr::new();
    for (var, v) in &units {
        obj.add(*var, s.expectation(v));
        let d = v.trace().re;
        if d != 0.0 {
            tr.add(*var, d);
        }
    }
    p.add_equality(tr, m as f64);
    p.set_objective(obj);
    SpinProblem {
        problem: p,
        terms,
        units,
        plan,
    }
}

fn observable(units: &[(Var, DMatrix<Complex64>)], r: &SolveResult, m: usize) -> SpinObservable {
    let mut v = DMatrix::<Complex64>::zeros(m + 1, m + 1);
    for (var, u) in units {
        v += u * Complex64::new(r.value(&LinExpr::var(*var)), 0.0);
    }
    SpinObservable::new(v).expect("sum of Hermitian patterns")
}

impl Detector<'_> {
    fn run_spin(
        &self,
        s: &DickeState,
        sp: SpinProblem,
        method: &str,
        level: Option<usize>,
        rays: Option<usize>,
    ) -> Result<DetectionResult> {
        let r = self.backend.solve(&sp.problem, &self.opts)?;
        let m = s.m();
        let mut out = finish(
            &r,
            &sp.terms,
            &HermBivarPoly::zero(Support::Box, m),
            &sp.plan,
            method,
            level,
            NORMALIZATION,
            rays,
            &self.tolerance,
        );
        if r.is_optimal() {
            out.observable = Some(observable(&sp.units, &r, m));
        }
        Ok(out)
    }

    /// `l_b`: minimal `Tr(ρV)` with `Tr V = m` and `p̃_V` certified by `method`.
    pub fn detect_spin(&self, s: &DickeState, method: Method) -> Result<DetectionResult> {
        let modulus = state_modulus(s);
        let sp = build(s, modulus, |p, terms| add_hierarchy(p, terms, method, modulus));
        self.run_spin(s, sp, method.tag(), Some(method.level()), None)
    }

    /// Lower bound on every `l_b` from nonnegativity of `p̃_V` along lines.
    pub fn detect_spin_lower(&self, s: &DickeState, angles: &RaySet) -> Result<DetectionResult> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument("no line angles given".into()));
        }
        let sp = build(s, 1, |p, terms| add_lines(p, terms, angles));
        self.run_spin(s, sp, "rays", None, Some(angles.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn ghz_detected_product_not() {
        let ghz = DickeState::ghz(3).unwrap();
        let r = detect_spin(&ghz, Method::Pfr(1)).unwrap();
        assert!(r.value <= -0.5 + 1e-6, "{}", r.value);
        assert!(r.verification.unwrap().ok);
        let v = r.observable.unwrap();
        assert!((v.trace() - 3.0).abs() < 1e-7);

        let prod = DickeState::dicke(3, 0).unwrap();
        let r = detect_spin(&prod, Method::Pfr(0)).unwrap();
        assert!(r.value >= -1e-7, "{}", r.value);
    }
}
