//! Nonclassicality quantifiers relative to a classical reference `ρ0`.
//!
//! * `s`: the largest `t` for which `ρ_t = t ρ + (1 − t) ρ0` is not detected,
//!   found by bisection. Detection is tested at the caller's hierarchy level,
//!   so `s` is level-relative.
//! * `v`: the witness optimum under `Tr(W ρ0) = 1`.
//!
//! At the same level the two satisfy `v = 1 − 1/s`.

use super::{Detector, Method, Normalization, WitnessSupport};
use crate::error::{Error, Result};
use crate::polyalg::HermBivarPoly;
use crate::quantum::{
    classical_reference_moments, classical_reference_with_cutoff, moments_from_fock, FockState,
    MomentTable,
};

/// Bisection tolerance on the mixing parameter.
pub const BISECTION_TOL: f64 = 1e-5;
/// A gram-trace value below `-DETECT_TOL` counts as detected.
const DETECT_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 30;

#[derive(Clone, Debug)]
pub struct QuantifyResult {
    /// Largest undetected mixing parameter (`∞` if every mixture is undetected).
    pub s: f64,
    /// Optimal witness value under `Tr(W ρ0) = 1`.
    pub v: f64,
    pub witness: HermBivarPoly,
    /// The reference state, when it was built from a density matrix.
    pub reference: Option<FockState>,
    /// Number of detection solves spent on `s`.
    pub solves: usize,
}

impl Detector<'_> {
    fn detected_at(
        &self,
        t: &MomentTable,
        t0: &MomentTable,
        x: f64,
        degree: usize,
        method: Method,
    ) -> Result<bool> {
        let mixed = t.mix(t0, x)?;
        let r = self.detect_light(&mixed, degree, method, &Normalization::GramTrace, WitnessSupport::Full)?;
        if !r.is_optimal() {
            return Err(Error::Backend(format!(
                "classicality test at t = {x} ended with status {:?}",
                r.status
            )));
        }
        Ok(r.value < -DETECT_TOL)
    }

    /// `s` and `v` from moment data of the state and of the reference.
    pub fn quantify_moments(
        &self,
        t: &MomentTable,
        t0: &MomentTable,
        degree: usize,
        method: Method,
    ) -> Result<QuantifyResult> {
        let vr = self.detect_light(t, degree, method, &Normalization::Reference(t0.clone()), WitnessSupport::Full)?;
        if !vr.is_optimal() {
            return Err(Error::Backend(format!(
                "reference-normalized witness problem ended with status {:?}",
                vr.status
            )));
        }
        let mut solves = 0;
        if self.detected_at(t, t0, 0.0, degree, method)? {
            return Err(Error::InvalidArgument(
                "the reference state is itself detected".into(),
            ));
        }
        solves += 1;
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut doublings = 0;
        loop {
            solves += 1;
            if self.detected_at(t, t0, hi, degree, method)? {
                break;
            }
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Ok(QuantifyResult {
                    s: f64::INFINITY,
                    v: vr.value,
                    witness: vr.witness,
                    reference: None,
                    solves,
                });
            }
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            solves += 1;
            if self.detected_at(t, t0, mid, degree, method)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(QuantifyResult {
            s: 0.5 * (lo + hi),
            v: vr.value,
            witness: vr.witness,
            reference: None,
            solves,
        })
    }

    /// Quantifies a state against `ρ0`, by default its Husimi-smoothed reference.
    /// The default reference enters through its exact moments; the returned
    /// state is a truncation for inspection.
    pub fn quantify(
        &self,
        s: &FockState,
        rho0: Option<&FockState>,
        degree: usize,
        method: Method,
    ) -> Result<QuantifyResult> {
        let t = moments_from_fock(s, degree);
        let (t0, reference) = match rho0 {
            Some(r) => (moments_from_fock(r, degree), r.clone()),
            None => (
                classical_reference_moments(s, degree),
                classical_reference_with_cutoff(s, s.n_max() + 40)?.0,
            ),
        };
        let mut out = self.quantify_moments(&t, &t0, degree, method)?;
        out.reference = Some(reference);
        Ok(out)
    }
}

pub fn quantify(
    s: &FockState,
    rho0: Option<&FockState>,
    degree: usize,
    method: Method,
) -> Result<QuantifyResult> {
    Detector::default().quantify(s, rho0, degree, method)
}

pub fn quantify_moments(
    t: &MomentTable,
    t0: &MomentTable,
    degree: usize,
    method: Method,
) -> Result<QuantifyResult> {
    Detector::default().quantify_moments(t, t0, degree, method)
}
