//! Detection and quantification drivers.
//!
//! Every driver minimizes the expectation of a witness over a cone of
//! certified-nonnegative polynomials. The cone is invariant under scaling, so
//! each problem carries one normalization constraint, reported alongside the
//! value:
//!
//! * `gram-trace`: the traces of all certificate blocks sum to 1;
//! * `reference`: `Tr(W ρ0) = 1` for a classical reference state `ρ0`;
//! * spin problems always use `Tr V = m`.
//!
//! Values from different normalizations are not comparable; their signs are.

mod hidden;
mod light;
mod quantify;
mod restricted;
mod spin;
mod witness;

use serde::Serialize;

pub use hidden::{construct_hidden_state, HiddenStateResult};
pub use quantify::{quantify, quantify_moments, QuantifyResult};
pub use restricted::{
    DataNormalization,
    detect_photon_number, detect_photon_probs, detect_quadrature, factorial_moments,
    normal_ordered_moments, photon_number_moments, quadrature_data, raw_quadrature_moments,
    ProbNormalization, QuadratureData,
};

use crate::certify::{Certificate, VerifyReport, VerifyTolerance};
use crate::error::Result;
use crate::polyalg::{HermBivarPoly, PolyJson};
use crate::quantum::{DickeState, MomentTable};
use crate::certify::RaySet;
use crate::sdpcore::{Backend, ClarabelBackend, SolveOptions, Status};
use crate::spinmap::SpinObservable;

/// Default number of line angles for light and spin lower bounds.
pub const DEFAULT_LIGHT_RAYS: usize = 64;
pub const DEFAULT_SPIN_RAYS: usize = 128;

/// Hierarchy used to certify the witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `(1 + |α|²)^b p` is SOS.
    Reznick(usize),
    /// `b` Pascal steps, then Fejér–Riesz on every angular coefficient.
    Pfr(usize),
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Reznick(_) => "reznick",
            Method::Pfr(_) => "pfr",
        }
    }

    pub fn level(&self) -> usize {
        match self {
            Method::Reznick(b) | Method::Pfr(b) => *b,
        }
    }
}

/// Normalization of light-witness problems.
#[derive(Clone, Debug)]
pub enum Normalization {
    GramTrace,
    /// `⟨W⟩ = 1` on these reference moments.
    Reference(MomentTable),
}

impl Normalization {
    pub fn label(&self) -> &'static str {
        match self {
            Normalization::GramTrace => "gram-trace",
            Normalization::Reference(_) => "reference",
        }
    }
}

/// Exponent support of a light witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WitnessSupport {
    /// Every `ᾱ^k α^l` with `k + l ≤ D`.
    #[default]
    Full,
    /// Only `|α|^{2k}`, the witnesses seen by photon-number data.
    Diagonal,
}

/// Outcome of one detection problem.
#[derive(Clone, Debug)]
pub struct DetectionResult {
    /// Optimal witness expectation, `NaN` unless the solve was optimal.
    pub value: f64,
    pub status: Status,
    pub method: String,
    pub level: Option<usize>,
    pub normalization: String,
    /// The witness polynomial `p_W` (for spin problems `p̃_V`).
    pub witness: HermBivarPoly,
    /// Spin problems also return the Dicke-basis observable.
    pub observable: Option<SpinObservable>,
    pub certificate: Option<Certificate>,
    /// Re-check of the certificate against the assembled witness.
    pub verification: Option<VerifyReport>,
    /// Number of line angles for lower bounds.
    pub rays: Option<usize>,
}

impl DetectionResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Nonclassicality shown: optimal and below `-tol`.
    pub fn detected(&self, tol: f64) -> bool {
        self.is_optimal() && self.value < -tol
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            value: Option<f64>,
            level: Option<usize>,
            method: &'a str,
            normalization: &'a str,
            status: Status,
            witness: PolyJson,
            #[serde(skip_serializing_if = "Option::is_none")]
            observable: Option<crate::quantum::StateJson>,
            certificate: Option<crate::certify::CertificateJson>,
            #[serde(skip_serializing_if = "Option::is_none")]
            rays: Option<usize>,
        }
        let out = Out {
            value: self.value.is_finite().then_some(self.value),
            level: self.level,
            method: &self.method,
            normalization: &self.normalization,
            status: self.status,
            witness: PolyJson::from(self.witness.clone()),
            observable: self.observable.as_ref().map(|v| v.to_json()),
            certificate: self.certificate.as_ref().map(|c| c.to_json()),
            rays: self.rays,
        };
        serde_json::to_value(out).expect("plain data")
    }
}

/// Shared settings for the detection drivers.
pub struct Detector<'a> {
    pub backend: &'a dyn Backend,
    pub opts: SolveOptions,
    pub tolerance: VerifyTolerance,
}

impl Default for Detector<'static> {
    fn default() -> Self {
        Self {
            backend: &ClarabelBackend,
            opts: SolveOptions::default(),
            tolerance: VerifyTolerance::default(),
        }
    }
}

/// `min ⟨W⟩` over witnesses of degree `D` certified by `method`.
pub fn detect_light(
    t: &MomentTable,
    degree: usize,
    method: Method,
    norm: &Normalization,
) -> Result<DetectionResult> {
    Detector::default().detect_light(t, degree, method, norm, WitnessSupport::Full)
}

/// Lower bound from nonnegativity along finitely many lines through the origin.
pub fn detect_light_lower(
    t: &MomentTable,
    degree: usize,
    angles: &RaySet,
    norm: &Normalization,
) -> Result<DetectionResult> {
    Detector::default().detect_light_lower(t, degree, angles, norm, WitnessSupport::Full)
}

/// `l_b = min Tr(ρV)` with `Tr V = m` and `p̃_V` certified by `method`.
pub fn detect_spin(s: &DickeState, method: Method) -> Result<DetectionResult> {
    Detector::default().detect_spin(s, method)
}

/// Lower bound on every `l_b` from finitely many lines.
pub fn detect_spin_lower(s: &DickeState, angles: &RaySet) -> Result<DetectionResult> {
    Detector::default().detect_spin_lower(s, angles)
}
