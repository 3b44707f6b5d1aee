use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DMatrix;
use nonclass_core::catalog;
use nonclass_core::certify::{Certificate, CertificateKind, Certifier, CertifyOutcome, RaySet, VerifyTolerance};
use nonclass_core::detect::{
    Detector, Method, Normalization, WitnessSupport, DEFAULT_LIGHT_RAYS, DEFAULT_SPIN_RAYS,
};
use nonclass_core::polyalg::{ladder_to_real, HermBivarPoly, PolyJson, RealBivarPoly};
use nonclass_core::quantum::{
    classical_reference_moments, moments_from_fock, DickeState, FockState, MomentJson, MomentTable,
    StateJson,
};
use nonclass_core::sdpcore::{backend_from_env, SolveOptions};
use nonclass_core::spinmap::{spin_to_light_witness, stereographic_poly, support_inclusion_check, SpinObservable};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Flags, MethodArg, NormArg, SystemArg};
use crate::io::{emit, emit_json, kind_of, poly_from_value, read_json, read_poly, require_finite};
use crate::Verdict;

const DEFAULT_B_MAX: usize = 10;
const DEFAULT_DEGREE: usize = 4;
const DEFAULT_THRESHOLD: f64 = 1e-6;
/// Residual tolerance of `verify`, relative to the largest target coefficient.
const VERIFY_RESIDUAL: f64 = 1e-6;
const VERIFY_PSD: f64 = 1e-8;

pub fn solve_opts(flags: &Flags) -> Result<SolveOptions> {
    let mut opts = SolveOptions::default();
    if let Some(t) = flags.tol {
        let t = require_finite("--tol", t)?;
        opts.tol_feas = t;
        opts.tol_gap = t;
    }
    Ok(opts)
}

fn verdict(yes: bool) -> Verdict {
    if yes {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn threshold(flags: &Flags) -> Result<f64> {
    require_finite("--threshold", flags.threshold.unwrap_or(DEFAULT_THRESHOLD))
}

fn rays(flags: &Flags, default: usize) -> Result<RaySet> {
    Ok(RaySet::uniform(flags.rays.unwrap_or(default))?)
}

fn hierarchy(method: MethodArg, level: usize) -> Method {
    match method {
        MethodArg::Sos => Method::Reznick(0),
        MethodArg::Pfr => Method::Pfr(level),
        MethodArg::Reznick | MethodArg::Rays => Method::Reznick(level),
    }
}

fn real_poly(p: &HermBivarPoly) -> RealBivarPoly {
    ladder_to_real(p)
}

pub fn certify(path: &Path, flags: &Flags) -> Result<Verdict> {
    let p = read_poly(path)?;
    let method = flags.method.unwrap_or(MethodArg::Reznick);
    let b_max = flags.b_max.unwrap_or(DEFAULT_B_MAX);
    let backend = backend_from_env()?;
    let c = Certifier {
        backend: &*backend,
        opts: solve_opts(flags)?,
        tolerance: VerifyTolerance::default(),
    };
    let mut report = json!({
        "method": format!("{method:?}").to_lowercase(),
        "witness": PolyJson::from(p.clone()),
    });
    let certified = if method == MethodArg::Rays {
        let angles = rays(flags, DEFAULT_LIGHT_RAYS)?;
        let lines = c.check_lines(&p, &angles)?;
        let failed: Vec<f64> = lines.verdicts.iter().filter(|v| !v.certified).map(|v| v.theta).collect();
        report["rays"] = json!(angles.len());
        report["failed_angles"] = json!(failed);
        report["certificate"] = json!(lines.certificate.as_ref().map(Certificate::to_json));
        eprintln!("rays: {} of {} lines certified", angles.len() - failed.len(), angles.len());
        lines.certificate.is_some()
    } else {
        let outcome = match method {
            MethodArg::Sos => c.certify_sos(&real_poly(&p))?,
            MethodArg::Reznick => c.certify_reznick(&real_poly(&p), b_max)?,
            MethodArg::Pfr => c.certify_pfr(&p, b_max)?,
            MethodArg::Rays => unreachable!("handled above"),
        };
        report["b_max"] = json!(b_max);
        match &outcome {
            CertifyOutcome::Certified { level, certificate } => {
                eprintln!("certified: {} level {level}", report["method"].as_str().unwrap_or(""));
                report["level"] = json!(level);
                report["certificate"] = json!(certificate.to_json());
            }
            CertifyOutcome::NotCertified { attempts } => {
                eprintln!("not certified up to level {}", attempts.last().map_or(0, |a| a.0));
                report["certificate"] = Value::Null;
                report["attempts"] = json!(attempts
                    .iter()
                    .map(|(b, s)| json!({ "level": b, "status": s }))
                    .collect::<Vec<_>>());
            }
        }
        outcome.is_certified()
    };
    report["certified"] = json!(certified);
    emit_json(flags.out.as_deref(), &report)?;
    Ok(verdict(certified))
}

enum LightInput {
    State(FockState),
    Moments(MomentTable),
}

pub fn detect(path: &Path, flags: &Flags) -> Result<Verdict> {
    let v = read_json(path)?;
    let kind = kind_of(&v).map(str::to_string);
    let system = flags.system.unwrap_or(if kind.as_deref() == Some("dicke") {
        SystemArg::Spin
    } else {
        SystemArg::Light
    });
    let method = flags.method.unwrap_or(MethodArg::Reznick);
    let level = flags.level.unwrap_or(0);
    let backend = backend_from_env()?;
    let det = Detector {
        backend: &*backend,
        opts: solve_opts(flags)?,
        tolerance: VerifyTolerance::default(),
    };
    let r = match system {
        SystemArg::Spin => {
            if kind.as_deref() != Some("dicke") {
                bail!("spin detection needs a state of kind \"dicke\"");
            }
            if flags.norm == Some(NormArg::Reference) {
                bail!("spin problems are always normalized by Tr V = m");
            }
            let s = DickeState::from_json(&serde_json::from_value::<StateJson>(v)?)?;
            match method {
                MethodArg::Rays => det.detect_spin_lower(&s, &rays(flags, DEFAULT_SPIN_RAYS)?)?,
                m => det.detect_spin(&s, hierarchy(m, level))?,
            }
        }
        SystemArg::Light => {
            let input = match kind.as_deref() {
                Some("fock") => LightInput::State(FockState::from_json(&serde_json::from_value::<StateJson>(v)?)?),
                Some(other) => bail!("light detection needs a fock state or a moment table, got kind {other:?}"),
                None if v.get("D").is_some() => {
                    LightInput::Moments(MomentTable::try_from(serde_json::from_value::<MomentJson>(v)?)?)
                }
                None => bail!("{}: neither a state nor a moment table", path.display()),
            };
            let (t, degree, norm) = match input {
                LightInput::State(s) => {
                    let d = flags.degree.unwrap_or(DEFAULT_DEGREE);
                    let norm = match flags.norm.unwrap_or(NormArg::Gram) {
                        NormArg::Gram => Normalization::GramTrace,
                        NormArg::Reference => Normalization::Reference(classical_reference_moments(&s, d)),
                    };
                    (moments_from_fock(&s, d), d, norm)
                }
                LightInput::Moments(t) => {
                    if flags.norm == Some(NormArg::Reference) {
                        bail!("reference normalization needs a full state, not moments");
                    }
                    let d = flags.degree.unwrap_or(t.degree());
                    (t, d, Normalization::GramTrace)
                }
            };
            match method {
                MethodArg::Rays => det.detect_light_lower(
                    &t,
                    degree,
                    &rays(flags, DEFAULT_LIGHT_RAYS)?,
                    &norm,
                    WitnessSupport::Full,
                )?,
                m => det.detect_light(&t, degree, hierarchy(m, level), &norm, WitnessSupport::Full)?,
            }
        }
    };
    let tol = threshold(flags)?;
    let detected = r.detected(tol);
    eprintln!(
        "{}{} ({}): value {:.6e}, {:?}{}",
        r.method,
        r.level.map(|l| format!("({l})")).unwrap_or_default(),
        r.normalization,
        r.value,
        r.status,
        if detected { ", nonclassical" } else { "" }
    );
    emit_json(flags.out.as_deref(), &r.to_json())?;
    Ok(verdict(detected))
}

/// Rejects certificates whose block shapes cannot belong to `p` at all.
fn check_shape(cert: &Certificate, p: &HermBivarPoly) -> Result<()> {
    match &cert.kind {
        CertificateKind::SosGram | CertificateKind::Reznick { .. } => {
            let b = cert.level().unwrap_or(0);
            let d = ladder_to_real(p).degree() + 2 * b;
            if d % 2 == 1 {
                bail!("polynomial of odd degree {} has no Gram certificate", d - 2 * b);
            }
            let h = d / 2;
            let side = (h + 1) * (h + 2) / 2;
            let got = cert.blocks.first().map_or(0, |m| m.nrows());
            if got != side {
                bail!("Gram block of side {got} does not fit degree {d} (expected side {side})");
            }
        }
        CertificateKind::Pfr { b } => {
            let top = p.total_degree() + b;
            let extra = cert.blocks.iter().skip(top + 1).any(|m| m.nrows() > 0);
            if extra {
                bail!("certificate has blocks beyond radial degree {top}");
            }
        }
        CertificateKind::UnivariateSos => bail!("univariate certificates cannot be checked against a bivariate polynomial"),
        CertificateKind::Rays { .. } => {}
    }
    Ok(())
}

pub fn verify(cert_path: &Path, poly: Option<&Path>, flags: &Flags) -> Result<Verdict> {
    let v = read_json(cert_path)?;
    let (cert_v, witness) = if v.get("blocks").is_some() {
        (v, None)
    } else {
        let cert = v.get("certificate").cloned().unwrap_or(Value::Null);
        if cert.is_null() {
            bail!("{} holds no certificate", cert_path.display());
        }
        (cert, v.get("witness").cloned())
    };
    let cert = Certificate::from_json(&serde_json::from_value(cert_v).context("malformed certificate")?)?;
    let p = match poly {
        Some(path) => read_poly(path)?,
        None => poly_from_value(witness.ok_or_else(|| anyhow!("no polynomial given and none stored with the certificate"))?)?,
    };
    check_shape(&cert, &p)?;
    let tol = VerifyTolerance {
        residual: require_finite("--tol", flags.tol.unwrap_or(VERIFY_RESIDUAL))?,
        psd: VERIFY_PSD,
    };
    let rep = cert.verify(&p, &tol)?;
    eprintln!(
        "{}: residual {:.3e} (scale {:.3e}), min eigenvalue {:.3e}: {}",
        cert.kind.tag(),
        rep.residual,
        rep.scale,
        rep.min_eigenvalue,
        if rep.ok { "valid" } else { "invalid" }
    );
    emit_json(flags.out.as_deref(), &serde_json::to_value(rep)?)?;
    Ok(verdict(rep.ok))
}

pub fn hidden(path: &Path, n_max: usize, d_tilde: usize, flags: &Flags) -> Result<Verdict> {
    let f = real_poly(&read_poly(path)?);
    let backend = backend_from_env()?;
    let det = Detector {
        backend: &*backend,
        opts: solve_opts(flags)?,
        tolerance: VerifyTolerance::default(),
    };
    let h = det.construct_hidden_state(&f, n_max, d_tilde)?;
    let found = h.status == nonclass_core::sdpcore::Status::Optimal && h.value < -threshold(flags)?;
    eprintln!(
        "n_max {n_max}, D̃ {d_tilde}: value {:.6e}, moment matrix min eigenvalue {:.3e}",
        h.value, h.moment_min_eigenvalue
    );
    let out = json!({
        "status": h.status,
        "n_max": n_max,
        "d_tilde": d_tilde,
        "value": finite(h.value),
        "solver_value": finite(h.solver_value),
        "moment_min_eigenvalue": finite(h.moment_min_eigenvalue),
        "state": h.state.as_ref().map(FockState::to_json),
    });
    emit_json(flags.out.as_deref(), &out)?;
    Ok(verdict(found))
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn map(path: &Path, flags: &Flags) -> Result<Verdict> {
    let j: StateJson = serde_json::from_value(read_json(path)?).context("not a dicke-observable")?;
    let v = SpinObservable::from_json(&j)?;
    let light = spin_to_light_witness(&v);
    let out = json!({
        "m": v.m(),
        "stereographic": PolyJson::from(stereographic_poly(&v)),
        "light_witness": PolyJson::from(light.clone()),
        "inclusion": support_inclusion_check(&light, v.m()),
    });
    emit_json(flags.out.as_deref(), &out)?;
    Ok(Verdict::Yes)
}

pub fn catalog_list(flags: &Flags) -> Result<Verdict> {
    let mut text = String::new();
    for (name, description) in catalog::list() {
        let kind = serde_json::to_value(catalog::get(name)?.kind())?;
        text.push_str(&format!("{name}\t{}\t{description}\n", kind.as_str().unwrap_or("")));
    }
    emit(flags.out.as_deref(), &text)?;
    Ok(Verdict::Yes)
}

pub fn catalog_dump(name: &str, flags: &Flags) -> Result<Verdict> {
    emit_json(flags.out.as_deref(), &catalog::get(name)?.to_json())?;
    Ok(Verdict::Yes)
}

/// `A A† / Tr A A†` for a random `dim × rank` complex matrix `A`.
fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    let rank = rng.gen_range(1..=dim);
    let a = DMatrix::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

pub fn sample(n_max: usize, spin: Option<usize>, flags: &Flags) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(flags.seed.unwrap_or(0));
    let j = match spin {
        Some(m) => DickeState::new(random_density(&mut rng, m + 1))?.to_json(),
        None => FockState::new(random_density(&mut rng, n_max + 1))?.to_json(),
    };
    emit_json(flags.out.as_deref(), &serde_json::to_value(j)?)?;
    Ok(Verdict::Yes)
}
