use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use nonclass_core::catalog::{choi_lam, motzkin, motzkin_witness};
use nonclass_core::certify::{
    certify_pfr, certify_reznick, certify_sos, certify_univariate, check_lines, fejer_riesz_check,
    Certificate, CertificateKind, RaySet, VerifyTolerance,
};
use nonclass_core::polyalg::{
    binomial, quadrature_to_ladder, HermBivarPoly, RealBivarPoly, Support, TrigPoly,
    UnivariatePoly,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Sum of squares of random quadratics in x, y, plus a small positive part.
fn random_sos(rng: &mut ChaCha8Rng) -> RealBivarPoly {
    let mut f = RealBivarPoly::constant(0.1);
    for _ in 0..3 {
        let mut g = RealBivarPoly::zero();
        for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            g.add_term(i, j, rng.gen_range(-1.0..1.0));
        }
        f = f.add(&g.mul(&g));
    }
    f
}

fn min_psd(cert: &Certificate) -> f64 {
    cert.blocks
        .iter()
        .filter(|b| b.nrows() > 0)
        .map(|b| {
            let h = DMatrix::from_fn(b.nrows() * 2, b.ncols() * 2, |r, col| {
                let (i, j) = (r % b.nrows(), col % b.ncols());
                let v = b[(i, j)];
                match (r < b.nrows(), col < b.ncols()) {
                    (true, true) | (false, false) => v.re,
                    (true, false) => -v.im,
                    (false, true) => v.im,
                }
            });
            h.symmetric_eigen().eigenvalues.min()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn sos_examples() {
    let f = RealBivarPoly::from_terms([(6, 0, 1.0), (4, 0, 2.0), (2, 0, 1.0)]);
    let g = RealBivarPoly::from_terms([(4, 0, 1.0), (2, 1, 6.0), (0, 2, 9.0)]);
    for p in [f, g] {
        let out = certify_sos(&p).unwrap();
        let cert = out.certificate().expect("certified");
        assert_eq!(cert.kind, CertificateKind::SosGram);
        let rep = cert.verify(&quadrature_to_ladder(&p), &VerifyTolerance::default()).unwrap();
        assert!(rep.ok && rep.residual <= 1e-8 * rep.scale.max(1.0), "{rep:?}");
    }
    assert!(!certify_sos(&motzkin()).unwrap().is_certified());
}

#[test]
fn reznick_levels() {
    assert_eq!(certify_reznick(&RealBivarPoly::constant(1.0), 3).unwrap().level(), Some(0));
    assert_eq!(certify_reznick(&motzkin(), 3).unwrap().level(), Some(1));
    let cl = certify_reznick(&choi_lam(), 3).unwrap();
    assert_eq!(cl.level(), Some(1));
    let rep = cl
        .certificate()
        .unwrap()
        .verify(&quadrature_to_ladder(&choi_lam()), &VerifyTolerance::default())
        .unwrap();
    assert!(rep.ok);
}

#[test]
fn reznick_monotone_on_sos_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let f = random_sos(&mut rng);
        for b in 0..=3 {
            let g = RealBivarPoly::reznick_multiplier(b).mul(&f);
            let out = certify_sos(&g).unwrap();
            let cert = out.certificate().unwrap_or_else(|| panic!("level {b} lost"));
            let rep = cert.verify(&quadrature_to_ladder(&g), &VerifyTolerance::default()).unwrap();
            assert!(rep.residual <= 1e-7 * rep.scale.max(1.0));
            assert!(min_psd(cert) >= -1e-8 * rep.scale.max(1.0));
        }
    }
}

#[test]
fn fejer_riesz_examples() {
    let one = fejer_riesz_check(&TrigPoly::constant(1.0)).unwrap();
    let q = &one.certificate().unwrap().blocks[0];
    assert_eq!((q.nrows(), q.ncols()), (1, 1));
    assert!((q[(0, 0)].re - 1.0).abs() < 1e-7);

    // 2 + 2cos θ = |1 + e^{iθ}|²
    let mut t = TrigPoly::constant(2.0);
    t.set(1, c(1.0));
    let out = fejer_riesz_check(&t).unwrap();
    let q = &out.certificate().unwrap().blocks[0];
    assert!(q.iter().all(|v| v.im.abs() < 1e-9), "real q gets a real Q");
    // c_l = Σ_{j−i=l} Q_ij
    assert!((q[(0, 0)] + q[(1, 1)] - c(2.0)).norm() < 1e-6);
    assert!((q[(0, 1)] - c(1.0)).norm() < 1e-6);

    let mut cos = TrigPoly::zero(1);
    cos.set(1, c(0.5));
    assert!(!fejer_riesz_check(&cos).unwrap().is_certified());

    // complex coefficients: |1 + i e^{iθ}|² = 2 − 2 sin θ
    let mut s = TrigPoly::constant(2.0);
    s.set(1, Complex64::new(0.0, 1.0));
    assert!(fejer_riesz_check(&s).unwrap().is_certified());
}

#[test]
fn pfr_levels_match_polya_expansion() {
    let mut sq = HermBivarPoly::zero(Support::Total, 4);
    sq.set(2, 2, c(1.0)).unwrap();
    assert_eq!(certify_pfr(&sq, 2).unwrap().level(), Some(0));

    // 1 − r² + r⁴ has constant angular parts; Pólya smoothing works coefficient-wise
    let mut p = HermBivarPoly::zero(Support::Total, 4);
    p.set(0, 0, c(1.0)).unwrap();
    p.set(1, 1, c(-1.0)).unwrap();
    p.set(2, 2, c(1.0)).unwrap();
    let expected = (0..20)
        .find(|&b| {
            (0..=(4 + b)).all(|s| {
                let coeff: f64 = [(0, 1.0), (2, -1.0), (4, 1.0)]
                    .iter()
                    .filter(|(k, _)| *k <= s && s - k <= b)
                    .map(|(k, w)| w * binomial(b, s - k))
                    .sum();
                coeff >= 0.0
            })
        })
        .unwrap();
    let out = certify_pfr(&p, 20).unwrap();
    assert_eq!(out.level(), Some(expected));
    assert!(out.certificate().unwrap().verify(&p, &VerifyTolerance::default()).unwrap().ok);
}

#[test]
fn univariate_examples() {
    assert!(certify_univariate(&UnivariatePoly::new(vec![0.0, 0.0, 1.0])).unwrap().is_certified());
    assert!(!certify_univariate(&UnivariatePoly::new(vec![-1.0, 0.0, 1.0])).unwrap().is_certified());
    let f = UnivariatePoly::new(vec![1.0, 0.0, -(2f64.sqrt()), 0.0, 0.5]);
    let out = certify_univariate(&f).unwrap();
    assert!(out.certificate().unwrap().verify_univariate(&f, &VerifyTolerance::default()).unwrap().ok);
    assert!(!certify_univariate(&UnivariatePoly::new(vec![0.0, 1.0])).unwrap().is_certified());
}

#[test]
fn line_examples() {
    let mut abs2 = HermBivarPoly::zero(Support::Total, 2);
    abs2.set(1, 1, c(1.0)).unwrap();
    assert!(check_lines(&abs2, &RaySet::uniform(7).unwrap()).unwrap().all_pass());

    let diff = quadrature_to_ladder(&RealBivarPoly::from_terms([(2, 0, 1.0), (0, 2, -1.0)]));
    let rep = check_lines(&diff, &RaySet::new(vec![0.0, FRAC_PI_2]).unwrap()).unwrap();
    assert!(rep.verdicts[0].certified);
    assert!(!rep.verdicts[1].certified);
    assert!(rep.certificate.is_none());

    let rep = check_lines(&motzkin_witness(), &RaySet::uniform(64).unwrap()).unwrap();
    let failed: Vec<f64> = rep.verdicts.iter().filter(|v| !v.certified).map(|v| v.theta).collect();
    assert!(failed.is_empty(), "{failed:?}");
    let cert = rep.certificate.unwrap();
    assert!(cert.verify(&motzkin_witness(), &VerifyTolerance::default()).unwrap().ok);
}

#[test]
fn passed_lines_are_nonnegative_on_a_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let angles = RaySet::uniform(8).unwrap();
    let mut passed = 0;
    for _ in 0..10 {
        // a nonnegative part plus a random perturbation, so some lines fail
        let mut f = random_sos(&mut rng);
        f.add_term(1, 1, rng.gen_range(-1.0..1.0));
        f.add_term(0, 0, rng.gen_range(-0.2..0.0));
        let p = quadrature_to_ladder(&f);
        let rep = check_lines(&p, &angles).unwrap();
        for v in rep.verdicts.iter().filter(|v| v.certified) {
            passed += 1;
            for i in 0..12_500 {
                let r = -5.0 + 10.0 * i as f64 / 12_499.0;
                let val = p.eval(Complex64::from_polar(r, v.theta));
                assert!(val >= -1e-6, "θ {}: p({r}) = {val}", v.theta);
            }
        }
    }
    assert!(passed > 0);
    assert!(RaySet::new(vec![PI]).is_err());
}

#[test]
fn certificate_json_round_trip() {
    let out = certify_reznick(&motzkin(), 2).unwrap();
    let cert = out.certificate().unwrap();
    let s = serde_json::to_string(&cert.to_json()).unwrap();
    let back = Certificate::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
    assert_eq!(back.kind, cert.kind);
    assert!(back.verify(&motzkin_witness(), &VerifyTolerance::default()).unwrap().ok);

    // a perturbed certificate no longer reassembles the polynomial
    let mut bad = back.clone();
    bad.blocks[0][(0, 0)] += c(0.1);
    assert!(!bad.verify(&motzkin_witness(), &VerifyTolerance::default()).unwrap().ok);
}
