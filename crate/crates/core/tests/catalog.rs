use std::f64::consts::PI;

use nalgebra::DMatrix;
use nonclass_core::catalog::{
    self, choi_lam, ghz_witness, motzkin, robinson, standard_state, tura_sequence, tura_state,
    EntryKind, StandardState,
};
use nonclass_core::certify::certify_sos;
use nonclass_core::polyalg::binomial;
use nonclass_core::quantum::{moments_from_fock, quadrature_moment, DickeState};
use num_complex::Complex64;

#[test]
fn catalog_polynomials_are_nonnegative_on_a_grid() {
    for (name, f) in [("motzkin", motzkin()), ("robinson", robinson()), ("choi-lam", choi_lam())] {
        let mut lo = f64::INFINITY;
        for i in 0..400 {
            for j in 0..400 {
                let x = -3.0 + 6.0 * i as f64 / 399.0;
                let y = -3.0 + 6.0 * j as f64 / 399.0;
                lo = lo.min(f.eval(x, y));
            }
        }
        assert!(lo >= -1e-12, "{name}: {lo}");
        assert!(!certify_sos(&f).unwrap().is_certified(), "{name} is not SOS");
    }
    assert_eq!(motzkin().eval(1.0, 1.0), 0.0);
    assert_eq!(motzkin().eval(-1.0, 1.0), 0.0);
    assert_eq!(choi_lam().eval(0.0, 0.0), 0.0);
    assert_eq!(robinson().eval(1.0, 1.0), 0.0);
    assert_eq!(robinson().eval(1.0, 0.0), 0.0);
}

/// `|GHZ⟩⟨GHZ|` built from the two product states instead of Dicke indices.
fn ghz_projector(m: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::zeros(m + 1, m + 1);
    for (i, j) in [(0, 0), (0, m), (m, 0), (m, m)] {
        g[(i, j)] = Complex64::new(0.5, 0.0);
    }
    g
}

#[test]
fn ghz_witness_properties() {
    assert!(ghz_witness(1).is_err());
    for m in 2..=6 {
        let v = ghz_witness(m).unwrap();
        let direct = DMatrix::<Complex64>::identity(m + 1, m + 1) * Complex64::new(0.5, 0.0) - ghz_projector(m);
        assert_eq!(v.matrix(), &direct);
        assert_eq!(v.trace(), (m as f64 - 1.0) / 2.0);
        let ghz = DickeState::ghz(m).unwrap();
        assert!((ghz.expectation(v.matrix()) + 0.5).abs() < 1e-12);

        // product states: θ over the sphere, φ over one period of the m-fold symmetry
        let mut lo = f64::INFINITY;
        for a in 0..=200 {
            for b in 0..50 {
                let theta = PI * a as f64 / 200.0;
                let phi = 2.0 * PI * b as f64 / (50.0 * m as f64);
                let beta = Complex64::from_polar((theta / 2.0).tan(), phi);
                let val = if a == 200 { v.pole_value() } else { v.product_expectation(beta) };
                lo = lo.min(val);
            }
        }
        assert!(lo >= -1e-9, "m {m}: {lo}");
    }
    let v3 = ghz_witness(3).unwrap();
    let want = [[0.0, 0.0, 0.0, -0.5], [0.0, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.0], [-0.5, 0.0, 0.0, 0.0]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(v3.matrix()[(i, j)].re, want[i][j]);
        }
    }
}

#[test]
fn tura_family() {
    assert_eq!(tura_sequence(1.0, 0, 3), vec![1.0, 2.0, 5.0, 13.0]);
    let s = tura_state(1.0, 1, 8).unwrap();
    assert_eq!(s.m(), 17);
    assert_eq!(s.rho().nrows(), 18);
    assert!((s.rho().trace().re - 1.0).abs() < 1e-10);
    let corner = 1.0 / (2.0 * 5f64.powi(8));
    assert!((s.rho()[(0, 17)].re - corner).abs() < 1e-18);
    assert!((s.rho()[(17, 0)].re - corner).abs() < 1e-18);
    for i in 0..18 {
        for j in 0..18 {
            if i != j && (i, j) != (0, 17) && (i, j) != (17, 0) {
                assert_eq!(s.rho()[(i, j)].norm(), 0.0);
            }
        }
    }
    let neg = tura_state(2.5, -1, 3).unwrap();
    assert!(neg.rho()[(0, 7)].re < 0.0);
    assert!((neg.rho().trace().re - 1.0).abs() < 1e-10);
    assert!(tura_state(0.0, 1, 8).is_err());
    assert!(tura_state(1.0, 2, 8).is_err());
    assert!(tura_state(1.0, 1, 1).is_err());
}

#[test]
fn standard_states_match_analytic_moments() {
    let one = standard_state(StandardState::Fock { n: 1 }, 4, false).unwrap();
    assert_eq!(one.state.rho()[(1, 1)].re, 1.0);
    assert_eq!(one.tail, 0.0);

    let coh = standard_state(StandardState::Coherent { alpha: Complex64::new(1.0, 0.0) }, 20, false).unwrap();
    let t = moments_from_fock(&coh.state, 2);
    assert!((t.get(0, 1).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-8);
    assert!((t.get(1, 1).unwrap().re - 1.0).abs() < 1e-8);

    let r = 0.3;
    let sq = standard_state(StandardState::SqueezedVacuum { r }, 20, false).unwrap();
    let t = moments_from_fock(&sq.state, 2);
    // ⟨X²⟩ = ⟨:X²:⟩ + ¼
    let x2 = quadrature_moment(&t, 2, 0).unwrap() + 0.25;
    assert!((x2 - (-2.0 * r).exp() / 4.0).abs() < 1e-6, "{x2}");
    let p2 = quadrature_moment(&t, 0, 2).unwrap() + 0.25;
    assert!((p2 - (2.0 * r).exp() / 4.0).abs() < 1e-6, "{p2}");

    let th = standard_state(StandardState::Thermal { nbar: 0.5 }, 40, false).unwrap();
    let t = moments_from_fock(&th.state, 4);
    assert!((t.get(1, 1).unwrap().re - 0.5).abs() < 1e-6);
    assert!((t.get(2, 2).unwrap().re - 2.0 * 0.25).abs() < 1e-6);

    // a large tail is refused unless asked for
    let big = StandardState::Coherent { alpha: Complex64::new(3.0, 0.0) };
    assert!(standard_state(big, 5, false).is_err());
    let kept = standard_state(big, 5, true).unwrap();
    assert!(kept.tail > 1e-6);
    assert!(standard_state(StandardState::Fock { n: 5 }, 4, false).is_err());
}

#[test]
fn named_entries() {
    for (name, _) in catalog::list() {
        let e = catalog::get(name).unwrap();
        let j = e.to_json();
        match e.kind() {
            EntryKind::Polynomial => assert!(j.get("terms").is_some(), "{name}"),
            _ => assert!(j.get("kind").is_some(), "{name}"),
        }
    }
    assert!(catalog::get("nope").is_err());
    let binom_sum: f64 = (0..=17).map(|l| binomial(17, l)).sum();
    assert_eq!(binom_sum, 2f64.powi(17));
}
