use std::f64::consts::PI;

use nalgebra::DMatrix;
use nonclass_core::catalog::ghz_witness;
use nonclass_core::polyalg::{binomial, HermBivarPoly, Support};
use nonclass_core::spinmap::{
    spin_to_light_witness, stereographic_poly, support_inclusion_check, SpinObservable,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_observable(rng: &mut ChaCha8Rng, m: usize) -> SpinObservable {
    let a = DMatrix::from_fn(m + 1, m + 1, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut v = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    // a random identity shift makes roughly half of the observables positive
    let shift = rng.gen_range(0.0..2.0) * m as f64;
    for i in 0..=m {
        v[(i, i)] += Complex64::new(shift, 0.0);
    }
    SpinObservable::new(v).unwrap()
}

/// `⟨ψ^{⊗m}|V|ψ^{⊗m}⟩` with `ψ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
fn sphere_value(v: &SpinObservable, theta: f64, phi: f64) -> f64 {
    let m = v.m();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let amp: Vec<Complex64> = (0..=m)
        .map(|l| {
            Complex64::from_polar(
                binomial(m, l).sqrt() * c.powi((m - l) as i32) * s.powi(l as i32),
                l as f64 * phi,
            )
        })
        .collect();
    let mut acc = Complex64::default();
    for i in 0..=m {
        for j in 0..=m {
            acc += amp[i].conj() * v.matrix()[(i, j)] * amp[j];
        }
    }
    acc.re
}

#[test]
fn sign_equivalence_on_sphere_and_plane_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut compared = [0usize; 2];
    for i in 0..20 {
        let v = random_observable(&mut rng, 1 + i % 5);
        let p = stereographic_poly(&v);
        let mut sphere_min = sphere_value(&v, PI, 0.0);
        // the chart misses the pole; its value is the top coefficient
        let mut plane_min = v.pole_value();
        for a in 0..100 {
            let theta = PI * a as f64 / 100.0;
            for b in 0..100 {
                let phi = 2.0 * PI * b as f64 / 100.0;
                sphere_min = sphere_min.min(sphere_value(&v, theta, phi));
                let beta = Complex64::from_polar((theta / 2.0).tan(), phi);
                plane_min = plane_min.min(p.eval(beta));
            }
        }
        if sphere_min.abs() > 1e-6 {
            assert_eq!(sphere_min > 0.0, plane_min > 0.0, "observable {i}: {sphere_min} vs {plane_min}");
            compared[usize::from(sphere_min > 0.0)] += 1;
        }
    }
    assert!(compared[0] > 0 && compared[1] > 0, "{compared:?}");
}

#[test]
fn projection_identity_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for m in 1..=6 {
        let v = random_observable(&mut rng, m);
        let p = stereographic_poly(&v);
        for _ in 0..100 {
            let beta = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let theta = 2.0 * beta.norm().atan();
            let want = (1.0 + beta.norm_sqr()).powi(m as i32) * sphere_value(&v, theta, beta.arg());
            let scale = (1.0 + beta.norm_sqr()).powi(m as i32) * v.matrix().norm();
            assert!((p.eval(beta) - want).abs() <= 1e-9 * scale, "m {m}, β {beta}");
        }
    }
}

#[test]
fn stereographic_examples() {
    for m in 1..=5 {
        let mut e0 = DMatrix::<f64>::zeros(m + 1, m + 1);
        e0[(0, 0)] = 1.0;
        let p = stereographic_poly(&SpinObservable::from_real(e0).unwrap());
        assert!(p.max_coeff_diff(&HermBivarPoly::constant(1.0)) == 0.0);

        let id = stereographic_poly(&SpinObservable::identity(m));
        let beta = Complex64::new(0.7, -0.4);
        let want = (1.0 + beta.norm_sqr()).powi(m as i32);
        assert!((id.eval(beta) - want).abs() < 1e-12 * want);
    }
    let id1 = spin_to_light_witness(&SpinObservable::identity(1));
    assert_eq!(id1.coeff(0, 0).re, 1.0);
    assert_eq!(id1.coeff(1, 1).re, 1.0);
    let ghz2 = spin_to_light_witness(&ghz_witness(2).unwrap());
    assert_eq!(ghz2.coeff(2, 0).re, -0.5);
    assert_eq!(ghz2.coeff(0, 2).re, -0.5);
    assert_eq!(ghz2.coeff(1, 1).re, 1.0);
    assert_eq!(ghz2.coeff(0, 0).re, 0.0);
}

#[test]
fn ghz_witness_maps_to_closed_form() {
    for m in 2..=6 {
        let w = spin_to_light_witness(&ghz_witness(m).unwrap());
        let mut want = HermBivarPoly::zero(Support::Box, m);
        want.set(m, 0, Complex64::new(-0.5, 0.0)).unwrap();
        for l in 1..m {
            want.set(l, l, Complex64::new(0.5 * binomial(m, l), 0.0)).unwrap();
        }
        assert_eq!(w.max_coeff_diff(&want), 0.0, "m {m}");
    }
}

#[test]
fn projection_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for m in 1..=5 {
        let v = random_observable(&mut rng, m);
        let w = random_observable(&mut rng, m);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = v.matrix() * Complex64::new(a, 0.0) + w.matrix() * Complex64::new(b, 0.0);
        let lhs = stereographic_poly(&SpinObservable::new(combo).unwrap());
        let rhs = stereographic_poly(&v).scaled(a).add(&stereographic_poly(&w).scaled(b));
        assert!(lhs.max_coeff_diff(&rhs) < 1e-12 * (1.0 + lhs.max_abs_coeff()));
    }
}

fn box_poly() -> impl Strategy<Value = (HermBivarPoly, usize)> {
    (1usize..=4, prop::collection::vec(((0usize..9, 0usize..9), -1.0..1.0f64), 1..6)).prop_map(
        |(m, terms)| {
            let mut p = HermBivarPoly::zero(Support::Box, 8);
            for ((k, l), c) in terms {
                p.set(k, l, Complex64::new(c, 0.0)).unwrap();
            }
            (p, m)
        },
    )
}

proptest! {
    #[test]
    fn inclusion_flags_are_nested((p, m) in box_poly()) {
        let f = support_inclusion_check(&p, m);
        prop_assert!(!f.in_p_m || f.in_s_m);
        prop_assert!(!f.in_s_m || f.in_p_2m);
    }
}

#[test]
fn inclusion_examples() {
    for m in 1..=4 {
        let mut abs = HermBivarPoly::zero(Support::Box, m);
        abs.set(m, m, Complex64::new(1.0, 0.0)).unwrap();
        let f = support_inclusion_check(&abs, m);
        assert!(f.in_s_m && !f.in_p_m);

        let mut pow = HermBivarPoly::zero(Support::Total, 2 * m);
        pow.set(0, 2 * m, Complex64::new(1.0, 0.0)).unwrap();
        let f = support_inclusion_check(&pow, m);
        assert!(f.in_p_2m && !f.in_s_m);

        let mut low = HermBivarPoly::zero(Support::Total, m);
        low.set(0, m, Complex64::new(1.0, 0.0)).unwrap();
        low.set(0, 0, Complex64::new(2.0, 0.0)).unwrap();
        let f = support_inclusion_check(&low, m);
        assert!(f.in_p_m && f.in_s_m && f.in_p_2m);
    }
}
