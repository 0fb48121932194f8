mod common;

use common::{positive_momentum_profile, Gaussians};
use gmch_core::exact::{frac, int, Rational};
use gmch_core::functionals::*;
use gmch_core::profiles::*;
use gmch_core::quadrature::{integrate, QuadratureSpec};
use gmch_core::spectral::{GridFunction, GridSpec};
use gmch_core::{Error, Model};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid() -> GridSpec {
    GridSpec::new(30.0, 2048).unwrap()
}

#[test]
fn zero_field() {
    let u = GridFunction::zeros(grid());
    let m = Model::new(2).unwrap();
    assert_eq!(energy_e(&u), 0.0);
    assert_eq!(functional_f(&u, &m), 0.0);
    assert_eq!(hamiltonian_h(&u, &m), 0.0);
    assert!(g_function(&u, 0.0).unwrap().samples().iter().all(|&v| v == 0.0));
    assert!(h_function(&u, 0.0, &m).unwrap().samples().iter().all(|&v| v == 0.0));
    assert_eq!(check_pointwise_h_bound(&u, 0.0, &m).unwrap(), 0.0);
    assert_eq!(stability_inequality(&u, &m).lhs, 0.0);
    let p = PeakonParams::from_amplitude(1, 0.8).unwrap();
    let d = h1_distance_to_peakon(&u, &p, 1.0).unwrap();
    assert!((d - 0.8 * 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn energy_of_a_sine() {
    let l = 20.0;
    let g = GridSpec::new(l, 256).unwrap();
    let u = GridFunction::from_fn(g, |x| (PI * x / l).sin()).unwrap();
    assert!((energy_e(&u) - (l + PI * PI / l)).abs() < 1e-12);
}

#[test]
fn sampled_peakon_energy_and_f() {
    let g = GridSpec::new(40.0, 1 << 17).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    assert!((energy_e(&u) - 2.0).abs() < 1e-6);
    let f = functional_f(&u, &Model::new(1).unwrap());
    assert!((f - 4.0 / 3.0).abs() < 1e-3);
}

#[test]
fn self_distance_of_a_sampled_peakon() {
    // The distance is the square root of a radicand with O(dx²) error, so
    // the radicand is what carries the tight tolerance.
    let g = GridSpec::new(40.0, 1 << 17).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    let r = h1_radicand(energy_e(&u), 1.0, u.samples()[g.len() / 2]);
    assert!(r.abs() < 1e-6);
}

#[test]
fn shifted_peakon_distance_matches_direct_quadrature() {
    let g = GridSpec::new(40.0, 1 << 17).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    // u(1) read off the closed form: the spectral interpolant of a kink rings.
    let lemma = h1_radicand(energy_e(&u), 1.0, (-1.0f64).exp()).sqrt();
    let spec = QuadratureSpec::default();
    let dens = |x: f64| {
        let a = (-x.abs()).exp();
        let b = (-(x - 1.0).abs()).exp();
        let da = if x < 0.0 { a } else { -a };
        let db = if x < 1.0 { b } else { -b };
        (a - b).powi(2) + (da - db).powi(2)
    };
    let direct = integrate(dens, -40.0, 40.0, &[0.0, 1.0], &spec).unwrap().value.sqrt();
    assert!((lemma - direct).abs() < 1e-3);
}

#[test]
fn max_location_of_peakons() {
    let g = GridSpec::new(20.0, 4096).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    let (m, xi) = max_and_location(&u);
    assert!((m - 1.0).abs() < 1e-6);
    assert!(xi.abs() <= g.dx() * g.dx());
    let v = sample_peakon(&p, &g, 3.7).unwrap();
    let (_, xi) = max_and_location(&v);
    // 3.7 is not a grid point; the parabola through a kink is only
    // first-order accurate.
    assert!((xi - 3.7).abs() <= g.dx());
}

#[test]
fn max_location_of_smooth_bump() {
    let g = GridSpec::new(20.0, 4096).unwrap();
    let u = GridFunction::from_fn(g.clone(), |x| (-(x - 1.2345f64).powi(2)).exp()).unwrap();
    let (m, xi) = max_and_location(&u);
    assert!((xi - 1.2345).abs() <= g.dx() * g.dx());
    assert!((m - 1.0).abs() < 1e-6);
}

#[test]
fn max_location_ties_go_left() {
    let g = GridSpec::new(20.0, 1024).unwrap();
    let u = GridFunction::from_fn(g.clone(), |x| {
        (-(x + 1.0f64).powi(2) * 4.0).exp() + (-(x - 1.0f64).powi(2) * 4.0).exp()
    })
    .unwrap();
    let (_, xi) = max_and_location(&u);
    assert!((xi + 1.0).abs() < 1e-2);
}

#[test]
fn g_vanishes_on_a_peakon() {
    let g = GridSpec::new(20.0, 4096).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    let gf = g_function(&u, 0.0).unwrap();
    assert!(gf.samples().iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn mch_h_function() {
    let g = grid();
    let m = Model::new(1).unwrap();
    let bump = Gaussians { terms: vec![(0.8, 0.3, 1.4)] };
    let u = bump.sample(&g);
    let h = h_function(&u, 0.25, &m).unwrap();
    for j in 0..g.len() {
        let (a, b) = (u.samples()[j], u.ux()[j]);
        let sign = if g.x(j) < 0.25 { -1.0 } else { 1.0 };
        let expected = a * a + sign * 2.0 / 3.0 * a * b - b * b / 3.0;
        assert!((h.samples()[j] - expected).abs() < 1e-15);
    }
}

#[test]
fn f_is_four_h_for_mch() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = grid();
    let m = Model::new(1).unwrap();
    for _ in 0..10 {
        let u = Gaussians::random(&mut rng, true).sample(&g);
        let (f, h) = (functional_f(&u, &m), hamiltonian_h(&u, &m));
        // Hand expansion: ∫u(u²−u_x²)y = ∫u⁴ + 2u²u_x² − u_x⁴/3.
        let hand: Vec<f64> = u
            .samples()
            .iter()
            .zip(u.ux())
            .map(|(a, b)| a.powi(4) + 2.0 * a * a * b * b - b.powi(4) / 3.0)
            .collect();
        let hand = g.integrate(&hand);
        assert!(((f - 4.0 * h) / f).abs() < 1e-8);
        assert!(((hand - f) / f).abs() < 1e-12);
    }
}

#[test]
fn f_over_h_is_two_n_plus_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = grid();
    for n in 1..=4 {
        let m = Model::new(n).unwrap();
        for _ in 0..3 {
            let u = Gaussians::random(&mut rng, true).sample(&g);
            let ratio = functional_f(&u, &m) / hamiltonian_h(&u, &m);
            assert!((ratio - 2.0 * (n as f64 + 1.0)).abs() < 1e-8, "n={n} ratio={ratio}");
        }
    }
}

#[test]
fn lemma_identity_on_random_profiles() {
    // E(u) − 2a² = ‖u − φ(·−ξ)‖² + 4a(u(ξ) − a), with the norm from line
    // quadrature on the analytic profiles.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = grid();
    let spec = QuadratureSpec::default();
    for _ in 0..50 {
        let prof = Gaussians::random(&mut rng, true);
        let u = prof.sample(&g);
        let a = rng.gen_range(0.3..1.5);
        let xi = rng.gen_range(-3.0..3.0);
        let dens = |x: f64| {
            let ph = a * (-(x - xi).abs()).exp();
            let dph = if x < xi { ph } else { -ph };
            (prof.value(x) - ph).powi(2) + (prof.derivative(x) - dph).powi(2)
        };
        let norm2 = integrate(dens, -30.0, 30.0, &[xi], &spec).unwrap().value;
        let lhs = energy_e(&u) - 2.0 * a * a;
        let rhs = norm2 + 4.0 * a * (u.value_at(xi) - a);
        assert!((lhs - rhs).abs() < 1e-3, "{lhs} vs {rhs}");
    }
}

#[test]
fn g_square_identity_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let g = grid();
    for _ in 0..50 {
        let u = Gaussians::random(&mut rng, true).sample(&g);
        let xi = rng.gen_range(-4.0..4.0);
        let v = u.value_at(xi);
        let lhs = g_squared_integral(&u, xi);
        assert!((lhs - (energy_e(&u) - 2.0 * v * v)).abs() < 1e-8);
    }
}

#[test]
fn hg_square_identity_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let g = grid();
    for n in 1..=4 {
        let m = Model::new(n).unwrap();
        for _ in 0..50 {
            let u = Gaussians::random(&mut rng, true).sample(&g);
            let xi = rng.gen_range(-4.0..4.0);
            let v = u.value_at(xi);
            let rhs = functional_f(&u, &m) - m.two_minus_c1() / (n as f64 + 1.0) * v.powi(2 * n as i32 + 2);
            let lhs = hg_squared_integral(&u, xi, &m);
            let scale = functional_f(&u, &m).abs().max(rhs.abs());
            assert!((lhs - rhs).abs() <= 1e-6 * scale, "n={n}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn pointwise_h_claim_on_positive_momentum_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let g = grid();
    for n in 1..=4 {
        let m = Model::new(n).unwrap();
        for i in 0..100 {
            let u = positive_momentum_profile(&mut rng, &g);
            let xi = if i % 2 == 0 { max_and_location(&u).1 } else { rng.gen_range(-5.0..5.0) };
            let margin = check_pointwise_h_bound(&u, xi, &m).unwrap();
            assert!(margin >= -1e-10, "n={n}: {margin}");
        }
    }
}

#[test]
fn pointwise_h_claim_on_mollified_peakon() {
    let g = GridSpec::new(20.0, 4096).unwrap();
    let p = PeakonParams::from_amplitude(2, 1.0).unwrap();
    let moll = MollifierSpec::for_peakon(&p, 0.1, MollifierShape::Gaussian).unwrap();
    let d = mollified_peakon(&p, &moll, &g).unwrap();
    let m = Model::new(2).unwrap();
    assert!(check_pointwise_h_bound(&d.u, 0.0, &m).unwrap() >= -1e-10);
}

#[test]
fn flat_window_margin_is_nonnegative() {
    // With u_x = 0 the margin is ((2−c₁)/2 − 1)u^{2n} = (B/2)u^{2n}.
    let g = GridSpec::new(20.0, 64).unwrap();
    let u = GridFunction::from_fn(g, |_| 0.7).unwrap();
    for n in 1..=3 {
        let m = Model::new(n).unwrap();
        let margin = check_pointwise_h_bound(&u, 0.0, &m).unwrap();
        let b = -m.c()[0];
        assert!((margin - 0.5 * b * 0.7f64.powi(2 * n as i32)).abs() < 1e-14);
        assert!(margin >= 0.0);
    }
}

#[test]
fn pointwise_h_precondition_reported_separately() {
    let g = grid();
    let u = GridFunction::from_fn(g, |x| (x / 3.0).sin()).unwrap();
    let r = check_pointwise_h_bound(&u, 0.0, &Model::new(1).unwrap());
    assert!(matches!(r, Err(Error::Precondition { .. })));
}

#[test]
fn peakon_saturates_the_inequality() {
    for n in 1..=6 {
        for a in [frac(1, 2), frac(1, 1), frac(3, 2)] {
            let t = gmch_core::coefficients::coefficient_table(n).unwrap();
            let a2 = &a * &a;
            let e = int(2) * &a2;
            let f = t.two_minus_c1() / int(n as i64 + 1) * num_traits::pow(a.clone(), 2 * n as usize + 2);
            assert!(stability_lhs_exact(n, &a, &e, &f).unwrap().is_zero());
            let m = Model::new(n).unwrap();
            let af = gmch_core::exact::to_f64(&a);
            let p = PeakonParams::from_amplitude(n, af).unwrap();
            let (ef, ff) = peakon_closed_invariants(&p).unwrap();
            assert!(stability_lhs(af, ef, ff, &m).abs() <= 1e-12);
            let dev = peak_deviation_bound(ef, ff, af, &p, &m).unwrap();
            assert!(dev.gap.abs() <= 1e-12);
            assert!(dev.sup_bound_ok);
        }
    }
    let _ = Rational::zero();
}

#[test]
fn sampled_peakon_lhs_is_small() {
    let g = GridSpec::new(40.0, 1 << 16).unwrap();
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let u = sample_peakon(&p, &g, 0.0).unwrap();
    let s = stability_inequality(&u, &Model::new(1).unwrap());
    assert!(s.lhs.abs() < 1e-3);
}

#[test]
fn mollified_peakon_satisfies_the_inequality() {
    let g = GridSpec::new(20.0, 4096).unwrap();
    for n in 1..=2 {
        let p = PeakonParams::from_amplitude(n, 1.0).unwrap();
        let moll = MollifierSpec::for_peakon(&p, 0.1, MollifierShape::Gaussian).unwrap();
        let d = mollified_peakon(&p, &moll, &g).unwrap();
        let s = stability_inequality(&d.u, &Model::new(n).unwrap());
        assert!(s.lhs <= 1e-6, "n={n}: {}", s.lhs);
    }
}

#[test]
fn sup_bound_violations_are_flagged() {
    let p = PeakonParams::from_amplitude(1, 1.0).unwrap();
    let m = Model::new(1).unwrap();
    let dev = peak_deviation_bound(1.0, 1.0, 1.0, &p, &m).unwrap();
    assert!(!dev.sup_bound_ok);
    assert!(peak_deviation_bound(1.0, 1.0, 0.0, &p, &m).is_err());
}

#[test]
fn sup_bound_on_test_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let g = grid();
    for _ in 0..50 {
        let u = Gaussians::random(&mut rng, true).sample(&g);
        assert!(sup_bound_holds(&u, 1e-10));
        let v = positive_momentum_profile(&mut rng, &g);
        assert!(sup_bound_holds(&v, 1e-10));
    }
}
