use std::f64::consts::PI;

use channel_fluid::ChannelGeometry;
use control_design::quad::simpson;
use control_design::ShearControl;
use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stability_analysis::*;

fn setup(x: f64, y: f64, gamma: f64) -> DriftedSetup {
    let c = if gamma == 0.0 { ShearControl::off(y) } else { ShearControl::designed(x, y, gamma).unwrap() };
    drifted_setup(&c, &ChannelGeometry::new(x, y, 16, 64).unwrap()).unwrap()
}

#[test]
fn z_round_trips() {
    let s = setup(2.0, 0.9, 1.0);
    for i in 0..=40 {
        let y = 0.9 * PI * i as f64 / 40.0;
        assert!((s.y(s.z(y)) - y).abs() < 1e-10, "y = {y}");
    }
    for i in 0..=40 {
        let z = s.z_total * i as f64 / 40.0;
        assert!((s.z(s.y(z)) - z).abs() < 1e-10);
    }
}

#[test]
fn z_gamma_matches_fine_quadrature() {
    for &(x, y) in &[(0.5, 0.6), (2.0, 0.9), (4.0, 0.75)] {
        let s = setup(x, y, 1.0);
        let fine = simpson(|t| s.control.phi(t).powf(-0.5), 0.0, y * PI, 1_000_000);
        assert!((s.z_total - fine).abs() < 1e-8 * fine, "({x}, {y}): {} vs {fine}", s.z_total);
    }
}

#[test]
fn g_is_convex_in_z() {
    for &x in &[0.5, 1.0, 2.0, 4.0] {
        for &y in &[0.6, 0.75, 0.9] {
            let s = setup(x, y, 1.0);
            assert!(s.min_g_zz >= -1e-10, "({x}, {y}): {}", s.min_g_zz);
            assert_eq!(s.k, 0.0);
        }
    }
}

#[test]
fn analytic_g_zz_matches_finite_differences() {
    let s = setup(1.0, 0.75, 1.0);
    let h = 1e-3;
    for i in 1..10 {
        let z = s.z_total * i as f64 / 10.0;
        let fd = (s.g(z + h) - 2.0 * s.g(z) + s.g(z - h)) / (h * h);
        let an = g_zz(&s.control, s.y(z));
        assert!((fd - an).abs() < 1e-5 * an.abs().max(1.0), "z = {z}: {fd} vs {an}");
    }
}

#[test]
fn flat_square_has_lambda_two() {
    let s = setup(1.0, 1.0, 0.0);
    assert!((s.z_total - PI).abs() < 1e-12);
    let l64 = lambda1_drifted(&s, 64).unwrap().value;
    let l128 = lambda1_drifted(&s, 128).unwrap().value;
    assert!((l128 - 2.0).abs() < 2e-4, "{l128}");
    // Second order: the error drops by four.
    assert!(((l64 - 2.0) / (l128 - 2.0) - 4.0).abs() < 0.01);
}

#[test]
fn flat_rectangle_matches_closed_form() {
    for &(x, y) in &[(0.5, 0.6), (3.0, 0.8), (2.0, 1.5)] {
        let s = setup(x, y, 0.0);
        let l = lambda1_drifted(&s, 128).unwrap().value;
        let want = 1.0 / (x * x) + 1.0 / (y * y);
        assert!((l - want).abs() < 2e-4 * want, "({x}, {y}): {l} vs {want}");
    }
}

// Independent check of the separation: assemble the whole 2-D operator from
// its action and diagonalise it in the weighted inner product.
#[test]
fn separable_eigenvalue_matches_full_operator() {
    let s = setup(2.0, 0.9, 1.0);
    let n = 16;
    let l1 = lambda1_drifted(&s, n).unwrap();
    let op = &l1.op;
    let m = n - 1;
    let mut a = DMatrix::zeros(m * m, m * m);
    for c in 0..m * m {
        let mut e = Array2::zeros((m, m));
        e[[c / m, c % m]] = 1.0;
        for (r, v) in op.apply(&e).iter().enumerate() {
            a[(r, c)] = *v;
        }
    }
    // W^{1/2} A W^{-1/2} is symmetric.
    let w = |r: usize| op.weight[r / m].sqrt();
    let sym = DMatrix::from_fn(m * m, m * m, |r, c| w(r) * a[(r, c)] / w(c));
    assert!((&sym - sym.transpose()).amax() < 1e-9 * sym.amax());
    let lo = SymmetricEigen::new(sym).eigenvalues.min();
    assert!((lo - l1.value).abs() < 1e-10 * lo, "{lo} vs {}", l1.value);
}

#[test]
fn lambda1_exceeds_the_diameter_bound() {
    for &x in &[0.5, 1.0, 2.0, 4.0] {
        for &y in &[0.6, 0.75, 0.9] {
            let s = setup(x, y, 1.0);
            let bound = s.lambda1_bound();
            assert!((bound - PI * PI / (PI * PI * x * x + s.z_total.powi(2))).abs() < 1e-15);
            for n in [64, 128] {
                let l = lambda1_drifted(&s, n).unwrap().value;
                assert!(l >= bound, "({x}, {y}, {n}): {l} < {bound}");
            }
        }
    }
}

#[test]
fn fll_bound_special_cases() {
    assert!((fll_bound(PI, 0.0) - 1.0).abs() < 1e-15);
    for &d in &[1.0, PI, 7.5] {
        let k = 4.0 * PI * PI / (d * d);
        assert!((fll_bound(d, k) - k).abs() < 1e-12 * k);
        // Monotone in K and never below the K = 0 value.
        assert!(fll_bound(d, 0.5 * k) > fll_bound(d, 0.0));
        assert!(fll_bound(d, -k) >= 0.0);
    }
}

#[test]
fn eigenfunction_is_the_equality_case() {
    let s = setup(2.0, 0.9, 1.0);
    let l1 = lambda1_drifted(&s, 64).unwrap();
    let r = reverse_poincare_check(&l1, &[l1.eigenfunction()]).unwrap();
    let (lhs, rhs) = r.trials[0];
    assert!(((lhs - rhs) / rhs).abs() < 1e-6, "{lhs} vs {rhs}");
}

#[test]
fn random_trials_satisfy_reverse_poincare() {
    let s = setup(1.0, 0.75, 1.0);
    let l1 = lambda1_drifted(&s, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fields: Vec<Array2<f64>> =
        (0..20).map(|_| Array2::from_shape_fn((31, 31), |_| rng.random_range(-1.0..1.0))).collect();
    let r = reverse_poincare_check(&l1, &fields).unwrap();
    assert_eq!(r.trials.len(), 20);
    assert!(r.holds(0.0), "{:?}", r.gaps());
}

#[test]
fn wrong_trial_shape_is_rejected() {
    let s = setup(1.0, 0.75, 1.0);
    let l1 = lambda1_drifted(&s, 16).unwrap();
    assert!(matches!(reverse_poincare_check(&l1, &[Array2::zeros((3, 3))]), Err(StabilityError::Shape(_))));
}
