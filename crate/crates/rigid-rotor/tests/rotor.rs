use algebra_core::kk_metric_inverse;
use nalgebra::{Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use rigid_rotor::*;

const M: [f64; 3] = [0.0, 1.0, 0.0];

fn perturbed() -> RigidState {
    RigidState {
        pi: [1e-3, 1.0, 1e-3],
        q: 0.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn controlled_matches_modified_metric(
        pi in prop::array::uniform3(-2.0f64..2.0),
        k in -0.9f64..0.95,
        p_k in -0.5f64..0.5,
    ) {
        let params = RotorParams::default();
        let g = ControlGainK::new(k, p_k).unwrap();
        // γ = −1 (φ_k = 0) is where the modified data degenerate.
        prop_assume!(g.phi_k(&params).abs() > 1e-3);
        let direct = controlled_rhs(pi, &g, &params);
        let via = controlled_rhs_via_metric(pi, &g, &params).unwrap();
        for i in 0..3 {
            prop_assert!((direct[i] - via[i]).abs() < 1e-10 * (1.0 + direct[i].abs()));
        }
    }

    #[test]
    fn free_rhs_matches_metric_inverse(pi in prop::array::uniform3(-2.0f64..2.0), q in -1.0f64..1.0) {
        let params = RotorParams::default();
        let inv = kk_metric_inverse(&params.kk_data()).unwrap().blocks;
        let (a, dq) = free_rhs(&RigidState { pi, q }, &params);
        let b = lie_poisson_rhs(pi, q, &inv);
        prop_assert_eq!(dq, 0.0);
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() < 1e-12);
        }
        prop_assert!((a[0] * pi[0] + a[1] * pi[1] + a[2] * pi[2]).abs() < 1e-12);
    }

    #[test]
    fn threshold_is_scale_invariant(c in 0.1f64..10.0, k in -1.0f64..0.99) {
        let p = RotorParams::default();
        let g = ControlGainK { k, p_k: 0.0 };
        prop_assert_eq!(stability_condition(&g, &p), stability_condition(&g, &p.scaled(c)));
    }
}

#[test]
fn modified_data_reproduce_the_stated_controlled_metric() {
    let p = RotorParams::default();
    let k = 0.8;
    let g = ControlGainK::new(k, 0.0).unwrap();
    let m = g.modified(&p).unwrap();
    let mu = &m.data.base_metric;
    assert!((mu[(2, 2)] - p.big_i3() / (1.0 - k)).abs() < 1e-12);
    assert!((mu[(0, 0)] - p.lambda()[0]).abs() < 1e-12);
    assert!((m.c[(0, 2)] + k).abs() < 1e-12);
    let t = (p.i3() - k * p.lambda()[2]) / p.i3();
    assert!((m.t[(0, 0)] - t).abs() < 1e-12);
    let inertia = p.i3() / (1.0 + g.gamma(&p));
    assert!((m.data.inertia[(0, 0)] - inertia).abs() < 1e-14);
    assert!((1.0 + g.gamma(&p) - g.phi_k(&p)).abs() < 1e-12);
}

#[test]
fn free_middle_axis_diverges() {
    let p = RotorParams::default();
    let t = integrate(perturbed(), None, &p, 1e-3, 200.0, 100, Scheme::Rk4).unwrap();
    assert!(t.max_deviation(M) >= 0.1);
}

#[test]
fn controlled_middle_axis_stays_close_and_conserves() {
    let p = RotorParams::default();
    let g = ControlGainK::new(0.8, 0.0).unwrap();
    let t = integrate(perturbed(), Some(g), &p, 1e-3, 1000.0, 1000, Scheme::Rk4).unwrap();
    assert!(t.max_deviation(M) < 1e-2);
    assert!(t.max_drift(|s| s.casimir) < 1e-8);
    assert!(t.max_drift(|s| s.energy) < 1e-8);
    assert!(t.max_drift(|s| s.p_k) < 1e-8);
}

#[test]
fn free_run_conserves_energy_casimir_and_q() {
    let p = RotorParams::default();
    let s = RigidState { pi: [0.4, 0.8, -0.3], q: 0.2 };
    let t = integrate(s, None, &p, 1e-3, 100.0, 100, Scheme::Rk4).unwrap();
    assert!(t.max_drift(|s| s.casimir) < 1e-9);
    assert!(t.max_drift(|s| s.energy) < 1e-9);
    assert!(t.max_drift(|s| s.q) == 0.0);
}

#[test]
fn controlled_equilibrium_is_fixed() {
    let p = RotorParams::default();
    for k in [-0.5, 0.2, 0.8, 2.0] {
        let g = ControlGainK::new(k, 0.0).unwrap();
        assert_eq!(controlled_rhs(M, &g, &p), [0.0; 3]);
    }
}

#[test]
fn linear_spectrum_switches_at_threshold() {
    let p = RotorParams::default();
    let ks: Vec<f64> = (0..9900).map(|i| i as f64 * 1e-4).collect();
    let scan = linear_threshold_scan(&p, 1.0, &ks);
    let first_stable = scan
        .iter()
        .find(|(_, g)| *g <= 1e-9)
        .map(|(k, _)| *k)
        .unwrap();
    let thr = stability_threshold(&p);
    assert!((first_stable - thr).abs() <= 1e-4, "{first_stable} vs {thr}");
    for (k, g) in scan {
        let gain = ControlGainK { k, p_k: 0.0 };
        let stable = stability_condition(&gain, &p);
        // Away from the grid cell containing the threshold the two tests agree.
        if (k - thr).abs() > 1e-4 {
            assert_eq!(stable, g <= 1e-9, "k = {k}");
        }
    }
}

fn h(nu: [f64; 3], inv: &Matrix3<f64>) -> f64 {
    let v = Vector3::from(nu);
    0.5 * v.dot(&(inv * v))
}

#[test]
fn second_variation_matches_finite_differences() {
    let metric = Matrix3::new(3.0, 0.2, 0.1, 0.2, 2.0, -0.3, 0.1, -0.3, 1.5);
    let inv = metric.try_inverse().unwrap();
    let nu = [0.3, -0.8, 0.5];
    let v = [0.4, 0.1, -0.7];
    let exact = second_variation_so3(nu, v, &metric);
    let fd = |t: f64| {
        // Coadjoint flow ν̇ = −v×ν, i.e. rotation by −t about v.
        let rot = |s: f64| {
            let r = Rotation3::from_scaled_axis(Vector3::from(v) * -s) * Vector3::from(nu);
            [r[0], r[1], r[2]]
        };
        (h(rot(t), &inv) - 2.0 * h(nu, &inv) + h(rot(-t), &inv)) / (t * t)
    };
    let e1 = (fd(1e-2) - exact).abs();
    let e2 = (fd(5e-3) - exact).abs();
    assert!(e1 < 1e-4);
    let order = (e1 / e2).log2();
    assert!(order > 1.8, "observed order {order}");
}

#[test]
fn second_variation_is_negative_definite_when_stable() {
    let p = RotorParams::default();
    let l = p.lambda();
    for k in [0.55, 0.7, 0.8, 0.95] {
        let g = ControlGainK { k, p_k: 0.0 };
        assert!(stability_condition(&g, &p));
        let metric = Matrix3::from_diagonal(&Vector3::new(l[0], l[1], p.big_i3() / (1.0 - k)));
        let red = reduced_second_variation(M, [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], &metric);
        let ev = red.symmetric_eigenvalues();
        assert!(ev.max() < 0.0, "k = {k}: {ev}");
    }
    let metric = Matrix3::from_diagonal(&Vector3::new(l[0], l[1], p.big_i3()));
    let red = reduced_second_variation(M, [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]], &metric);
    let ev = red.symmetric_eigenvalues();
    assert!(ev.max() > 0.0 && ev.min() < 0.0);
}

#[test]
fn second_variation_ignores_stabilizer_at_equilibria() {
    let metric = Matrix3::from_diagonal(&Vector3::new(3.1, 2.1, 5.0));
    let nu = [0.0, 1.3, 0.0];
    let v = [0.4, -0.2, 0.9];
    let base = second_variation_so3(nu, v, &metric);
    for s in [-2.0, 0.5, 3.0] {
        let w = [v[0] + s * nu[0], v[1] + s * nu[1], v[2] + s * nu[2]];
        assert!((second_variation_so3(nu, w, &metric) - base).abs() < 1e-12);
    }
}
