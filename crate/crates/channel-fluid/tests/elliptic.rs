use std::f64::consts::PI;

use channel_fluid::*;
use control_design::ShearControl;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn geom(nx: usize, ny: usize) -> ChannelGeometry {
    ChannelGeometry::new(2.0, 0.9, nx, ny).unwrap()
}

// Random stream function, zero on the bottom wall and constant on the top.
fn random_stream(g: &ChannelGeometry, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut psi = Array2::from_shape_fn((g.ny + 1, g.nx), |_| rng.random_range(-1.0..1.0));
    psi.row_mut(0).fill(0.0);
    psi.row_mut(g.ny).fill(0.37);
    psi
}

fn random_field(g: &ChannelGeometry, seed: u64) -> MacField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MacField {
        u1: Array2::from_shape_fn((g.ny, g.nx), |_| rng.random_range(-1.0..1.0)),
        u2: Array2::from_shape_fn((g.ny + 1, g.nx), |_| rng.random_range(-1.0..1.0)),
    }
}

#[test]
fn modified_solve_inverts_its_operator() {
    let g = geom(64, 48);
    let c = ShearControl::designed(2.0, 0.9, 1.0).unwrap();
    let p = ModifiedPoisson::from_control(&g, &c, Exec::Sequential).unwrap();
    // The solver drops the Nyquist mode, so the test data carry none.
    let sp = p.spectral();
    let mut h = sp.forward(random_stream(&g, 1).view());
    h.column_mut(g.nx / 2).fill(num_complex::Complex64::new(0.0, 0.0));
    let psi = sp.inverse(h.view());
    let w = p.apply(psi.view());
    let back = p.solve(w.view(), p.momentum(psi.view()));
    let err = (&back - &psi).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    assert!(err < 1e-10, "round trip {err}");
}

#[test]
fn residual_of_smooth_solve_is_at_roundoff() {
    let g = geom(64, 64);
    let c = ShearControl::designed(2.0, 0.9, 1.0).unwrap();
    let p = ModifiedPoisson::from_control(&g, &c, Exec::Sequential).unwrap();
    let w = Array2::from_shape_fn((g.ny + 1, g.nx), |(j, i)| {
        g.y(j).sin() + 0.3 * (g.wavenumber(2) * g.x(i)).cos() * (3.0 * g.y(j)).sin()
    });
    let psi = p.solve(w.view(), 0.8);
    let r = p.apply(psi.view());
    let mut worst = 0.0f64;
    for j in 1..g.ny {
        for i in 0..g.nx {
            worst = worst.max((r[[j, i]] - w[[j, i]]).abs());
        }
    }
    assert!(worst < 1e-10, "residual {worst}");
    assert!((p.momentum(psi.view()) - 0.8).abs() < 1e-12);
}

// Manufactured solution of ∂ₓ²ψ + ∂_y(Φ∂_yψ) = ω with Φ = 1 − ½sin²y:
// ψ = cos(kx) sin²(πy/L) + y, second-order convergence.
#[test]
fn manufactured_solution_converges_at_second_order() {
    let errs: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&ny| {
            let g = geom(32, ny);
            let k = g.wavenumber(1);
            let l = g.ly();
            let a = PI / l;
            let phi = |y: f64| 1.0 - 0.5 * y.sin().powi(2);
            let dphi = |y: f64| -y.sin() * y.cos();
            let exact = |x: f64, y: f64| (k * x).cos() * (a * y).sin().powi(2) + y;
            let omega = |x: f64, y: f64| {
                let s2 = (a * y).sin().powi(2);
                let d1 = (k * x).cos() * a * (2.0 * a * y).sin() + 1.0;
                let d2 = (k * x).cos() * 2.0 * a * a * (2.0 * a * y).cos();
                -k * k * (k * x).cos() * s2 + phi(y) * d2 + dphi(y) * d1
            };
            let ph: Vec<f64> = g.ys_half().iter().map(|&y| phi(y)).collect();
            let p = ModifiedPoisson::new(&g, &ph, Exec::Sequential).unwrap();
            let w = Array2::from_shape_fn((g.ny + 1, g.nx), |(j, i)| omega(g.x(i), g.y(j)));
            let ex = Array2::from_shape_fn((g.ny + 1, g.nx), |(j, i)| exact(g.x(i), g.y(j)));
            let psi = p.solve(w.view(), p.momentum(ex.view()));
            (&psi - &ex).iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.8, "order {order} from {errs:?}");
    }
}

#[test]
fn equilibrium_stream_gives_the_shear_profile() {
    let errs: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&ny| {
            let g = geom(16, ny);
            let p = ModifiedPoisson::unit(&g, Exec::Sequential);
            let w = FluidState::equilibrium(&g).omega;
            let u = velocity_from_stream(p.solve(w.view(), equilibrium_momentum(&g)).view(), &g, p.spectral());
            let mut e = 0.0f64;
            for (j, row) in u.u1.rows().into_iter().enumerate() {
                let ue = g.y_half(j).cos();
                e = row.iter().fold(e, |m, v| m.max((v - ue).abs()));
            }
            assert!(u.u2.iter().all(|v| v.abs() < 1e-13));
            e
        })
        .collect();
    assert!(errs[2] < 1e-3);
    assert!((errs[0] / errs[1]).log2() > 1.8 && (errs[1] / errs[2]).log2() > 1.8, "{errs:?}");
}

#[test]
fn stream_velocities_are_divergence_free() {
    let g = geom(32, 24);
    let sp = Spectral::new(&g, Exec::Sequential);
    let u = velocity_from_stream(random_stream(&g, 5).view(), &g, &sp);
    let d = divergence(&u, &g, &sp);
    assert!(d.iter().all(|v| v.abs() < 1e-10));
    assert!(u.u2.row(0).iter().chain(u.u2.row(g.ny).iter()).all(|v| v.abs() < 1e-14));
}

#[test]
fn leray_projection_is_an_orthogonal_projector() {
    let g = geom(32, 24);
    let sp = Spectral::new(&g, Exec::Sequential);
    let v = random_field(&g, 9);
    let pv = leray_project(&v, &g, &sp);
    assert!(divergence(&pv, &g, &sp).iter().all(|x| x.abs() < 1e-10));
    let ppv = leray_project(&pv, &g, &sp);
    let mut d = ppv.clone();
    d.scaled_add(-1.0, &pv);
    assert!(d.max_abs() < 1e-12, "idempotence {}", d.max_abs());

    // The removed part is orthogonal to every divergence-free field.
    let mut removed = v.clone();
    removed.scaled_add(-1.0, &pv);
    for seed in 0..5 {
        let w = velocity_from_stream(random_stream(&g, 100 + seed).view(), &g, &sp);
        assert!(mac_inner(&removed, &w, &g).abs() < 1e-10);
    }
    // Gradients of cell fields are annihilated.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = Array2::from_shape_fn((g.ny, g.nx), |_| rng.random_range(-1.0..1.0));
    let grad = gradient(phi.view(), &g, &sp);
    assert!(leray_project(&grad, &g, &sp).max_abs() < 1e-10);
}

#[test]
fn curl_of_stream_velocity_is_the_laplacian() {
    let g = geom(32, 24);
    let p = ModifiedPoisson::unit(&g, Exec::Sequential);
    let psi = random_stream(&g, 11);
    let u = velocity_from_stream(psi.view(), &g, p.spectral());
    let c = curl(&u, &g, p.spectral());
    let lap = p.apply(psi.view());
    // The Nyquist mode is differentiated to zero by the spectral derivative.
    let mut h = p.spectral().forward((&c - &lap).view());
    h.column_mut(g.nx / 2).fill(num_complex::Complex64::new(0.0, 0.0));
    let d = p.spectral().inverse(h.view());
    assert!(d.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn nonpositive_metric_is_rejected() {
    let g = geom(16, 16);
    let c = ShearControl::constant(1.1, 1.0, 0.9);
    assert!(matches!(ModifiedPoisson::from_control(&g, &c, Exec::Sequential), Err(FluidError::NotPositive(_))));
}
