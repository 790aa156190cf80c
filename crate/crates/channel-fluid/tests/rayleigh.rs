use channel_fluid::*;
use num_complex::Complex64;

// Shooting oracle for the Rayleigh equation ψ'' = (k² + U''/(U − c))ψ with
// U = cos y, ψ(0) = 0, ψ'(0) = 1: returns ψ(L).
fn shoot(k: f64, c: Complex64, l: f64) -> Complex64 {
    let n = 4000;
    let h = l / n as f64;
    let f = |y: f64, p: Complex64| (k * k + (-y.cos()) / (y.cos() - c)) * p;
    let (mut p, mut q) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for i in 0..n {
        let y = i as f64 * h;
        let (k1p, k1q) = (q, f(y, p));
        let (k2p, k2q) = (q + 0.5 * h * k1q, f(y + 0.5 * h, p + 0.5 * h * k1p));
        let (k3p, k3q) = (q + 0.5 * h * k2q, f(y + 0.5 * h, p + 0.5 * h * k2p));
        let (k4p, k4q) = (q + h * k3q, f(y + h, p + h * k3p));
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    }
    p
}

// Secant iteration on c from a starting guess.
fn shooting_phase_speed(k: f64, l: f64, c0: Complex64) -> Complex64 {
    let (mut a, mut b) = (c0, c0 * 1.01);
    let (mut fa, mut fb) = (shoot(k, a, l), shoot(k, b, l));
    for _ in 0..50 {
        let c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = shoot(k, b, l);
        if (b - a).norm() < 1e-12 {
            break;
        }
    }
    b
}

#[test]
fn short_channel_is_linearly_stable() {
    let g = ChannelGeometry::new(0.3, 0.9, 64, 64).unwrap();
    let r = rayleigh_growth_rate(&g, 31, Exec::Sequential).unwrap();
    assert!(r.rate <= 1e-10, "{}", r.rate);
}

#[test]
fn widths_below_one_have_no_unstable_mode_at_any_length() {
    // cos y on [0, Yπ] with Y < 1 has a single sign of U″(U − U(y_s)) and so no
    // growing normal mode, whatever the channel length.
    for x in [2.0, 4.0, 10.0] {
        let g = ChannelGeometry::new(x, 0.9, 64, 64).unwrap();
        let r = rayleigh_growth_rate(&g, 31, Exec::Sequential).unwrap();
        assert!(r.rate <= 1e-10, "X = {x}: {}", r.rate);
    }
}

#[test]
fn wide_channel_is_unstable_and_matches_shooting() {
    let g = ChannelGeometry::new(4.0, 2.0, 64, 128).unwrap();
    let r = rayleigh_growth_rate(&g, 8, Exec::Sequential).unwrap();
    assert!(r.rate > 0.1);
    let c = shooting_phase_speed(r.wavenumber, g.ly(), r.phase_speed);
    assert!((c - r.phase_speed).norm() < 1e-3, "matrix {} shooting {c}", r.phase_speed);
    assert!((r.wavenumber * c.im - r.rate).abs() < 2e-3 * r.rate);
}

#[test]
fn growth_rate_converges_under_refinement() {
    let rate = |ny| {
        let g = ChannelGeometry::new(4.0, 2.0, 16, ny).unwrap();
        rayleigh_growth_rate(&g, 4, Exec::Sequential).unwrap().rate
    };
    let (a, b, c) = (rate(32), rate(64), rate(128));
    assert!((c - b).abs() < (b - a).abs());
    assert!((c - b).abs() < 1e-3 * c);
}

#[test]
fn eigenfunction_is_normalised() {
    let g = ChannelGeometry::new(4.0, 2.0, 16, 64).unwrap();
    let r = rayleigh_growth_rate(&g, 4, Exec::Parallel).unwrap();
    assert_eq!(r.eigenfunction.len(), g.ny - 1);
    let m = r.eigenfunction.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    assert!((m - 1.0).abs() < 1e-12);
    assert_eq!(r.rates.len(), 4);
}
