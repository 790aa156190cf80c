//! Named bundles of invariant checks for `geoflow verify <suite>`.

use std::time::Instant;

use algebra_core::{kk_metric, kk_metric_inverse, modified_kk_data, rigid_body_data, KKData};
use channel_fluid::{diagnostics, ChannelGeometry, Exec, FluidState, Scheme, VelocityModel, VorticityModel};
use control_design::ShearControl;
use nalgebra::DMatrix;
use ndarray::s;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stability_analysis::{drifted_setup, lambda1_drifted, second_variation_matrix};

use crate::CliError;

pub const SUITES: [&str; 5] = ["metric", "conservation", "equivalence", "eigenbound", "secondvariation"];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} {} ({:.2} s) {}", self.name, self.seconds, self.detail)
    }
}

fn timed(name: &str, f: impl FnOnce() -> Result<(bool, String), CliError>) -> Check {
    let t = Instant::now();
    let (pass, detail) = f().unwrap_or_else(|e| (false, e.to_string()));
    Check { name: name.to_string(), pass, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run_suite(suite: &str, quick: bool) -> Result<Vec<Check>, CliError> {
    Ok(match suite {
        "metric" => metric(quick),
        "conservation" => conservation(quick),
        "equivalence" => vec![equivalence(quick)],
        "eigenbound" => eigenbound(quick),
        "secondvariation" => second_variation(quick),
        other => {
            return Err(CliError::Config(format!("unknown suite `{other}` (expected one of {})", SUITES.join(", "))))
        }
    })
}

fn random_kk(rng: &mut ChaCha8Rng) -> KKData {
    let n = rng.random_range(1..=5);
    let m = rng.random_range(1..=3);
    let mut spd = |k: usize| {
        let b = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(k, k) * 0.5
    };
    let (mu, inertia) = (spd(n), spd(m));
    let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
    KKData::new(mu, inertia, a).expect("dimensions agree by construction")
}

fn metric(quick: bool) -> Vec<Check> {
    let trials = if quick { 100 } else { 1000 };
    let identity = timed("metric.inverse_identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let d = random_kk(&mut rng);
            let g = kk_metric(&d).map_err(|e| CliError::Numerical(e.to_string()))?.blocks;
            let gi = kk_metric_inverse(&d).map_err(|e| CliError::Numerical(e.to_string()))?.blocks;
            worst = worst.max((&g * &gi - DMatrix::identity(g.nrows(), g.nrows())).amax());
        }
        Ok((worst < 1e-10, format!("{trials} trials, max |G G^-1 - I| = {worst:.2e}")))
    });
    let factor = timed("metric.factorization", || {
        let d = rigid_body_data([3.1, 2.1, 1.05], 0.05);
        let base = kk_metric_inverse(&d).map_err(|e| CliError::Numerical(e.to_string()))?.blocks;
        let mut worst: f64 = 0.0;
        for s in 0..=100 {
            let gamma = -0.5 + 0.01 * s as f64;
            let out = modified_kk_data(&d, gamma).map_err(|e| CliError::Numerical(e.to_string()))?;
            let lhs = kk_metric_inverse(&out.data).map_err(|e| CliError::Numerical(e.to_string()))?.blocks;
            worst = worst.max((lhs - &base * out.factor()).amax());
        }
        Ok((worst < 1e-10, format!("101 values of gamma, max residual {worst:.2e}")))
    });
    vec![identity, factor]
}

fn grid(quick: bool) -> (usize, usize) {
    if quick {
        (64, 32)
    } else {
        (128, 64)
    }
}

fn conservation(quick: bool) -> Vec<Check> {
    let (nx, ny) = grid(quick);
    let t_end = if quick { 5.0 } else { 50.0 };
    let free = timed("conservation.uncontrolled", || {
        let g = ChannelGeometry::new(2.0, 0.9, nx, ny)?;
        let m = VorticityModel::new(&g, &ShearControl::off(0.9), Scheme::Rk4, Exec::default())?;
        let mut s = FluidState::perturbed(&g, 1e-4, 7);
        let dt = m.stable_dt(s.omega.view(), 0.25);
        let d0 = diagnostics(&s, &m);
        let (mut de, mut dz, mut dc) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..(t_end / dt).round() as usize {
            m.step(&mut s, dt)?;
            let d = diagnostics(&s, &m);
            de = de.max(((d.energy - d0.energy) / d0.energy).abs());
            dz = dz.max(((d.enstrophy - d0.enstrophy) / d0.enstrophy).abs());
            dc = dc.max((d.circulation - d0.circulation).abs());
        }
        Ok((
            de < 1e-6 && dz < 1e-6 && dc < 1e-10,
            format!("t = {t_end}, energy {de:.2e}, enstrophy {dz:.2e}, circulation {dc:.2e}"),
        ))
    });
    let controlled = timed("conservation.controlled_h2", || {
        let g = ChannelGeometry::new(2.0, 0.9, nx, ny)?;
        let c = ShearControl::designed(2.0, 0.9, 1.0)?;
        let m = VorticityModel::new(&g, &c, Scheme::Lawson, Exec::default())?;
        let mut s = FluidState::perturbed(&g, 1e-4, 7);
        let h0 = diagnostics(&s, &m).h2;
        let mut drift = 0.0f64;
        for _ in 0..(t_end / 0.01).round() as usize {
            m.step(&mut s, 0.01)?;
            drift = drift.max(((diagnostics(&s, &m).h2 - h0) / h0).abs());
        }
        Ok((drift < 1e-4, format!("t = {t_end}, relative H2 drift {drift:.2e}")))
    });
    vec![free, controlled]
}

/// Relative L² difference of interior vorticity between the velocity-form
/// closed loop and the modified-metric vorticity evolution.
pub fn equivalence_error(nx: usize, ny: usize, t_end: f64, dt: f64) -> Result<f64, CliError> {
    let g = ChannelGeometry::new(2.0, 0.9, nx, ny)?;
    let c = ShearControl::designed(2.0, 0.9, 1.0)?;
    let mw = VorticityModel::new(&g, &c, Scheme::Lawson, Exec::default())?;
    let mv = VelocityModel::new(&g, &c, Exec::default())?;
    let mut s = FluidState::perturbed(&g, 1e-4, 7);
    let mut u = mv.velocity_of(s.omega.view());
    for _ in 0..(t_end / dt).round() as usize {
        mw.step(&mut s, dt)?;
        u = mv.step(&u, dt)?;
    }
    let wv = mv.vorticity(&u);
    let a = wv.slice(s![1..ny, ..]);
    let b = s.omega.slice(s![1..ny, ..]);
    let diff = (&a - &b).iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(diff / b.iter().map(|v| v * v).sum::<f64>().sqrt())
}

fn equivalence(quick: bool) -> Check {
    let (nx, ny) = grid(quick);
    let (t_end, tol) = if quick { (2.0, 5e-3) } else { (10.0, 1e-3) };
    timed("equivalence.velocity_vs_vorticity", || {
        let e = equivalence_error(nx, ny, t_end, 0.01)?;
        Ok((e < tol, format!("{nx}x{} t = {t_end}, relative L2 {e:.2e} (tol {tol:.0e})", ny + 1)))
    })
}

fn eigenbound(quick: bool) -> Vec<Check> {
    let resolutions: &[usize] = if quick { &[64] } else { &[64, 128] };
    let mut out = Vec::new();
    for &x in &[0.5, 1.0, 2.0, 4.0] {
        for &y in &[0.6, 0.75, 0.9] {
            out.push(timed(&format!("eigenbound.X{x}_Y{y}"), || {
                let c = ShearControl::designed(x, y, 1.0)?;
                let setup = drifted_setup(&c, &ChannelGeometry::new(x, y, 16, 256)?)?;
                let bound = setup.lambda1_bound();
                let mut worst = f64::INFINITY;
                for &n in resolutions {
                    worst = worst.min(lambda1_drifted(&setup, n)?.value);
                }
                Ok((worst >= bound, format!("lambda1 {worst:.6} >= bound {bound:.6}")))
            }));
        }
    }
    out
}

fn second_variation(quick: bool) -> Vec<Check> {
    let designed = timed("secondvariation.designed_negative", || {
        let g = ChannelGeometry::new(2.0, 0.9, 64, 32)?;
        let c = ShearControl::designed(2.0, 0.9, 1.0)?;
        let e = second_variation_matrix(&c, &g, Exec::default())?.extremes()?;
        Ok((e.max < 0.0, format!("(2, 0.9) gamma = 1: max eigenvalue {:.4e}", e.max)))
    });
    let wide = timed("secondvariation.wide_uncontrolled_indefinite", || {
        let (nx, ny) = if quick { (32, 16) } else { (64, 32) };
        let g = ChannelGeometry::new(2.0, 1.2, nx, ny)?;
        let e = second_variation_matrix(&ShearControl::off(1.2), &g, Exec::default())?.extremes()?;
        Ok((e.max > 0.0 && e.min < 0.0, format!("(2, 1.2) gamma = 0: eigenvalues in [{:.4e}, {:.4e}]", e.min, e.max)))
    });
    vec![designed, wide]
}
