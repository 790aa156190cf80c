//! The `design`, `eigen` and `stability` subcommands.

use channel_fluid::{ChannelGeometry, Exec};
use control_design::{condition_report, default_margin, design_constants, kappa, ShearControl};
use stability_analysis::{drifted_setup, fll_bound, lambda1_drifted, second_variation_matrix};

use crate::shearflow::condition_text;
use crate::{csv_bytes, CliError, Report};

// Sample rows used for the z map outside a simulation.
const Z_ROWS: usize = 256;

fn designed_or_off(x: f64, y: f64, gamma: f64) -> Result<ShearControl, CliError> {
    if gamma == 0.0 {
        Ok(ShearControl::off(y))
    } else {
        Ok(ShearControl::designed(x, y, gamma)?)
    }
}

pub struct Design {
    pub report: Report,
    /// Rows (y, a₀, Φ_γ).
    pub profile: Vec<Vec<f64>>,
}

/// Design constants, the three conditions, Z_γ and the λ₁ bound.
pub fn run_design(x: f64, y: f64, gamma: f64) -> Result<Design, CliError> {
    let d = design_constants(x, y)?;
    let control = designed_or_off(x, y, gamma)?;
    control.check_positive()?;
    let eps = default_margin(&d);
    let mut r = Report::default();
    r.num("X", x)
        .num("Y", y)
        .num("gamma", gamma)
        .num("b_bar", d.b_bar)
        .num("b_under", d.b_under)
        .num("alpha", d.alpha)
        .num("beta", d.beta)
        .num("r", d.r)
        .sci("eps", eps)
        .sci("kappa", kappa(&d, eps))
        .sci("design_identity_residual", (d.alpha * x * x + d.beta * y * y - (1.0 - d.r)).abs());
    r.lines.extend(condition_text(&condition_report(&control, x, y, Z_ROWS)).lines);
    let geom = ChannelGeometry::new(x, y, 16, Z_ROWS)?;
    let setup = drifted_setup(&control, &geom)?;
    r.num("z_gamma", setup.z_total).num("lambda1_bound", setup.lambda1_bound());
    if gamma == 0.0 {
        let g = ChannelGeometry::new(x, y, 32, 16)?;
        let e = second_variation_matrix(&control, &g, Exec::default())?.extremes()?;
        r.sci("uncontrolled_second_variation_max", e.max);
        let note = if e.max < 0.0 {
            "uncontrolled flow is formally stable (second variation negative definite)"
        } else {
            "uncontrolled second variation is indefinite"
        };
        r.text("note", note);
    }
    let ys = geom.ys();
    let profile = ys.iter().map(|&s| vec![s, control.a0(s), control.phi(s)]).collect();
    Ok(Design { report: r, profile })
}

pub fn profile_csv(d: &Design) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["y", "a0", "phi"], d.profile.iter().cloned())
}

/// λ₁ of the drifted Laplacian against its diameter bound.
pub fn run_eigen(x: f64, y: f64, gamma: f64, resolution: usize) -> Result<Report, CliError> {
    let control = designed_or_off(x, y, gamma)?;
    control.check_positive()?;
    let setup = drifted_setup(&control, &ChannelGeometry::new(x, y, 16, Z_ROWS)?)?;
    let l1 = lambda1_drifted(&setup, resolution)?;
    let d = setup.diameter_sq().sqrt();
    let mut r = Report::default();
    r.num("X", x)
        .num("Y", y)
        .num("gamma", gamma)
        .text("resolution", resolution)
        .num("z_gamma", setup.z_total)
        .sci("min_g_zz", setup.min_g_zz)
        .num("K", setup.k)
        .num("diameter", d)
        .num("lambda1", l1.value)
        .num("lambda1_x", l1.lambda_x)
        .num("lambda1_z", l1.mu_z)
        .num("lambda1_bound", setup.lambda1_bound())
        .num("fll_bound", fll_bound(d, setup.k))
        .text("bound_holds", l1.value >= setup.lambda1_bound());
    Ok(r)
}

pub struct Stability {
    pub report: Report,
    /// Rows (mode, index, eigenvalue), eigenvalues ascending within a mode.
    pub spectrum: Vec<Vec<f64>>,
    pub max: f64,
}

/// Extremes and per-mode spectrum of the second variation.
pub fn run_stability(control: &ShearControl, geom: &ChannelGeometry) -> Result<Stability, CliError> {
    let sv = second_variation_matrix(control, geom, Exec::default())?;
    let e = sv.extremes()?;
    let mut spectrum = Vec::new();
    for (m, b) in sv.blocks.iter().enumerate() {
        let mut ev: Vec<f64> = b.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        spectrum.extend(ev.into_iter().enumerate().map(|(i, v)| vec![m as f64, i as f64, v]));
    }
    let mut r = Report::default();
    r.num("X", geom.x_len)
        .num("Y", geom.y_len)
        .num("gamma", control.gamma)
        .text("grid", format!("{}x{}", geom.nx, geom.ny + 1))
        .text("dimension", sv.dim())
        .sci("max_eigenvalue", e.max)
        .sci("min_eigenvalue", e.min)
        .sci("residual", e.residual)
        .text("leading_mode", sv.leading_mode())
        .text("negative_definite", e.max < 0.0);
    Ok(Stability { report: r, spectrum, max: e.max })
}

pub fn spectrum_csv(s: &Stability) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["mode", "index", "eigenvalue"], s.spectrum.iter().cloned())
}
