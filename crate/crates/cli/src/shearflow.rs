use channel_fluid::io::encode_snapshot;
use channel_fluid::{diagnostics, ChannelGeometry, Diagnostics, Exec, FluidState, Scheme, VorticityModel};
use control_design::{condition_report, enstrophy_bound, ConditionReport, ShearControl};

use crate::config::{ControlMode, ExperimentConfig, SchemeChoice, TimeStep};
use crate::{CliError, Report};

pub fn geometry(cfg: &ExperimentConfig) -> Result<ChannelGeometry, CliError> {
    ChannelGeometry::new(cfg.x, cfg.y, cfg.nx, cfg.ny).map_err(|e| cfg.error("geometry.nx", e.to_string()).into())
}

/// The control named by the config, checked for positivity.
pub fn control(cfg: &ExperimentConfig) -> Result<ShearControl, CliError> {
    let c = match cfg.mode {
        ControlMode::Off => ShearControl::off(cfg.y),
        ControlMode::Designed => ShearControl::designed(cfg.x, cfg.y, cfg.gamma)
            .map_err(|e| match CliError::from(e) {
                CliError::Config(m) => cfg.error("geometry.Y", m).into(),
                other => other,
            })?,
        ControlMode::Explicit => ShearControl::constant(cfg.a0, cfg.gamma, cfg.y),
    };
    c.check_positive()?;
    Ok(c)
}

pub fn condition_text(r: &ConditionReport) -> Report {
    let mut out = Report::default();
    for c in &r.conditions {
        out.num(&format!("{}_lhs", c.name), c.lhs).text(&format!("{}_pass", c.name), c.pass);
    }
    out.num("phi_max", r.phi_max).num("phi_min", r.phi_min).text("conditions_pass", r.pass());
    out
}

pub struct ShearRun {
    pub rows: Vec<Diagnostics>,
    /// (step, t, ω) at the snapshot stride.
    pub snapshots: Vec<(usize, f64, ndarray::Array2<f64>)>,
    pub conditions: Option<Report>,
    pub geom: ChannelGeometry,
    pub report: Report,
}

pub fn run_shearflow(cfg: &ExperimentConfig, require_stable: bool) -> Result<ShearRun, CliError> {
    let geom = geometry(cfg)?;
    let control = control(cfg)?;
    let conditions = (cfg.mode != ControlMode::Off).then(|| condition_report(&control, cfg.x, cfg.y, cfg.ny));
    if require_stable {
        if let Some(r) = conditions.as_ref().filter(|r| !r.pass()) {
            let failed: Vec<&str> = r.conditions.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            return Err(CliError::Precondition(format!("conditions not met: {}", failed.join(", "))));
        }
    }
    let scheme = match cfg.scheme {
        SchemeChoice::Lawson => Scheme::Lawson,
        SchemeChoice::Rk4 => Scheme::Rk4,
        SchemeChoice::Auto if control.gamma != 0.0 => Scheme::Lawson,
        SchemeChoice::Auto => Scheme::Rk4,
    };
    let model = VorticityModel::new(&geom, &control, scheme, Exec::default())?;
    let mut state = FluidState::perturbed(&geom, cfg.amplitude, cfg.seed);
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Cfl(c) => model.stable_dt(state.omega.view(), c),
    };
    let steps = (cfg.t_end / dt).round().max(1.0) as usize;
    let mut rows = vec![diagnostics(&state, &model)];
    let mut snapshots = Vec::new();
    let snap = |k: usize| cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0;
    if snap(0) {
        snapshots.push((0, 0.0, state.omega.clone()));
    }
    let mut substeps = 0;
    for k in 1..=steps {
        substeps += model.step(&mut state, dt)?.substeps;
        if k % cfg.stride == 0 || k == steps {
            rows.push(diagnostics(&state, &model));
        }
        if snap(k) {
            snapshots.push((k, state.t, state.omega.clone()));
        }
    }
    let first = rows[0];
    let rel = |f: fn(&Diagnostics) -> f64| {
        let f0 = f(&first);
        rows.iter().map(|r| (f(r) - f0).abs()).fold(0.0, f64::max) / f0.abs().max(f64::MIN_POSITIVE)
    };
    let growth = rows.iter().map(|r| r.pert_enstrophy).fold(0.0, f64::max) / first.pert_enstrophy;
    let mut report = Report::default();
    report
        .text("system", "shear-flow")
        .num("X", cfg.x)
        .num("Y", cfg.y)
        .text("grid", format!("{}x{}", geom.nx, geom.ny + 1))
        .num("gamma", control.gamma)
        .text("scheme", format!("{scheme:?}").to_lowercase())
        .sci("dt", dt)
        .text("steps", steps)
        .text("substeps", substeps)
        .num("t_end", state.t)
        .sci("pert_enstrophy_initial", first.pert_enstrophy)
        .sci("pert_enstrophy_max_ratio", growth)
        .sci("energy_drift", rel(|r| r.energy))
        .sci("enstrophy_drift", rel(|r| r.enstrophy))
        .sci("circulation_drift", rows.iter().map(|r| (r.circulation - first.circulation).abs()).fold(0.0, f64::max))
        .sci("h2_initial", first.h2)
        .sci("h2_drift", rel(|r| r.h2));
    if control.design.is_some() {
        if let Ok(b) = enstrophy_bound(&control, first.h2) {
            let max = rows.iter().map(|r| r.pert_enstrophy).fold(0.0, f64::max);
            report.sci("enstrophy_bound", b).text("below_bound", max <= b);
        }
    }
    Ok(ShearRun { rows, snapshots, conditions: conditions.as_ref().map(condition_text), geom, report })
}

pub fn snapshot_bytes(run: &ShearRun, idx: usize) -> Result<Vec<u8>, CliError> {
    let (_, t, w) = &run.snapshots[idx];
    Ok(encode_snapshot("omega", &run.geom, *t, w.view())?)
}
