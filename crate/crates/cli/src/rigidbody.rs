use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigid_rotor::{integrate, stability_condition, ControlGainK, RigidState, RotorParams, Sample, Scheme};

use crate::config::{ControlMode, ExperimentConfig, TimeStep};
use crate::{csv_bytes, CliError, Report};

pub const CSV_HEADER: [&str; 8] = ["t", "Pi1", "Pi2", "Pi3", "q", "energy", "casimir", "p_k"];

pub struct RigidRun {
    pub samples: Vec<Sample>,
    pub report: Report,
}

/// Π₀ plus a seeded perturbation of norm `rigid.perturbation`.
pub fn initial_state(cfg: &ExperimentConfig) -> RigidState {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt().max(f64::MIN_POSITIVE);
    RigidState {
        pi: std::array::from_fn(|i| cfg.pi0[i] + cfg.rigid_perturbation * d[i] / n),
        q: cfg.q0,
    }
}

pub fn run_rigidbody(cfg: &ExperimentConfig) -> Result<RigidRun, CliError> {
    let params = RotorParams::new(cfg.big_i, cfg.small_i)?;
    let gain = match (cfg.mode, cfg.k) {
        (ControlMode::Off, _) | (_, None) => None,
        (_, Some(k)) => Some(ControlGainK::new(k, cfg.p_k).map_err(|e| cfg.error("control.k", e.to_string()))?),
    };
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Cfl(_) => return Err(cfg.error("integration.dt", "the rigid body needs a fixed integration.dt").into()),
    };
    let s0 = initial_state(cfg);
    let traj = integrate(s0, gain, &params, dt, cfg.t_end, cfg.stride, Scheme::Rk4)?;
    let mut report = Report::default();
    report
        .text("system", "rigid-body")
        .text("controlled", gain.is_some())
        .num("t_end", cfg.t_end)
        .num("dt", dt)
        .text("samples", traj.samples.len())
        .sci("max_deviation", traj.max_deviation(cfg.pi0))
        .sci("casimir_drift", traj.max_drift(|s| s.casimir))
        .sci("energy_drift", traj.max_drift(|s| s.energy))
        .sci("p_k_drift", traj.max_drift(|s| s.p_k));
    if let Some(g) = gain {
        report.text("stability_condition", stability_condition(&g, &params));
    }
    Ok(RigidRun { samples: traj.samples, report })
}

pub fn csv(samples: &[Sample]) -> Result<Vec<u8>, CliError> {
    csv_bytes(
        &CSV_HEADER,
        samples.iter().map(|s| vec![s.t, s.pi[0], s.pi[1], s.pi[2], s.q, s.energy, s.casimir, s.p_k]),
    )
}

/// Reads back a trajectory written by `csv`.
pub fn read_csv(bytes: &[u8]) -> Result<Vec<Sample>, CliError> {
    let bad = |m: String| CliError::Config(format!("rigid-body CSV: {m}"));
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let v: Vec<f64> = rec.iter().map(str::parse).collect::<Result<_, _>>().map_err(|e| bad(format!("{e}")))?;
        out.push(Sample { t: v[0], pi: [v[1], v[2], v[3]], q: v[4], energy: v[5], casimir: v[6], p_k: v[7] });
    }
    Ok(out)
}
