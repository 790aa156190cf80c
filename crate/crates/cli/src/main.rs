use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geoflow_cli::analysis::{profile_csv, run_design, run_eigen, run_stability, spectrum_csv};
use geoflow_cli::config::{ControlMode, ExperimentConfig};
use geoflow_cli::shearflow::{control, geometry, run_shearflow, snapshot_bytes};
use geoflow_cli::verify::run_suite;
use geoflow_cli::{rigidbody, write_file, CliError, Overrides, Report, System};

#[derive(Parser, Debug)]
#[command(name = "geoflow", version, about = "Controlled Lie-Poisson systems: rigid body with rotor and charged channel flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment file with `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Perturbation seed (overrides run.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exit with code 3 if the stability conditions fail.
    #[arg(long, global = true)]
    require_stable: bool,
    /// Smaller grids and shorter runs.
    #[arg(long, global = true)]
    quick: bool,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct Channel {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the rigid body with rotor; writes rigidbody.csv.
    Rigidbody,
    /// Run the channel flow; writes timeseries.csv and snapshots.
    Shearflow,
    /// Print the design constants and conditions for (X, Y, gamma).
    Design(Channel),
    /// First eigenvalue of the drifted Laplacian against its bound.
    Eigen {
        #[command(flatten)]
        channel: Channel,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Definiteness of the second variation on the configured grid.
    Stability,
    /// Run a named check suite.
    Verify { suite: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("geoflow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GEOFLOW_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("GEOFLOW_THREADS must be a positive integer, got `{v}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn emit(report: &Report, out: Option<&Path>, name: &str) -> Result<(), CliError> {
    let text = report.render();
    print!("{text}");
    if let Some(dir) = out {
        write_file(&dir.join(name), text.as_bytes())?;
    }
    Ok(())
}

// Flags override the config.
fn channel(ch: Channel, cfg: &ExperimentConfig) -> (f64, f64, f64) {
    (ch.x.unwrap_or(cfg.x), ch.y.unwrap_or(cfg.y), ch.gamma.unwrap_or(cfg.gamma))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let ov = Overrides {
        config: cli.config.clone(),
        out: cli.out.clone(),
        seed: cli.seed,
        require_stable: cli.require_stable,
        quick: cli.quick,
    };
    let has_config = ov.config.is_some();
    match cli.command {
        Command::Rigidbody => {
            let mut cfg = ov.load(System::RigidBody)?;
            if ov.quick {
                cfg.t_end = cfg.t_end.min(10.0);
            }
            let run = rigidbody::run_rigidbody(&cfg)?;
            write_file(&cfg.out.join("rigidbody.csv"), &rigidbody::csv(&run.samples)?)?;
            emit(&run.report, Some(&cfg.out), "rigidbody.txt")
        }
        Command::Shearflow => {
            let mut cfg = ov.load(System::ShearFlow)?;
            if ov.quick {
                cfg.nx = cfg.nx.min(64);
                cfg.ny = cfg.ny.min(32);
                cfg.t_end = cfg.t_end.min(10.0);
            }
            let run = run_shearflow(&cfg, ov.require_stable)?;
            write_file(&cfg.out.join("timeseries.csv"), &channel_fluid::io::encode_timeseries(&run.rows)?)?;
            for (i, (step, _, _)) in run.snapshots.iter().enumerate() {
                write_file(&cfg.out.join(format!("omega_{step:07}.gfld")), &snapshot_bytes(&run, i)?)?;
            }
            if let Some(c) = &run.conditions {
                write_file(&cfg.out.join("conditions.txt"), c.render().as_bytes())?;
            }
            emit(&run.report, Some(&cfg.out), "summary.txt")
        }
        Command::Design(ch) => {
            let cfg = ov.load(System::ShearFlow)?;
            let (x, y, gamma) = channel(ch, &cfg);
            let d = run_design(x, y, gamma)?;
            let out = (has_config || ov.out.is_some()).then_some(cfg.out.as_path());
            if let Some(dir) = out {
                write_file(&dir.join("design_profile.csv"), &profile_csv(&d)?)?;
            }
            emit(&d.report, out, "design.txt")
        }
        Command::Eigen { channel: ch, resolution } => {
            let cfg = ov.load(System::ShearFlow)?;
            let (x, y, gamma) = channel(ch, &cfg);
            let r = run_eigen(x, y, gamma, resolution)?;
            let out = (has_config || ov.out.is_some()).then_some(cfg.out.as_path());
            emit(&r, out, "eigen.txt")
        }
        Command::Stability => {
            let mut cfg = ov.load(System::ShearFlow)?;
            if !has_config {
                (cfg.nx, cfg.ny, cfg.mode) = (64, 32, ControlMode::Designed);
            }
            if ov.quick {
                cfg.nx = cfg.nx.min(32);
                cfg.ny = cfg.ny.min(16);
            }
            let st = run_stability(&control(&cfg)?, &geometry(&cfg)?)?;
            let out = (has_config || ov.out.is_some()).then_some(cfg.out.as_path());
            if let Some(dir) = out {
                write_file(&dir.join("spectrum.csv"), &spectrum_csv(&st)?)?;
            }
            emit(&st.report, out, "stability.txt")?;
            if ov.require_stable && st.max >= 0.0 {
                return Err(CliError::Precondition(format!("second variation has max eigenvalue {:.4e} >= 0", st.max)));
            }
            Ok(())
        }
        Command::Verify { suite } => {
            let checks = run_suite(&suite, ov.quick)?;
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{suite}: {} passed, {failed} failed", checks.len() - failed);
            if failed > 0 {
                return Err(CliError::Verify(format!("{failed} check(s) in `{suite}`")));
            }
            Ok(())
        }
    }
}
