//! Driver for the `geoflow` binary: config ingestion, experiment runs and file
//! output. Exit codes: 0 success, 1 config error, 2 numerical abort,
//! 3 stability precondition, 4 failed verification.

pub mod analysis;
pub mod config;
pub mod rigidbody;
pub mod shearflow;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use channel_fluid::io::atomic_write;
use channel_fluid::FluidError;
use control_design::DesignError;
use rigid_rotor::RigidError;
use stability_analysis::StabilityError;
use thiserror::Error;

pub use config::{parse_ini, ConfigError, ControlMode, ExperimentConfig, System};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("stability precondition failed: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Verify(_) => 4,
        }
    }
}

impl From<RigidError> for CliError {
    fn from(e: RigidError) -> Self {
        match e {
            RigidError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DesignError> for CliError {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::NotPositive(_) | DesignError::Margin { .. } => CliError::Precondition(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<FluidError> for CliError {
    fn from(e: FluidError) -> Self {
        match e {
            FluidError::NonFinite(_) | FluidError::Eigen(_) => CliError::Numerical(e.to_string()),
            FluidError::NotPositive(_) => CliError::Precondition(e.to_string()),
            FluidError::Control(d) => d.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Fluid(f) => f.into(),
            StabilityError::Design(d) => d.into(),
            StabilityError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Ordered `key: value` lines; the text form of every command's summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub lines: Vec<(String, String)>,
}

impl Report {
    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.text(key, format!("{v:.6}"))
    }

    /// Scientific notation, for values spanning many decades.
    pub fn sci(&mut self, key: &str, v: f64) -> &mut Self {
        self.text(key, format!("{v:.6e}"))
    }

    pub fn text(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.lines.push((key.to_string(), v.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }

    /// Inverse of `render`.
    pub fn parse(text: &str) -> Report {
        let lines = text
            .lines()
            .filter_map(|l| l.split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Report { lines }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::Io { path: path.to_path_buf(), message: e.to_string() };
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io(&e))?;
    }
    atomic_write(path, bytes).map_err(|e| io(&e))
}

/// CSV with a header row; numbers in shortest round-trip form.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numerical(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))
}

/// Common command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub require_stable: bool,
    pub quick: bool,
}

impl Overrides {
    pub fn load(&self, system: System) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::defaults(system),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trips() {
        let mut r = Report::default();
        r.num("nd_condition_lhs", 0.936666666666667).text("pass", true).sci("tiny", 1.5e-12);
        let text = r.render();
        assert!(text.contains("nd_condition_lhs: 0.936667\n"));
        assert_eq!(Report::parse(&text), r);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(RigidError::GainIsOne).exit_code(), 1);
        assert_eq!(CliError::from(RigidError::NonFinite { step: 3, t: 0.1 }).exit_code(), 2);
        assert_eq!(CliError::from(DesignError::NotPositive(1.2)).exit_code(), 3);
        assert_eq!(CliError::from(DesignError::Width(1.0)).exit_code(), 1);
        assert_eq!(CliError::from(FluidError::NonFinite(2.0)).exit_code(), 2);
    }
}
