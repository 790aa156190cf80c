//! Flat `section.key = value` experiment files.
//!
//! ```text
//! # comments start with '#'
//! system.kind = shear-flow
//! geometry.X = 2
//! control.mode = designed
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::CliError;

/// Every key a config file may set.
pub const KEYS: &[&str] = &[
    "system.kind",
    "geometry.X",
    "geometry.Y",
    "geometry.nx",
    "geometry.ny",
    "control.mode",
    "control.gamma",
    "control.a0",
    "control.k",
    "control.p_k",
    "rigid.I",
    "rigid.i",
    "rigid.pi0",
    "rigid.q0",
    "rigid.perturbation",
    "integration.dt",
    "integration.cfl",
    "integration.t_end",
    "integration.stride",
    "integration.snapshot_stride",
    "integration.scheme",
    "perturbation.amplitude",
    "run.seed",
    "output.dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line, or 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Raw key/value pairs with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    entries: BTreeMap<String, (String, usize)>,
}

pub fn parse_ini(text: &str) -> Result<Ini, ConfigError> {
    let mut ini = Ini::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| ConfigError { line, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `section.key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !key.contains('.') {
            return Err(err(format!("key `{key}` has no section")));
        }
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(err(format!("`{key}` has no value")));
        }
        if let Some((_, first)) = ini.entries.get(key) {
            return Err(err(format!("`{key}` already set on line {first}")));
        }
        ini.entries.insert(key.to_string(), (value.to_string(), line));
    }
    Ok(ini)
}

impl Ini {
    pub fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.1)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.0.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError { line: *line, message: format!("`{key}`: expected {what}, got `{v}`") }),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parsed(key, "a number")?;
        match v {
            Some(x) if !x.is_finite() => {
                Err(ConfigError { line: self.line(key), message: format!("`{key}` must be finite") })
            }
            v => Ok(v),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parsed(key, "a non-negative integer")
    }

    pub fn triple(&self, key: &str) -> Result<Option<[f64; 3]>, ConfigError> {
        let Some(v) = self.get_str(key) else { return Ok(None) };
        let err = || ConfigError { line: self.line(key), message: format!("`{key}`: expected three numbers, got `{v}`") };
        let xs: Vec<f64> = v.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| err())?;
        <[f64; 3]>::try_from(xs).map(Some).map_err(|_| err())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    RigidBody,
    ShearFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlMode {
    Off,
    Designed,
    /// Constant a₀ given by `control.a0`.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    /// Lawson when the control is on, RK4 otherwise.
    Auto,
    Lawson,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// Chosen from the initial Courant number.
    Cfl(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub system: System,
    pub x: f64,
    pub y: f64,
    pub nx: usize,
    pub ny: usize,
    pub mode: ControlMode,
    pub gamma: f64,
    pub a0: f64,
    pub k: Option<f64>,
    pub p_k: f64,
    pub big_i: [f64; 3],
    pub small_i: [f64; 3],
    pub pi0: [f64; 3],
    pub q0: f64,
    pub rigid_perturbation: f64,
    pub dt: TimeStep,
    pub t_end: f64,
    pub stride: usize,
    pub snapshot_stride: usize,
    pub scheme: SchemeChoice,
    pub amplitude: f64,
    pub seed: u64,
    pub out: PathBuf,
    /// Lines of the keys that validation may complain about.
    lines: BTreeMap<&'static str, usize>,
}

impl ExperimentConfig {
    pub fn defaults(system: System) -> Self {
        let rigid = system == System::RigidBody;
        ExperimentConfig {
            system,
            x: 2.0,
            y: 0.9,
            nx: 128,
            ny: 64,
            mode: ControlMode::Off,
            gamma: 1.0,
            a0: 0.0,
            k: None,
            p_k: 0.0,
            big_i: [3.0, 2.0, 1.0],
            small_i: [0.1, 0.1, 0.05],
            pi0: [0.0, 1.0, 0.0],
            q0: 0.0,
            rigid_perturbation: 1e-3,
            dt: TimeStep::Fixed(0.01),
            t_end: if rigid { 100.0 } else { 50.0 },
            stride: 10,
            snapshot_stride: 0,
            scheme: SchemeChoice::Auto,
            amplitude: 1e-4,
            seed: 7,
            out: PathBuf::from("out"),
            lines: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(Self::from_ini(&parse_ini(&text)?)?)
    }

    pub fn from_ini(ini: &Ini) -> Result<Self, ConfigError> {
        let system = match ini.get_str("system.kind") {
            None | Some("shear-flow") => System::ShearFlow,
            Some("rigid-body") => System::RigidBody,
            Some(other) => {
                return Err(ConfigError {
                    line: ini.line("system.kind"),
                    message: format!("system.kind must be rigid-body or shear-flow, got `{other}`"),
                })
            }
        };
        let mut c = Self::defaults(system);
        for key in KEYS {
            c.lines.insert(key, ini.line(key));
        }
        c.x = ini.f64("geometry.X")?.unwrap_or(c.x);
        c.y = ini.f64("geometry.Y")?.unwrap_or(c.y);
        c.nx = ini.usize("geometry.nx")?.unwrap_or(c.nx);
        c.ny = ini.usize("geometry.ny")?.unwrap_or(c.ny);
        c.mode = match ini.get_str("control.mode") {
            None => c.mode,
            Some("off") => ControlMode::Off,
            Some("designed") => ControlMode::Designed,
            Some("explicit") => ControlMode::Explicit,
            Some(other) => {
                return Err(ConfigError {
                    line: ini.line("control.mode"),
                    message: format!("control.mode must be off, designed or explicit, got `{other}`"),
                })
            }
        };
        c.gamma = ini.f64("control.gamma")?.unwrap_or(c.gamma);
        c.a0 = ini.f64("control.a0")?.unwrap_or(c.a0);
        c.k = ini.f64("control.k")?.or(c.k);
        c.p_k = ini.f64("control.p_k")?.unwrap_or(c.p_k);
        c.big_i = ini.triple("rigid.I")?.unwrap_or(c.big_i);
        c.small_i = ini.triple("rigid.i")?.unwrap_or(c.small_i);
        c.pi0 = ini.triple("rigid.pi0")?.unwrap_or(c.pi0);
        c.q0 = ini.f64("rigid.q0")?.unwrap_or(c.q0);
        c.rigid_perturbation = ini.f64("rigid.perturbation")?.unwrap_or(c.rigid_perturbation);
        if ini.get_str("integration.dt") == Some("auto") {
            c.dt = TimeStep::Cfl(ini.f64("integration.cfl")?.unwrap_or(0.25));
        } else if let Some(dt) = ini.f64("integration.dt")? {
            c.dt = TimeStep::Fixed(dt);
        }
        c.t_end = ini.f64("integration.t_end")?.unwrap_or(c.t_end);
        c.stride = ini.usize("integration.stride")?.unwrap_or(c.stride);
        c.snapshot_stride = ini.usize("integration.snapshot_stride")?.unwrap_or(c.snapshot_stride);
        c.scheme = match ini.get_str("integration.scheme") {
            None | Some("auto") => SchemeChoice::Auto,
            Some("lawson") => SchemeChoice::Lawson,
            Some("rk4") => SchemeChoice::Rk4,
            Some(other) => {
                return Err(ConfigError {
                    line: ini.line("integration.scheme"),
                    message: format!("integration.scheme must be auto, lawson or rk4, got `{other}`"),
                })
            }
        };
        c.amplitude = ini.f64("perturbation.amplitude")?.unwrap_or(c.amplitude);
        c.seed = ini.u64("run.seed")?.unwrap_or(c.seed);
        if let Some(dir) = ini.get_str("output.dir") {
            c.out = PathBuf::from(dir);
        }
        c.validate()?;
        Ok(c)
    }

    /// Line of `key` in the source file, 0 for defaults.
    pub fn line_of(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(0)
    }

    pub fn error(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line_of(key), message: message.into() }
    }

    /// Checks that do not need the numerical modules.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.dt {
            TimeStep::Fixed(dt) if !(dt > 0.0) => return Err(self.error("integration.dt", "integration.dt must be positive")),
            TimeStep::Cfl(c) if !(c > 0.0) => return Err(self.error("integration.cfl", "integration.cfl must be positive")),
            _ => {}
        }
        if !(self.t_end > 0.0) {
            return Err(self.error("integration.t_end", "integration.t_end must be positive"));
        }
        if self.stride == 0 {
            return Err(self.error("integration.stride", "integration.stride must be at least 1"));
        }
        if self.k == Some(1.0) {
            return Err(self.error("control.k", "k must differ from 1"));
        }
        if !(self.x > 0.0) {
            return Err(self.error("geometry.X", "geometry.X must be positive"));
        }
        if !(self.y > 0.0) {
            return Err(self.error("geometry.Y", "geometry.Y must be positive"));
        }
        Ok(())
    }
}
