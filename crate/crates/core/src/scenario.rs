//! Scenario files: which turbine, operating point, pitch strategy and
//! sampling to simulate.
//!
//! ```toml
//! schema_version = 1
//! turbine = "dtu10mw"        # bundled name, or a path relative to this file
//! label = "IPC2"             # optional report identifier
//! wind_speed = 11.4          # m/s, default: rated
//! rotor_speed = 1.00531      # rad/s, default: rated
//! revolutions = 3            # the first one is discarded as warm-up
//! samples_per_rev = 72
//! n_c = 20
//!
//! [strategy]
//! scheme = "IPC2"
//! ```
//!
//! `[strategy]` holds exactly one of
//!
//! - `constant_pitch = <deg>`: absolute collective pitch,
//! - `pitch_increment = <deg>`: collective pitch relative to rated,
//! - `scheme = "IPC1" | "IPC2"`: a named individual-pitch scheme,
//! - `[strategy.ipc]` with `delta_theta` (deg), `delta_psi` (deg), `psi_c`
//!   (deg) and `k = "max"` or a value in 1/rad.
//!
//! A suite file lists several scenarios as `[[scenarios]]` tables with the
//! same keys.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::config::{load_turbine, resolve_turbine, TurbineConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::pitch::{NamedScheme, PitchLaw, PitchLimits, PitchStrategy};
use crate::sim::{SimulationConfig, DEFAULT_REVOLUTIONS, DEFAULT_SAMPLES_PER_REV};
use crate::snell::DEFAULT_RING_OBSERVERS;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Steepness {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IpcSpec {
    /// deg
    pub delta_theta: f64,
    /// deg
    pub delta_psi: f64,
    /// deg
    pub psi_c: f64,
    pub k: Steepness,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    ConstantPitch(f64),
    PitchIncrement(f64),
    Scheme(String),
    Ipc(IpcSpec),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub schema_version: Option<u32>,
    pub turbine: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub wind_speed: Option<f64>,
    /// rad/s
    #[serde(default)]
    pub rotor_speed: Option<f64>,
    #[serde(default = "default_revolutions")]
    pub revolutions: usize,
    #[serde(default = "default_samples")]
    pub samples_per_rev: usize,
    #[serde(default = "default_ring")]
    pub n_c: usize,
    pub strategy: StrategySpec,
    /// Directory the turbine path is resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_revolutions() -> usize {
    DEFAULT_REVOLUTIONS
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_REV
}
fn default_ring() -> usize {
    DEFAULT_RING_OBSERVERS
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    schema_version: u32,
    scenarios: Vec<Scenario>,
}

fn fmt_increment(dtheta: f64) -> String {
    let rounded = (dtheta * 1e6).round() / 1e6;
    if rounded >= 0.0 {
        format!("fixed+{rounded}")
    } else {
        format!("fixed{rounded}")
    }
}

impl Scenario {
    fn turbine_config(&self) -> Result<TurbineConfig> {
        let candidate = self.base_dir.join(&self.turbine);
        if candidate.is_file() {
            load_turbine(candidate)
        } else {
            resolve_turbine(&self.turbine)
        }
    }

    /// Resolves the turbine and strategy into a runnable configuration.
    pub fn to_config(&self) -> Result<SimulationConfig> {
        if let Some(v) = self.schema_version {
            if v != SCHEMA_VERSION {
                return Err(Error::validation(
                    "schema_version",
                    format!("unsupported version {v} (expected {SCHEMA_VERSION})"),
                ));
            }
        }
        let turbine = self.turbine_config()?;
        let omega = self.rotor_speed.unwrap_or_else(|| turbine.rated_omega());
        let mut limits = PitchLimits::for_turbine(&turbine);
        limits.omega = omega;
        let rated = turbine.rated_pitch;

        let (strategy, default_label) = match &self.strategy {
            StrategySpec::ConstantPitch(theta) => {
                let label = if *theta == rated {
                    "nominal".to_string()
                } else {
                    fmt_increment(theta - rated)
                };
                (PitchStrategy::Constant(*theta), label)
            }
            StrategySpec::PitchIncrement(d) => {
                let label = if *d == 0.0 { "nominal".to_string() } else { fmt_increment(*d) };
                (PitchStrategy::Constant(rated + d), label)
            }
            StrategySpec::Scheme(name) => {
                let scheme = match name.to_ascii_uppercase().as_str() {
                    "IPC1" => NamedScheme::Ipc1,
                    "IPC2" => NamedScheme::Ipc2,
                    other => {
                        return Err(Error::validation(
                            "strategy.scheme",
                            format!("unknown scheme '{other}', expected IPC1 or IPC2"),
                        ))
                    }
                };
                let law = PitchLaw::new_feasible(
                    rated,
                    rated + scheme.delta_theta(),
                    crate::pitch::SCHEME_PSI_C_DEG.to_radians(),
                    scheme.delta_psi_deg().to_radians(),
                    limits.k_max(scheme.delta_theta())?,
                    &limits,
                )?;
                (PitchStrategy::Ipc(law), scheme.label().to_string())
            }
            StrategySpec::Ipc(spec) => {
                let k = match &spec.k {
                    Steepness::Value(k) => *k,
                    Steepness::Keyword(s) if s == "max" => limits.k_max(spec.delta_theta.abs())?,
                    Steepness::Keyword(s) => {
                        return Err(Error::validation(
                            "strategy.ipc.k",
                            format!("expected \"max\" or a number, got '{s}'"),
                        ))
                    }
                };
                let law = PitchLaw::new_feasible(
                    rated,
                    rated + spec.delta_theta,
                    spec.psi_c.to_radians(),
                    spec.delta_psi.to_radians(),
                    k,
                    &limits,
                )?;
                (PitchStrategy::Ipc(law), "ipc".to_string())
            }
        };

        let config = SimulationConfig {
            wind_speed: self.wind_speed.unwrap_or(turbine.rated_wind_speed),
            omega,
            turbine,
            label: self.label.clone().unwrap_or(default_label),
            strategy,
            revolutions: self.revolutions,
            samples_per_rev: self.samples_per_rev,
            ring_observers: self.n_c,
            record_ring_spectra: false,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_error(path: &Path, e: toml::de::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    }
}

/// Parses a scenario or suite document; `base_dir` anchors relative turbine paths.
pub fn parse_scenarios(text: &str, base_dir: &Path, origin: &Path) -> Result<Vec<Scenario>> {
    let value: toml::Table = toml::from_str(text).map_err(|e| parse_error(origin, e))?;
    let mut scenarios = if value.contains_key("scenarios") {
        let suite: SuiteFile = toml::from_str(text).map_err(|e| parse_error(origin, e))?;
        if suite.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", suite.schema_version),
            ));
        }
        suite.scenarios
    } else {
        let single: Scenario = toml::from_str(text).map_err(|e| parse_error(origin, e))?;
        if single.schema_version.is_none() {
            return Err(Error::validation("schema_version", "missing"));
        }
        vec![single]
    };
    if scenarios.is_empty() {
        return Err(Error::validation("scenarios", "file lists no scenarios"));
    }
    for s in &mut scenarios {
        s.base_dir = base_dir.to_path_buf();
    }
    Ok(scenarios)
}

pub fn load_scenarios(path: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenarios(&text, path.parent().unwrap_or_else(|| Path::new(".")), path)
}
