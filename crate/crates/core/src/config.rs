//! Turbine definitions: geometry, blade aerodynamic schedules, rated
//! operating point and actuation limits.
//!
//! A turbine is described by one TOML file. Polars are either referenced
//! as CSV files (columns `alpha_deg,cl,cd`, paths relative to the TOML
//! file) or embedded inline:
//!
//! ```toml
//! schema_version = 1
//! name = "nrel5mw"
//! hub_height = 90.0
//! rotor_radius = 63.0
//! num_blades = 3
//! rated_wind_speed = 11.4
//! rated_rotor_speed_rpm = 12.1
//! rated_pitch = 0.0
//!
//! [polars]
//! t18 = "../polars/t18.csv"
//! flat = { alpha_deg = [-180.0, 180.0], cl = [0.0, 0.0], cd = [0.5, 0.5] }
//!
//! [[stations]]
//! span_fraction = 0.5
//! chord = 3.0
//! twist = 4.0
//! polar = "t18"
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version of the turbine and scenario file schema understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Version of the bundled turbine data pack.
pub const DATA_PACK_VERSION: &str = "2026.1";

/// Environment variable overriding the bundled data directory.
pub const DATA_ENV: &str = "AQUAPITCH_DATA";

/// Names of the bundled reference turbines.
pub const REFERENCE_TURBINES: [&str; 3] = ["nrel5mw", "dtu10mw", "iea22mw"];

/// Sound speed and density of one fluid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumProperties {
    /// m/s
    pub sound_speed: f64,
    /// kg/m³
    pub density: f64,
    /// m²/s, only consulted for air (boundary-layer Reynolds numbers).
    #[serde(default = "default_viscosity")]
    pub kinematic_viscosity: f64,
}

fn default_viscosity() -> f64 {
    1.46e-5
}

impl MediumProperties {
    pub fn air() -> Self {
        MediumProperties {
            sound_speed: 343.0,
            density: 1.225,
            kinematic_viscosity: 1.46e-5,
        }
    }

    pub fn water() -> Self {
        MediumProperties {
            sound_speed: 1500.0,
            density: 1025.0,
            kinematic_viscosity: 1.0e-6,
        }
    }

    fn validate(&self, which: &str) -> Result<()> {
        if !(self.sound_speed > 0.0 && self.sound_speed.is_finite()) {
            return Err(Error::validation(
                format!("{which}.sound_speed"),
                "must be positive",
            ));
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            return Err(Error::validation(format!("{which}.density"), "must be positive"));
        }
        if !(self.kinematic_viscosity > 0.0) {
            return Err(Error::validation(
                format!("{which}.kinematic_viscosity"),
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Air-to-water sound-speed ratio `n = c_w / c_a`.
pub fn refraction_index(air: &MediumProperties, water: &MediumProperties) -> f64 {
    water.sound_speed / air.sound_speed
}

/// Lift and drag coefficients sampled over angle of attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub alpha_deg: Vec<f64>,
    pub cl: Vec<f64>,
    pub cd: Vec<f64>,
}

/// Result of a polar lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample {
    pub cl: f64,
    pub cd: f64,
    /// The requested angle was outside the table and was clamped.
    pub clamped: bool,
}

impl Polar {
    fn validate(&self, id: &str) -> Result<()> {
        let field = format!("polars.{id}");
        let n = self.alpha_deg.len();
        if n < 2 || self.cl.len() != n || self.cd.len() != n {
            return Err(Error::validation(
                field,
                "needs at least two rows and equal-length alpha/cl/cd columns",
            ));
        }
        if self.alpha_deg.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::validation(field, "alpha_deg must be strictly increasing"));
        }
        if self
            .alpha_deg
            .iter()
            .chain(&self.cl)
            .chain(&self.cd)
            .any(|v| !v.is_finite())
        {
            return Err(Error::validation(field, "contains non-finite values"));
        }
        Ok(())
    }

    /// Linear interpolation in alpha; out-of-range angles clamp to the end rows.
    pub fn lookup(&self, alpha_deg: f64) -> PolarSample {
        let a = &self.alpha_deg;
        let last = a.len() - 1;
        if alpha_deg <= a[0] || alpha_deg >= a[last] {
            let i = if alpha_deg <= a[0] { 0 } else { last };
            let clamped = alpha_deg < a[0] || alpha_deg > a[last];
            return PolarSample {
                cl: self.cl[i],
                cd: self.cd[i],
                clamped,
            };
        }
        let hi = a.partition_point(|&x| x <= alpha_deg).min(last);
        let lo = hi - 1;
        let w = (alpha_deg - a[lo]) / (a[hi] - a[lo]);
        PolarSample {
            cl: self.cl[lo] + w * (self.cl[hi] - self.cl[lo]),
            cd: self.cd[lo] + w * (self.cd[hi] - self.cd[lo]),
            clamped: false,
        }
    }

    /// Reads a CSV table with columns `alpha_deg,cl,cd`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            alpha_deg: f64,
            cl: f64,
            cd: f64,
        }
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut polar = Polar {
            alpha_deg: Vec::new(),
            cl: Vec::new(),
            cd: Vec::new(),
        };
        for row in reader.deserialize() {
            let row: Row = row.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            polar.alpha_deg.push(row.alpha_deg);
            polar.cl.push(row.cl);
            polar.cd.push(row.cd);
        }
        Ok(polar)
    }
}

/// One spanwise station of the blade aerodynamic schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BladeStation {
    /// r / R, in (0, 1]
    pub span_fraction: f64,
    /// m
    pub chord: f64,
    /// deg, positive towards feather
    pub twist: f64,
    #[serde(rename = "polar")]
    pub polar_id: String,
}

/// Boundary-layer state assumed by the trailing-edge noise correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryLayer {
    #[default]
    Untripped,
    Tripped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PolarSource {
    File(PathBuf),
    Inline(Polar),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TurbineFile {
    schema_version: u32,
    name: String,
    hub_height: f64,
    rotor_radius: f64,
    #[serde(default)]
    hub_radius: Option<f64>,
    num_blades: usize,
    rated_wind_speed: f64,
    rated_rotor_speed_rpm: f64,
    #[serde(default)]
    rated_tip_speed: Option<f64>,
    rated_pitch: f64,
    #[serde(default = "default_pitch_rate")]
    max_pitch_rate: f64,
    #[serde(default)]
    boundary_layer: BoundaryLayer,
    #[serde(default = "MediumProperties::air")]
    air: MediumProperties,
    #[serde(default = "MediumProperties::water")]
    water: MediumProperties,
    polars: BTreeMap<String, PolarSource>,
    stations: Vec<BladeStation>,
}

fn default_pitch_rate() -> f64 {
    10.0
}

/// A validated reference turbine.
#[derive(Debug, Clone, PartialEq)]
pub struct TurbineConfig {
    pub name: String,
    /// m
    pub hub_height: f64,
    /// m
    pub rotor_radius: f64,
    /// m
    pub hub_radius: f64,
    pub num_blades: usize,
    /// m/s
    pub rated_wind_speed: f64,
    /// rpm, as tabulated by the turbine definitions
    pub rated_rotor_speed_rpm: f64,
    /// m/s, tabulated value (may differ slightly from Ω·R)
    pub rated_tip_speed: Option<f64>,
    /// deg
    pub rated_pitch: f64,
    /// deg/s
    pub max_pitch_rate: f64,
    pub boundary_layer: BoundaryLayer,
    pub blade_stations: Vec<BladeStation>,
    pub polars: BTreeMap<String, Polar>,
    pub air: MediumProperties,
    pub water: MediumProperties,
}

impl TurbineConfig {
    /// Rated rotor speed Ω in rad/s.
    pub fn rated_omega(&self) -> f64 {
        self.rated_rotor_speed_rpm * PI / 30.0
    }

    /// Ω·R at the rated rotor speed, m/s.
    pub fn tip_speed(&self) -> f64 {
        self.rated_omega() * self.rotor_radius
    }

    pub fn rotor_diameter(&self) -> f64 {
        2.0 * self.rotor_radius
    }

    /// Air-to-water sound-speed ratio for this turbine's media.
    pub fn refraction_index(&self) -> f64 {
        refraction_index(&self.air, &self.water)
    }

    pub fn polar(&self, id: &str) -> &Polar {
        // validated at construction
        &self.polars[id]
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, field: &str| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be positive, got {v}")))
            }
        };
        if self.name.trim().is_empty() {
            return Err(Error::validation("name", "must not be empty"));
        }
        pos(self.hub_height, "hub_height")?;
        pos(self.rotor_radius, "rotor_radius")?;
        if self.hub_height <= self.rotor_radius {
            return Err(Error::validation(
                "hub_height",
                format!(
                    "{} m does not clear rotor_radius {} m; the rotor would strike the water surface",
                    self.hub_height, self.rotor_radius
                ),
            ));
        }
        if !(self.hub_radius >= 0.0 && self.hub_radius < self.rotor_radius) {
            return Err(Error::validation("hub_radius", "must lie in [0, rotor_radius)"));
        }
        if self.num_blades < 1 {
            return Err(Error::validation("num_blades", "must be at least 1"));
        }
        pos(self.rated_wind_speed, "rated_wind_speed")?;
        pos(self.rated_rotor_speed_rpm, "rated_rotor_speed_rpm")?;
        pos(self.max_pitch_rate, "max_pitch_rate")?;
        if let Some(v) = self.rated_tip_speed {
            pos(v, "rated_tip_speed")?;
        }
        if !self.rated_pitch.is_finite() {
            return Err(Error::validation("rated_pitch", "must be finite"));
        }
        self.air.validate("air")?;
        self.water.validate("water")?;
        if self.blade_stations.is_empty() {
            return Err(Error::validation("stations", "at least one station is required"));
        }
        for (i, st) in self.blade_stations.iter().enumerate() {
            let field = format!("stations[{i}]");
            if !(st.span_fraction > 0.0 && st.span_fraction <= 1.0) {
                return Err(Error::validation(
                    format!("{field}.span_fraction"),
                    "must lie in (0, 1]",
                ));
            }
            if !(st.chord > 0.0 && st.chord.is_finite()) {
                return Err(Error::validation(format!("{field}.chord"), "must be positive"));
            }
            if !st.twist.is_finite() {
                return Err(Error::validation(format!("{field}.twist"), "must be finite"));
            }
            if !self.polars.contains_key(&st.polar_id) {
                return Err(Error::validation(
                    format!("{field}.polar"),
                    format!("unknown polar id '{}'", st.polar_id),
                ));
            }
        }
        if self
            .blade_stations
            .windows(2)
            .any(|w| !(w[1].span_fraction > w[0].span_fraction))
        {
            return Err(Error::validation(
                "stations",
                "span_fraction must be strictly increasing",
            ));
        }
        for (id, polar) in &self.polars {
            polar.validate(id)?;
        }
        Ok(())
    }

    /// Serializes to the documented schema with all polars embedded inline.
    pub fn to_toml_string(&self) -> String {
        let file = TurbineFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            hub_height: self.hub_height,
            rotor_radius: self.rotor_radius,
            hub_radius: Some(self.hub_radius),
            num_blades: self.num_blades,
            rated_wind_speed: self.rated_wind_speed,
            rated_rotor_speed_rpm: self.rated_rotor_speed_rpm,
            rated_tip_speed: self.rated_tip_speed,
            rated_pitch: self.rated_pitch,
            max_pitch_rate: self.max_pitch_rate,
            boundary_layer: self.boundary_layer,
            air: self.air,
            water: self.water,
            polars: self
                .polars
                .iter()
                .map(|(k, v)| (k.clone(), PolarSource::Inline(v.clone())))
                .collect(),
            stations: self.blade_stations.clone(),
        };
        toml::to_string(&file).expect("turbine config is always representable as TOML")
    }

    /// Parses a turbine definition; relative polar paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path, origin: &Path) -> Result<Self> {
        let file: TurbineFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!(
                    "unsupported version {} (expected {SCHEMA_VERSION})",
                    file.schema_version
                ),
            ));
        }
        let mut polars = BTreeMap::new();
        for (id, src) in file.polars {
            let polar = match src {
                PolarSource::Inline(p) => p,
                PolarSource::File(rel) => Polar::from_csv(&base_dir.join(&rel)).map_err(|e| {
                    match e {
                        Error::Parse { path, message } => Error::Parse {
                            path,
                            message: format!("polar '{id}': {message}"),
                        },
                        other => other,
                    }
                })?,
            };
            polars.insert(id, polar);
        }
        let config = TurbineConfig {
            name: file.name,
            hub_height: file.hub_height,
            rotor_radius: file.rotor_radius,
            hub_radius: file.hub_radius.unwrap_or(0.0),
            num_blades: file.num_blades,
            rated_wind_speed: file.rated_wind_speed,
            rated_rotor_speed_rpm: file.rated_rotor_speed_rpm,
            rated_tip_speed: file.rated_tip_speed,
            rated_pitch: file.rated_pitch,
            max_pitch_rate: file.max_pitch_rate,
            boundary_layer: file.boundary_layer,
            blade_stations: file.stations,
            polars,
            air: file.air,
            water: file.water,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Loads and validates a turbine definition file.
pub fn load_turbine(path: impl AsRef<Path>) -> Result<TurbineConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    TurbineConfig::from_toml_str(&text, base, path)
}

/// Directory holding the bundled turbine and filter data.
pub fn data_dir() -> PathBuf {
    match std::env::var_os(DATA_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data"),
    }
}

/// Resolves a turbine reference: an existing file path, or the name of a
/// bundled turbine (`nrel5mw`, `dtu10mw`, `iea22mw`).
pub fn resolve_turbine(reference: &str) -> Result<TurbineConfig> {
    let as_path = Path::new(reference);
    if as_path.is_file() {
        return load_turbine(as_path);
    }
    let bundled = data_dir().join("turbines").join(format!("{reference}.toml"));
    if bundled.is_file() {
        return load_turbine(bundled);
    }
    Err(Error::InvalidArgument(format!(
        "turbine '{reference}' is neither a file nor a bundled turbine in {}",
        data_dir().join("turbines").display()
    )))
}
