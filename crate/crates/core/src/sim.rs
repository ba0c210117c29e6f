//! Time stepping of the full pipeline at constant rotor speed.
//!
//! For every sample the rotor state sets each blade's pitch, a BEM solve
//! gives section flows, each blade's Snell cone is built from its source
//! position and the blade is heard at its own ring observers only. Blade
//! azimuths are derived from the sample index so that every revolution
//! repeats bit for bit.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::bem::{solve_bem, RotorPerformance};
use crate::config::TurbineConfig;
use crate::error::{Error, Result};
use crate::kinematics::rotor_state_at_azimuth;
use crate::noise::{rotor_sources, BladeNoiseSource, ObserverPoint};
use crate::pitch::PitchStrategy;
use crate::snell::{build_cones, cone_averaged_spectrum, SnellConeSet};
use crate::spectrum::{msp_to_db, ThirdOctaveSpectrum, P_REF};

pub const DEFAULT_REVOLUTIONS: usize = 3;
pub const DEFAULT_SAMPLES_PER_REV: usize = 72;
pub const MIN_SAMPLES_PER_REV: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub turbine: TurbineConfig,
    /// Strategy identifier carried into reports.
    pub label: String,
    /// m/s
    pub wind_speed: f64,
    /// rad/s
    pub omega: f64,
    pub strategy: PitchStrategy,
    /// Total revolutions including the warm-up revolution.
    pub revolutions: usize,
    pub samples_per_rev: usize,
    pub ring_observers: usize,
    /// Keep every ring observer's per-blade spectrum (large).
    pub record_ring_spectra: bool,
}

impl SimulationConfig {
    /// Rated operating point with the given strategy and default sampling.
    pub fn rated(turbine: TurbineConfig, label: impl Into<String>, strategy: PitchStrategy) -> Self {
        SimulationConfig {
            wind_speed: turbine.rated_wind_speed,
            omega: turbine.rated_omega(),
            turbine,
            label: label.into(),
            strategy,
            revolutions: DEFAULT_REVOLUTIONS,
            samples_per_rev: DEFAULT_SAMPLES_PER_REV,
            ring_observers: crate::snell::DEFAULT_RING_OBSERVERS,
            record_ring_spectra: false,
        }
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn validate(&self) -> Result<()> {
        if self.revolutions < 2 {
            return Err(Error::validation("revolutions", format!("must be at least 2, got {}", self.revolutions)));
        }
        if self.samples_per_rev < MIN_SAMPLES_PER_REV {
            return Err(Error::validation(
                "samples_per_rev",
                format!("must be at least {MIN_SAMPLES_PER_REV}, got {}", self.samples_per_rev),
            ));
        }
        if !self.samples_per_rev.is_multiple_of(self.turbine.num_blades) {
            return Err(Error::validation(
                "samples_per_rev",
                format!("must be a multiple of the blade count {}", self.turbine.num_blades),
            ));
        }
        if self.ring_observers == 0 {
            return Err(Error::validation("n_c", "must be at least 1"));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::validation("rotor_speed", format!("must be positive, got {}", self.omega)));
        }
        if !(self.wind_speed > 0.0 && self.wind_speed.is_finite()) {
            return Err(Error::validation("wind_speed", format!("must be positive, got {}", self.wind_speed)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// s
    pub time: f64,
    /// Azimuth of blade 1, rad.
    pub psi_blade1: f64,
    /// deg, per blade
    pub pitches: Vec<f64>,
    /// W
    pub power: f64,
    pub cones: SnellConeSet,
    /// Area-weighted cone average of the whole rotor, per band.
    pub spectrum: ThirdOctaveSpectrum,
    /// Ring average of each blade on its own, band-integrated, Pa².
    pub single_blade_msp: Vec<f64>,
    /// `[blade][ring observer]`, only when recording was requested.
    pub ring_spectra: Option<Vec<Vec<ThirdOctaveSpectrum>>>,
    /// Some segment's angle of attack was clamped for the noise model.
    pub alpha_clamped: bool,
}

impl Sample {
    pub fn cone_msp(&self) -> f64 {
        self.spectrum.total_msp()
    }

    /// ŌSPL of the rotor, dB.
    pub fn ospl_bar(&self) -> f64 {
        self.spectrum.ospl()
    }

    /// ŌSPL of each blade alone, dB.
    pub fn single_blade_ospl(&self) -> Vec<f64> {
        self.single_blade_msp.iter().map(|&m| msp_to_db(m, P_REF)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub turbine: String,
    pub label: String,
    pub wind_speed: f64,
    pub omega: f64,
    pub num_blades: usize,
    pub revolutions: usize,
    pub samples_per_rev: usize,
    pub samples: Vec<Sample>,
}

impl SimulationResult {
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// Samples after the warm-up revolution.
    pub fn steady(&self) -> &[Sample] {
        &self.samples[self.samples_per_rev.min(self.samples.len())..]
    }

    pub fn mean_power(&self) -> f64 {
        let s = self.steady();
        s.iter().map(|x| x.power).sum::<f64>() / s.len() as f64
    }
}

/// Memoises BEM solves by exact per-blade pitch.
struct BemCache<'a> {
    turbine: &'a TurbineConfig,
    wind: f64,
    omega: f64,
    solved: HashMap<Vec<u64>, RotorPerformance>,
}

impl<'a> BemCache<'a> {
    fn new(turbine: &'a TurbineConfig, wind: f64, omega: f64) -> Self {
        BemCache {
            turbine,
            wind,
            omega,
            solved: HashMap::new(),
        }
    }

    fn get(&mut self, pitches: &[f64]) -> Result<&RotorPerformance> {
        let key: Vec<u64> = pitches.iter().map(|p| p.to_bits()).collect();
        if !self.solved.contains_key(&key) {
            let perf = solve_bem(self.turbine, self.wind, self.omega, pitches)?;
            self.solved.insert(key.clone(), perf);
        }
        Ok(&self.solved[&key])
    }
}

fn sample_azimuth(index: usize, samples_per_rev: usize) -> f64 {
    TAU * (index % samples_per_rev) as f64 / samples_per_rev as f64
}

pub fn simulate(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let turbine = &config.turbine;
    let n = turbine.refraction_index();
    let dt = config.period() / config.samples_per_rev as f64;
    let mut bem = BemCache::new(turbine, config.wind_speed, config.omega);
    let total = config.revolutions * config.samples_per_rev;
    let mut samples = Vec::with_capacity(total);

    for i in 0..total {
        let psi0 = sample_azimuth(i, config.samples_per_rev);
        let states = rotor_state_at_azimuth(turbine, psi0, &config.strategy);
        let pitches: Vec<f64> = states.iter().map(|s| s.pitch).collect();
        let perf = bem.get(&pitches)?;
        let sources = rotor_sources(turbine, &states, &perf.section_states)?;
        let cones = build_cones(&states, n, config.ring_observers)?;

        let ring_spectra = own_ring_spectra(&sources, &cones)?;
        let spectrum = cone_averaged_spectrum(&cones, &ring_spectra)?;
        let single_blade_msp = ring_spectra
            .iter()
            .map(|ring| ring.iter().map(|s| s.total_msp()).sum::<f64>() / ring.len() as f64)
            .collect();

        samples.push(Sample {
            time: i as f64 * dt,
            psi_blade1: psi0,
            pitches,
            power: perf.power,
            cones,
            spectrum,
            single_blade_msp,
            ring_spectra: config.record_ring_spectra.then_some(ring_spectra),
            alpha_clamped: sources.iter().any(BladeNoiseSource::alpha_clamped),
        });
    }

    Ok(SimulationResult {
        turbine: turbine.name.clone(),
        label: config.label.clone(),
        wind_speed: config.wind_speed,
        omega: config.omega,
        num_blades: turbine.num_blades,
        revolutions: config.revolutions,
        samples_per_rev: config.samples_per_rev,
        samples,
    })
}

/// Each blade's spectra at its own cone's ring observers.
fn own_ring_spectra(
    sources: &[BladeNoiseSource],
    cones: &SnellConeSet,
) -> Result<Vec<Vec<ThirdOctaveSpectrum>>> {
    sources
        .iter()
        .zip(&cones.cones)
        .map(|(src, cone)| cone.ring_observers.iter().map(|o| src.spectrum_at(o)).collect())
        .collect()
}

/// One sample of a fixed-observer trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverSample {
    pub time: f64,
    pub psi_blade1: f64,
    /// Total rotor OSPL at the observer, dB.
    pub ospl: f64,
    pub power: f64,
}

/// OSPL at a single observer over `revolutions` revolutions with collective
/// pitch `pitch` (deg). No warm-up is needed: the rotor state is steady.
pub fn observer_trace(
    turbine: &TurbineConfig,
    wind_speed: f64,
    omega: f64,
    pitch: f64,
    observer: &ObserverPoint,
    revolutions: usize,
    samples_per_rev: usize,
) -> Result<Vec<ObserverSample>> {
    if samples_per_rev < MIN_SAMPLES_PER_REV {
        return Err(Error::validation(
            "samples_per_rev",
            format!("must be at least {MIN_SAMPLES_PER_REV}, got {samples_per_rev}"),
        ));
    }
    let strategy = PitchStrategy::Constant(pitch);
    let pitches = vec![pitch; turbine.num_blades];
    let perf = solve_bem(turbine, wind_speed, omega, &pitches)?;
    let dt = TAU / omega / samples_per_rev as f64;
    (0..revolutions.max(1) * samples_per_rev)
        .map(|i| {
            let psi0 = sample_azimuth(i, samples_per_rev);
            let states = rotor_state_at_azimuth(turbine, psi0, &strategy);
            let sources = rotor_sources(turbine, &states, &perf.section_states)?;
            let mut msp = 0.0;
            for s in &sources {
                msp += s.spectrum_at(observer)?.total_msp();
            }
            Ok(ObserverSample {
                time: i as f64 * dt,
                psi_blade1: psi0,
                ospl: msp_to_db(msp, P_REF),
                power: perf.power,
            })
        })
        .collect()
}
