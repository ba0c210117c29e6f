//! Evaluation metrics: power loss, revolution-averaged cone level,
//! amplitude-modulation depth and marine-mammal weighted levels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bem::power_loss;
use crate::config::{data_dir, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::sim::SimulationResult;
use crate::snell::{ospl_hat, spl_hat};
use crate::spectrum::{msp_to_db, ThirdOctaveSpectrum};

/// Strategy label of the baseline run of each turbine.
pub const NOMINAL_LABEL: &str = "nominal";

/// Band-pass auditory weighting of one functional hearing group:
/// W(f) = C + 10·log10[(f/f1)^(2a) / ((1+(f/f1)²)^a · (1+(f/f2)²)^b)].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HearingGroupFilter {
    pub group: String,
    /// Hz
    pub f1: f64,
    /// Hz
    pub f2: f64,
    pub a: f64,
    pub b: f64,
    /// dB
    pub c: f64,
}

impl HearingGroupFilter {
    /// W(f), dB.
    pub fn weight(&self, f: f64) -> f64 {
        let x1 = f / self.f1;
        let x2 = f / self.f2;
        self.c
            + 10.0
                * (x1.powf(2.0 * self.a) / ((1.0 + x1 * x1).powf(self.a) * (1.0 + x2 * x2).powf(self.b)))
                    .log10()
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str| format!("hearing group {}.{name}", self.group);
        if !(self.f1 > 0.0 && self.f1 < self.f2) {
            return Err(Error::validation(field("f1"), format!("need 0 < f1 < f2, got {} and {}", self.f1, self.f2)));
        }
        if !(self.a > 0.0) {
            return Err(Error::validation(field("a"), format!("must be positive, got {}", self.a)));
        }
        if !(self.b > 0.0) {
            return Err(Error::validation(field("b"), format!("must be positive, got {}", self.b)));
        }
        if !self.c.is_finite() {
            return Err(Error::validation(field("c"), "must be finite"));
        }
        Ok(())
    }

    /// Largest W on a log-spaced grid from 1 Hz to 1 MHz, dB.
    pub fn peak_weight(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let f = 10f64.powf(6.0 * i as f64 / (points - 1) as f64);
                self.weight(f)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Deserialize)]
struct HearingGroupFile {
    schema_version: u32,
    groups: Vec<HearingGroupFilter>,
}

pub fn load_hearing_groups(path: impl AsRef<Path>) -> Result<Vec<HearingGroupFilter>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: HearingGroupFile = toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::validation(
            "schema_version",
            format!("expected {SCHEMA_VERSION}, found {}", file.schema_version),
        ));
    }
    for g in &file.groups {
        g.validate()?;
    }
    Ok(file.groups)
}

/// The hearing groups shipped with the data pack.
pub fn bundled_hearing_groups() -> Result<Vec<HearingGroupFilter>> {
    load_hearing_groups(data_dir().join("hearing_groups.toml"))
}

/// Level after adding `weights` (dB per band) to the spectrum, dB.
pub fn weighted_level(spectrum: &ThirdOctaveSpectrum, weights: &[f64]) -> f64 {
    let msp: f64 = spectrum
        .msp
        .iter()
        .zip(weights)
        .map(|(m, w)| m * 10f64.powf(w / 10.0))
        .sum();
    msp_to_db(msp, spectrum.p_ref)
}

/// Weighted overall level with W evaluated at the band centres, dB.
pub fn weighted_ospl(spectrum: &ThirdOctaveSpectrum, filter: &HearingGroupFilter) -> f64 {
    let w: Vec<f64> = spectrum.band_centers.iter().map(|&f| filter.weight(f)).collect();
    weighted_level(spectrum, &w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmDepthResult {
    /// Mean of the per-period depths, dB.
    pub depth: f64,
    pub per_period_depths: Vec<f64>,
}

/// Amplitude-modulation depth: max − min of the level within each complete
/// blade-passing period, averaged over periods.
///
/// A stand-in for the cited published method, which is not restated in
/// the source material.
pub fn am_depth(levels: &[f64], dt: f64, bpf: f64) -> Result<AmDepthResult> {
    if !(dt > 0.0 && bpf > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample step and blade-passing frequency must be positive, got {dt} and {bpf}"
        )));
    }
    let per_period = 1.0 / (bpf * dt);
    if per_period < 24.0 - 1e-9 {
        return Err(Error::Sampling(format!(
            "{per_period:.2} samples per blade-passing period, at least 24 are required"
        )));
    }
    let mut depths = Vec::new();
    let mut start = 0usize;
    loop {
        let end = ((depths.len() + 1) as f64 * per_period + 1e-9).floor() as usize;
        if end > levels.len() {
            break;
        }
        let window = &levels[start..end];
        let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = window.iter().copied().fold(f64::INFINITY, f64::min);
        depths.push(max - min);
        start = end;
    }
    if depths.len() < 2 {
        return Err(Error::Sampling(format!(
            "{} complete blade-passing periods, at least 2 are required",
            depths.len()
        )));
    }
    Ok(AmDepthResult {
        depth: depths.iter().sum::<f64>() / depths.len() as f64,
        per_period_depths: depths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedLevel {
    pub group: String,
    /// dB
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub turbine: String,
    pub strategy: String,
    /// m/s
    pub wind_speed: f64,
    /// rad/s
    pub omega: f64,
    /// Mean power over the analysed revolutions, W.
    pub power: f64,
    /// percent
    pub power_loss: f64,
    /// dB
    pub ospl_hat: f64,
    /// dB
    pub am_depth: f64,
    pub am_per_period: Vec<f64>,
    /// In the order of the filters used to build the report.
    pub weighted_ospl_hat: Vec<WeightedLevel>,
    pub spectrum_hat: ThirdOctaveSpectrum,
}

impl MetricsReport {
    pub fn weighted(&self, group: &str) -> Option<f64> {
        self.weighted_ospl_hat.iter().find(|w| w.group == group).map(|w| w.level)
    }

    fn same_operating_point(&self, other: &MetricsReport) -> bool {
        self.turbine == other.turbine
            && rel_eq(self.wind_speed, other.wind_speed)
            && rel_eq(self.omega, other.omega)
    }
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn same_operating_point(a: &SimulationResult, b: &SimulationResult) -> bool {
    a.turbine == b.turbine && rel_eq(a.wind_speed, b.wind_speed) && rel_eq(a.omega, b.omega)
}

/// Metrics of `result` with `nominal` as the power baseline.
pub fn build_report(
    result: &SimulationResult,
    nominal: &SimulationResult,
    filters: &[HearingGroupFilter],
) -> Result<MetricsReport> {
    if !same_operating_point(result, nominal) {
        return Err(Error::Mismatch(format!(
            "baseline {} at {} m/s, {} rad/s does not match {} at {} m/s, {} rad/s",
            nominal.turbine, nominal.wind_speed, nominal.omega, result.turbine, result.wind_speed, result.omega
        )));
    }
    let steady = result.steady();
    if steady.len() < result.samples_per_rev {
        return Err(Error::Sampling("at least one revolution after warm-up is required".into()));
    }
    let period = result.period();
    let times: Vec<f64> = steady.iter().map(|s| s.time).collect();
    let cone_msp: Vec<f64> = steady.iter().map(|s| s.cone_msp()).collect();
    let spectra: Vec<ThirdOctaveSpectrum> = steady.iter().map(|s| s.spectrum.clone()).collect();
    let levels: Vec<f64> = steady.iter().map(|s| s.ospl_bar()).collect();

    let ospl = ospl_hat(&times, &cone_msp, period)?;
    let spectrum_hat = spl_hat(&times, &spectra, period)?;
    let dt = period / result.samples_per_rev as f64;
    let bpf = result.num_blades as f64 / period;
    let am = am_depth(&levels, dt, bpf)?;

    let power = result.mean_power();
    let loss = power_loss(power, nominal.mean_power())?;

    Ok(MetricsReport {
        turbine: result.turbine.clone(),
        strategy: result.label.clone(),
        wind_speed: result.wind_speed,
        omega: result.omega,
        power,
        power_loss: loss,
        ospl_hat: ospl,
        am_depth: am.depth,
        am_per_period: am.per_period_depths,
        weighted_ospl_hat: filters
            .iter()
            .map(|f| WeightedLevel {
                group: f.group.clone(),
                level: weighted_ospl(&spectrum_hat, f),
            })
            .collect(),
        spectrum_hat,
    })
}

/// Reports for a batch of runs, each matched with the nominal run of the
/// same turbine and operating point. Output order follows the input.
pub fn build_reports(results: &[SimulationResult], filters: &[HearingGroupFilter]) -> Result<Vec<MetricsReport>> {
    results
        .iter()
        .map(|r| {
            let nominal = results
                .iter()
                .find(|n| n.label == NOMINAL_LABEL && same_operating_point(n, r))
                .ok_or_else(|| {
                    Error::Mismatch(format!(
                        "no nominal run for {} at {} m/s, {} rad/s",
                        r.turbine, r.wind_speed, r.omega
                    ))
                })?;
            build_report(r, nominal, filters)
        })
        .collect()
}

/// Weighted-level reduction ΔC = L(nominal) − L(ipc), dB. `group = None`
/// compares unweighted levels. Negative values mean the IPC run is louder.
pub fn delta_c(nominal: &MetricsReport, ipc: &MetricsReport, group: Option<&str>) -> Result<f64> {
    if !nominal.same_operating_point(ipc) {
        return Err(Error::Mismatch(format!(
            "cannot compare {} ({}) with {} ({}) at different operating points",
            nominal.turbine, nominal.strategy, ipc.turbine, ipc.strategy
        )));
    }
    match group {
        None => Ok(nominal.ospl_hat - ipc.ospl_hat),
        Some(g) => {
            let missing = || Error::InvalidArgument(format!("hearing group {g} is not in the report"));
            Ok(nominal.weighted(g).ok_or_else(missing)? - ipc.weighted(g).ok_or_else(missing)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bundled_filters_peak_at_zero() {
        for f in bundled_hearing_groups().unwrap() {
            let peak = f.peak_weight(20001);
            assert!(peak.abs() < 1e-3, "{}: {peak}", f.group);
        }
    }

    #[test]
    fn identity_and_single_band_weighting() {
        let s = ThirdOctaveSpectrum::from_spl(vec![100.0, 200.0, 400.0], &[60.0, -100.0, -100.0]);
        assert_eq!(weighted_level(&s, &[0.0; 3]), s.ospl());
        let only = ThirdOctaveSpectrum::from_msp(vec![100.0, 200.0], vec![4e-4, 0.0]);
        assert!((weighted_level(&only, &[-40.0, 0.0]) - (only.ospl() - 40.0)).abs() < 1e-12);
    }

    #[test]
    fn am_of_synthetic_signals() {
        let bpf = 1.0;
        let dt = 1.0 / 48.0;
        let n = 48 * 6;
        let flat = vec![70.0; n];
        assert_eq!(am_depth(&flat, dt, bpf).unwrap().depth, 0.0);

        let sine: Vec<f64> = (0..n).map(|i| 70.0 + 3.0 * (2.0 * PI * i as f64 * dt + 0.3).sin()).collect();
        assert!((am_depth(&sine, dt, bpf).unwrap().depth - 6.0).abs() < 0.1);

        assert!(am_depth(&flat[..60], dt, bpf).is_err());
        assert!(am_depth(&flat, 1.0 / 20.0, bpf).is_err());
    }
}
