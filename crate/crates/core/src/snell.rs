//! Air–water transmission geometry and cone-averaged levels.
//!
//! Sound from an airborne source crosses the interface only inside the
//! critical cone of semi-angle φ_lim = asin(1/n), n = c_w/c_a. Each blade
//! gets a vertical cone with its apex at the 95%-span source; its footprint
//! on the water is a disc of radius H·tan φ_lim. Ring observers sit on the
//! rim of each disc at z = 0 and the blade's noise is averaged over its own
//! ring only, weighted by disc area.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::kinematics::BladeKinematicState;
use crate::noise::ObserverPoint;
use crate::spectrum::{msp_to_db, ThirdOctaveSpectrum, P_REF};

/// Default number of ring observers per cone.
pub const DEFAULT_RING_OBSERVERS: usize = 20;

/// Minimum samples accepted for a revolution average.
pub const MIN_REVOLUTION_SAMPLES: usize = 32;

const ROOT_TOLERANCE: f64 = 1e-10;

/// Critical (limit) angle on the air side, rad.
pub fn limit_angle(n: f64) -> Result<f64> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "refraction index must be at least 1, got {n}"
        )));
    }
    Ok((1.0 / n).asin())
}

/// A submerged receiver relative to a source at height `source_height`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnderwaterReceiver {
    /// d, m
    pub horizontal_distance: f64,
    /// β; depth = β·H
    pub depth_factor: f64,
    /// H, m
    pub source_height: f64,
    /// Interface/transmission term, dB. Not modelled; supplied by the user.
    pub delta_l: f64,
    /// Water absorption per band, dB/m. Empty means no absorption.
    pub alpha_w: Vec<f64>,
}

impl UnderwaterReceiver {
    pub fn new(horizontal_distance: f64, depth_factor: f64, source_height: f64) -> Self {
        UnderwaterReceiver {
            horizontal_distance,
            depth_factor,
            source_height,
            delta_l: 0.0,
            alpha_w: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizontal_distance >= 0.0) || !self.horizontal_distance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "horizontal distance must be finite and non-negative, got {}",
                self.horizontal_distance
            )));
        }
        if !(self.depth_factor >= 0.0) || !self.depth_factor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "depth factor must be finite and non-negative, got {}",
                self.depth_factor
            )));
        }
        if !(self.source_height > 0.0) || !self.source_height.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "source height must be positive, got {}",
                self.source_height
            )));
        }
        Ok(())
    }
}

/// Air-side incidence angle of the refracted ray reaching `receiver`, rad.
///
/// Solves d = H·tan φ + βH·tan φ_w with sin φ_w = n·sin φ by bisection on
/// [0, φ_lim). The horizontal reach grows without bound as φ → φ_lim, so a
/// root exists for every finite d when β > 0.
pub fn incidence_angle(receiver: &UnderwaterReceiver, n: f64) -> Result<f64> {
    receiver.validate()?;
    if !(n > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "refraction index must exceed 1, got {n}"
        )));
    }
    let phi_lim = limit_angle(n)?;
    let h = receiver.source_height;
    let d = receiver.horizontal_distance;
    let beta = receiver.depth_factor;

    if d == 0.0 {
        return Ok(0.0);
    }
    if beta == 0.0 {
        let phi = (d / h).atan();
        return if phi < phi_lim {
            Ok(phi)
        } else {
            Err(Error::NoSolution(format!(
                "receiver at the surface {d} m away lies outside the transmission cone"
            )))
        };
    }

    let reach = |phi: f64| {
        let s = n * phi.sin();
        if s >= 1.0 {
            return f64::INFINITY;
        }
        h * phi.tan() + beta * h * s / (1.0 - s * s).sqrt()
    };
    let (mut lo, mut hi) = (0.0, phi_lim);
    if !(reach(lo) <= d) {
        return Err(Error::NoSolution(format!("no refracted ray bracket for d = {d} m")));
    }
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if reach(mid) < d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnellCone {
    pub blade_index: usize,
    /// Source point, m.
    pub apex: crate::geom::Vec3,
    /// (x, y) of the footprint centre, m.
    pub surface_center: (f64, f64),
    pub surface_radius: f64,
    /// m²
    pub area: f64,
    pub ring_observers: Vec<ObserverPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnellConeSet {
    /// Cone semi-angle, rad.
    pub phi_lim: f64,
    pub cones: Vec<SnellCone>,
}

impl SnellConeSet {
    pub fn total_area(&self) -> f64 {
        self.cones.iter().map(|c| c.area).sum()
    }

    /// A_SC^b / A_SC per blade; sums to one.
    pub fn area_weights(&self) -> Vec<f64> {
        let total = self.total_area();
        self.cones.iter().map(|c| c.area / total).collect()
    }
}

/// Footprint of a single vertical cone with apex at `apex`.
pub fn cone_at(
    blade_index: usize,
    apex: crate::geom::Vec3,
    phi_lim: f64,
    ring_count: usize,
) -> Result<SnellCone> {
    if !(apex.z > 0.0) || !apex.is_finite() {
        return Err(Error::Geometry(format!(
            "blade {blade_index} source at height {} m is not above the water surface",
            apex.z
        )));
    }
    let radius = apex.z * phi_lim.tan();
    let ring_observers = (0..ring_count)
        .map(|i| {
            let bearing = TAU * i as f64 / ring_count as f64;
            ObserverPoint::new(apex.x + radius * bearing.cos(), apex.y + radius * bearing.sin(), 0.0)
        })
        .collect();
    Ok(SnellCone {
        blade_index,
        apex,
        surface_center: (apex.x, apex.y),
        surface_radius: radius,
        area: PI * radius * radius,
        ring_observers,
    })
}

/// One cone per blade. Ring observers start at bearing 0 (the +x,
/// downwind direction) and advance counter-clockwise seen from above.
pub fn build_cones(states: &[BladeKinematicState], n: f64, ring_count: usize) -> Result<SnellConeSet> {
    if ring_count == 0 {
        return Err(Error::InvalidArgument("at least one ring observer is required".into()));
    }
    if states.is_empty() {
        return Err(Error::InvalidArgument("rotor state has no blades".into()));
    }
    let phi_lim = limit_angle(n)?;
    if phi_lim >= FRAC_PI_2 {
        return Err(Error::InvalidArgument(
            "identical media give no bounded transmission cone".into(),
        ));
    }
    let cones = states
        .iter()
        .map(|s| cone_at(s.blade_index, s.source_position, phi_lim, ring_count))
        .collect::<Result<Vec<_>>>()?;
    Ok(SnellConeSet { phi_lim, cones })
}

/// χ_b: whether a surface observer lies in blade `blade`'s footprint.
/// Points on the rim count as inside.
pub fn mask(observer: &ObserverPoint, cone_set: &SnellConeSet, blade: usize) -> bool {
    let Some(cone) = cone_set.cones.get(blade) else {
        return false;
    };
    let dx = observer.position.x - cone.surface_center.0;
    let dy = observer.position.y - cone.surface_center.1;
    let r = cone.surface_radius;
    dx * dx + dy * dy <= r * r * (1.0 + 1e-12)
}

fn check_ring_shape<T>(cone_set: &SnellConeSet, rings: &[Vec<T>]) -> Result<()> {
    if rings.len() != cone_set.cones.len() {
        return Err(Error::InvalidArgument(format!(
            "{} ring sets for {} cones",
            rings.len(),
            cone_set.cones.len()
        )));
    }
    for (cone, ring) in cone_set.cones.iter().zip(rings) {
        if ring.len() != cone.ring_observers.len() || ring.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "blade {} has {} ring values for {} observers",
                cone.blade_index,
                ring.len(),
                cone.ring_observers.len()
            )));
        }
    }
    Ok(())
}

/// Area-weighted ring-averaged mean-square pressure, Pa².
///
/// `ring_msp[b][i]` is blade b's band-integrated mean-square pressure at
/// its own ring observer i.
pub fn cone_averaged_msp(cone_set: &SnellConeSet, ring_msp: &[Vec<f64>]) -> Result<f64> {
    check_ring_shape(cone_set, ring_msp)?;
    Ok(cone_set
        .area_weights()
        .iter()
        .zip(ring_msp)
        .map(|(w, ring)| w * ring.iter().sum::<f64>() / ring.len() as f64)
        .sum())
}

/// ŌSPL at one instant, dB re 20 µPa.
pub fn ospl_bar(cone_set: &SnellConeSet, ring_msp: &[Vec<f64>]) -> Result<f64> {
    Ok(msp_to_db(cone_averaged_msp(cone_set, ring_msp)?, P_REF))
}

/// Per-band version of the cone average; band-summing it reproduces ŌSPL.
pub fn cone_averaged_spectrum(
    cone_set: &SnellConeSet,
    ring_spectra: &[Vec<ThirdOctaveSpectrum>],
) -> Result<ThirdOctaveSpectrum> {
    check_ring_shape(cone_set, ring_spectra)?;
    let bands = ring_spectra[0][0].band_centers.clone();
    let mut msp = vec![0.0; bands.len()];
    for (w, ring) in cone_set.area_weights().iter().zip(ring_spectra) {
        let scale = w / ring.len() as f64;
        for s in ring {
            for (m, v) in msp.iter_mut().zip(&s.msp) {
                *m += scale * v;
            }
        }
    }
    Ok(ThirdOctaveSpectrum::from_msp(bands, msp))
}

/// Continuous counterpart of [`cone_averaged_msp`]: blade b's field
/// `field(b, x, y)` integrated over the interior of its own footprint and
/// normalised by the total footprint area, using an `n_r` × `n_theta`
/// midpoint rule in polar coordinates.
pub fn oswl_area_average<F>(cone_set: &SnellConeSet, field: F, n_r: usize, n_theta: usize) -> f64
where
    F: Fn(usize, f64, f64) -> f64,
{
    let total = cone_set.total_area();
    let mut acc = 0.0;
    for (b, cone) in cone_set.cones.iter().enumerate() {
        let dr = cone.surface_radius / n_r as f64;
        let dth = TAU / n_theta as f64;
        for i in 0..n_r {
            let r = (i as f64 + 0.5) * dr;
            for j in 0..n_theta {
                let th = (j as f64 + 0.5) * dth;
                let x = cone.surface_center.0 + r * th.cos();
                let y = cone.surface_center.1 + r * th.sin();
                acc += field(b, x, y) * r * dr * dth;
            }
        }
    }
    acc / total
}

/// Checks that `times` are uniform and span whole revolutions of `period`.
/// Returns the number of revolutions covered.
pub fn check_revolution_sampling(times: &[f64], period: f64) -> Result<usize> {
    if times.len() < MIN_REVOLUTION_SAMPLES {
        return Err(Error::Sampling(format!(
            "{} samples given, at least {MIN_REVOLUTION_SAMPLES} are required",
            times.len()
        )));
    }
    if !(period > 0.0) {
        return Err(Error::Sampling(format!("revolution period must be positive, got {period}")));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Sampling("sample times must increase".into()));
    }
    for (i, t) in times.iter().enumerate() {
        if ((t - times[0]) - i as f64 * dt).abs() > 1e-6 * dt {
            return Err(Error::Sampling(format!("sample {i} at t = {t} s breaks uniform spacing")));
        }
    }
    let span = dt * times.len() as f64;
    let revs = (span / period).round();
    if revs < 1.0 || (span - revs * period).abs() > 1e-6 * dt {
        return Err(Error::Sampling(format!(
            "samples cover {:.6} revolutions, not a whole number",
            span / period
        )));
    }
    Ok(revs as usize)
}

/// ÔSPL: energy mean of ŌSPL(t) over whole revolutions, dB.
pub fn ospl_hat(times: &[f64], cone_msp: &[f64], period: f64) -> Result<f64> {
    check_revolution_sampling(times, period)?;
    if cone_msp.len() != times.len() {
        return Err(Error::InvalidArgument("one level per sample time is required".into()));
    }
    let mean = cone_msp.iter().sum::<f64>() / cone_msp.len() as f64;
    Ok(msp_to_db(mean, P_REF))
}

/// ŜPL(f): per-band energy mean of the cone-averaged spectra.
pub fn spl_hat(times: &[f64], spectra: &[ThirdOctaveSpectrum], period: f64) -> Result<ThirdOctaveSpectrum> {
    check_revolution_sampling(times, period)?;
    if spectra.len() != times.len() {
        return Err(Error::InvalidArgument("one spectrum per sample time is required".into()));
    }
    let bands = spectra[0].band_centers.clone();
    let mut msp = vec![0.0; bands.len()];
    for s in spectra {
        for (m, v) in msp.iter_mut().zip(&s.msp) {
            *m += v;
        }
    }
    let inv = 1.0 / spectra.len() as f64;
    msp.iter_mut().for_each(|m| *m *= inv);
    Ok(ThirdOctaveSpectrum::from_msp(bands, msp))
}

/// Parametric underwater level per band:
/// SPL(f) = ŜPL(f) + ΔL − 10·log10(4πd²) − α_w(f)·d.
///
/// No interface transmission loss is modelled here; ΔL is passed through
/// from the receiver as given.
pub fn receiver_spl(spl_hat: &[f64], receiver: &UnderwaterReceiver) -> Result<Vec<f64>> {
    let d = receiver.horizontal_distance;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "receiver distance must be positive, got {d}"
        )));
    }
    if !receiver.alpha_w.is_empty() && receiver.alpha_w.len() != spl_hat.len() {
        return Err(Error::InvalidArgument(format!(
            "{} absorption values for {} bands",
            receiver.alpha_w.len(),
            spl_hat.len()
        )));
    }
    let spreading = 10.0 * (4.0 * PI * d * d).log10();
    Ok(spl_hat
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let absorption = receiver.alpha_w.get(i).copied().unwrap_or(0.0) * d;
            l + receiver.delta_l - spreading - absorption
        })
        .collect())
}
