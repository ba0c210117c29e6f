//! Trailing-edge noise of whole blades at arbitrary observers.
//!
//! Each blade is cut into acoustic segments between neighbouring BEM
//! stations. A segment's BPM shape spectrum depends only on its flow, so it
//! is computed once per blade state; evaluating an observer then costs one
//! directivity and one distance per segment. Acoustics are quasi-steady:
//! no retarded time and no convective amplification.

use serde::{Deserialize, Serialize};

use crate::bem::SectionFlowState;
use crate::bpm::{self, DirectivityKind, Medium, SegmentFlow, SegmentShape};
use crate::config::TurbineConfig;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::kinematics::{blade_point, rotation_direction, span_direction, BladeKinematicState};
use crate::spectrum::{third_octave_centers, ThirdOctaveSpectrum, P_REF};

/// Observers closer than this to a segment are rejected, m.
pub const EXCLUSION_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverPoint {
    pub position: Vec3,
}

impl ObserverPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ObserverPoint {
            position: Vec3::new(x, y, z),
        }
    }
}

/// One acoustic strip of a blade, in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticSegment {
    /// Mid-span point.
    pub center: Vec3,
    /// Unit span direction (root to tip).
    pub span_axis: Vec3,
    /// Unit chord direction pointing towards the trailing edge.
    pub chord_axis: Vec3,
    pub flow: SegmentFlow,
    pub shape: SegmentShape,
}

impl AcousticSegment {
    /// Mean-square pressure per band at `observer`, added into `out`.
    fn accumulate(&self, observer: Vec3, out: &mut [f64]) -> Result<()> {
        let half = 0.5 * self.flow.span;
        let rel = observer - self.center;
        let along = rel.dot(self.span_axis).clamp(-half, half);
        let closest = rel - self.span_axis * along;
        if closest.norm() <= EXCLUSION_RADIUS {
            return Err(Error::Geometry(format!(
                "observer ({:.3}, {:.3}, {:.3}) lies within {EXCLUSION_RADIUS} m of a blade segment",
                observer.x, observer.y, observer.z
            )));
        }
        let r2 = rel.dot(rel);
        if r2 == 0.0 || self.shape.shape_msp.iter().all(|&m| m == 0.0) {
            return Ok(());
        }
        let r = r2.sqrt();
        let normal = self.chord_axis.cross(self.span_axis);
        let cos_theta = rel.dot(self.chord_axis) / r;
        let ry = rel.dot(self.span_axis);
        let rz = rel.dot(normal);
        let denom = ry * ry + rz * rz;
        let sin2_phi = if denom > 0.0 { rz * rz / denom } else { 1.0 };
        let d = match self.shape.directivity {
            DirectivityKind::HighFrequency => bpm::directivity_high(cos_theta, sin2_phi, 0.0),
            DirectivityKind::LowFrequency => bpm::directivity_low(cos_theta, sin2_phi, 0.0),
        };
        let factor = d / r2;
        for (o, s) in out.iter_mut().zip(&self.shape.shape_msp) {
            *o += s * factor;
        }
        Ok(())
    }
}

/// A blade reduced to acoustic segments for one kinematic state.
#[derive(Debug, Clone, PartialEq)]
pub struct BladeNoiseSource {
    pub blade_index: usize,
    pub segments: Vec<AcousticSegment>,
    pub band_centers: Vec<f64>,
}

impl BladeNoiseSource {
    /// Builds segments from neighbouring station pairs of one blade's flow.
    pub fn new(
        turbine: &TurbineConfig,
        state: &BladeKinematicState,
        flow: &[SectionFlowState],
    ) -> Result<Self> {
        Self::with_bands(turbine, state, flow, third_octave_centers())
    }

    pub fn with_bands(
        turbine: &TurbineConfig,
        state: &BladeKinematicState,
        flow: &[SectionFlowState],
        band_centers: Vec<f64>,
    ) -> Result<Self> {
        if flow.len() != turbine.blade_stations.len() {
            return Err(Error::InvalidArgument(format!(
                "flow has {} stations, turbine defines {}",
                flow.len(),
                turbine.blade_stations.len()
            )));
        }
        let medium = Medium {
            sound_speed: turbine.air.sound_speed,
            kinematic_viscosity: turbine.air.kinematic_viscosity,
        };
        let span_axis = span_direction(state.azimuth);
        let tangent = rotation_direction(state.azimuth);
        let downwind = Vec3::new(1.0, 0.0, 0.0);

        let segments = flow
            .windows(2)
            .zip(turbine.blade_stations.windows(2))
            .map(|(f, s)| {
                let radius = 0.5 * (f[0].radius + f[1].radius);
                let twist = 0.5 * (s[0].twist + s[1].twist);
                let seg_flow = SegmentFlow {
                    chord: 0.5 * (s[0].chord + s[1].chord),
                    span: f[1].radius - f[0].radius,
                    u: 0.5 * (f[0].u_rel + f[1].u_rel),
                    alpha: 0.5 * (f[0].alpha + f[1].alpha),
                };
                let theta = (twist + state.pitch).to_radians();
                let chord_axis = downwind * theta.sin() - tangent * theta.cos();
                AcousticSegment {
                    center: blade_point(turbine, state.azimuth, radius),
                    span_axis,
                    chord_axis,
                    shape: bpm::segment_shape(&seg_flow, &medium, turbine.boundary_layer, &band_centers, P_REF),
                    flow: seg_flow,
                }
            })
            .collect();

        Ok(BladeNoiseSource {
            blade_index: state.blade_index,
            segments,
            band_centers,
        })
    }

    /// Source assembled from pre-built segments.
    pub fn from_segments(blade_index: usize, segments: Vec<AcousticSegment>, band_centers: Vec<f64>) -> Self {
        BladeNoiseSource {
            blade_index,
            segments,
            band_centers,
        }
    }

    /// Any segment had its angle of attack clamped to the BPM validity range.
    pub fn alpha_clamped(&self) -> bool {
        self.segments.iter().any(|s| s.shape.alpha_clamped)
    }

    pub fn spectrum_at(&self, observer: &ObserverPoint) -> Result<ThirdOctaveSpectrum> {
        if !observer.position.is_finite() {
            return Err(Error::InvalidArgument("observer position must be finite".into()));
        }
        let mut msp = vec![0.0; self.band_centers.len()];
        for seg in &self.segments {
            seg.accumulate(observer.position, &mut msp)?;
        }
        Ok(ThirdOctaveSpectrum::from_msp(self.band_centers.clone(), msp))
    }
}

/// Single-blade spectrum at one observer.
pub fn blade_spectrum(
    turbine: &TurbineConfig,
    state: &BladeKinematicState,
    flow: &[SectionFlowState],
    observer: &ObserverPoint,
) -> Result<ThirdOctaveSpectrum> {
    BladeNoiseSource::new(turbine, state, flow)?.spectrum_at(observer)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverSpectra {
    /// Indexed by blade.
    pub per_blade: Vec<ThirdOctaveSpectrum>,
    pub total: ThirdOctaveSpectrum,
}

/// Builds one source per blade; `flows` is indexed `[blade][station]`.
pub fn rotor_sources(
    turbine: &TurbineConfig,
    states: &[BladeKinematicState],
    flows: &[Vec<SectionFlowState>],
) -> Result<Vec<BladeNoiseSource>> {
    if states.len() != flows.len() {
        return Err(Error::InvalidArgument(format!(
            "{} blade states but {} blade flows",
            states.len(),
            flows.len()
        )));
    }
    states
        .iter()
        .zip(flows)
        .map(|(s, f)| BladeNoiseSource::new(turbine, s, f))
        .collect()
}

/// Per-blade and total spectra at each observer.
pub fn spectra_at(sources: &[BladeNoiseSource], observers: &[ObserverPoint]) -> Result<Vec<ObserverSpectra>> {
    if observers.is_empty() {
        return Err(Error::InvalidArgument("at least one observer is required".into()));
    }
    let bands = sources
        .first()
        .map(|s| s.band_centers.clone())
        .unwrap_or_else(third_octave_centers);
    observers
        .iter()
        .map(|obs| {
            let per_blade = sources.iter().map(|s| s.spectrum_at(obs)).collect::<Result<Vec<_>>>()?;
            let mut total = ThirdOctaveSpectrum::from_msp(bands.clone(), vec![0.0; bands.len()]);
            for s in &per_blade {
                total.add_assign(s);
            }
            Ok(ObserverSpectra { per_blade, total })
        })
        .collect()
}

pub fn total_spectrum_at(
    turbine: &TurbineConfig,
    observers: &[ObserverPoint],
    states: &[BladeKinematicState],
    flows: &[Vec<SectionFlowState>],
) -> Result<Vec<ObserverSpectra>> {
    spectra_at(&rotor_sources(turbine, states, flows)?, observers)
}
