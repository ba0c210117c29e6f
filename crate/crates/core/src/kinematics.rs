//! Blade azimuth tracking and acoustic source positions.
//!
//! Conventions: the rotor plane is vertical and contains the tower axis
//! (x = 0); azimuth Ψ = 0 points straight up and increases in the
//! direction of rotation, so a blade on the +y side (Ψ ∈ [90°, 180°])
//! is moving down. Shaft tilt, cone and overhang are neglected.

use std::f64::consts::TAU;

use crate::config::TurbineConfig;
use crate::geom::Vec3;
use crate::pitch::{wrap_angle, PitchStrategy};

/// Spanwise fraction at which each blade's acoustic source is lumped.
pub const SOURCE_SPAN_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BladeKinematicState {
    pub blade_index: usize,
    /// rad, in [0, 2π)
    pub azimuth: f64,
    /// deg
    pub pitch: f64,
    /// 95%-span point, world frame
    pub source_position: Vec3,
}

/// Unit vector from hub centre along a blade at azimuth `psi`.
pub fn span_direction(psi: f64) -> Vec3 {
    Vec3::new(0.0, psi.sin(), psi.cos())
}

/// Unit vector of the blade's rotational velocity at azimuth `psi`.
pub fn rotation_direction(psi: f64) -> Vec3 {
    Vec3::new(0.0, psi.cos(), -psi.sin())
}

/// World position of the point at radius `r` on a blade at azimuth `psi`.
pub fn blade_point(turbine: &TurbineConfig, psi: f64, r: f64) -> Vec3 {
    Vec3::new(0.0, 0.0, turbine.hub_height) + span_direction(psi) * r
}

/// Azimuth of blade `b` when blade 0 sits at `psi0`.
pub fn blade_azimuth(psi0: f64, blade: usize, num_blades: usize) -> f64 {
    wrap_angle(psi0 + TAU * blade as f64 / num_blades as f64)
}

/// State of all blades at time `t` for constant rotor speed `omega`.
pub fn rotor_state(
    turbine: &TurbineConfig,
    t: f64,
    omega: f64,
    strategy: &PitchStrategy,
) -> Vec<BladeKinematicState> {
    let psi0 = wrap_angle(omega * t);
    rotor_state_at_azimuth(turbine, psi0, strategy)
}

/// State of all blades when blade 0 is at azimuth `psi0`.
pub fn rotor_state_at_azimuth(
    turbine: &TurbineConfig,
    psi0: f64,
    strategy: &PitchStrategy,
) -> Vec<BladeKinematicState> {
    let r_source = SOURCE_SPAN_FRACTION * turbine.rotor_radius;
    (0..turbine.num_blades)
        .map(|b| {
            let psi = blade_azimuth(psi0, b, turbine.num_blades);
            BladeKinematicState {
                blade_index: b,
                azimuth: psi,
                pitch: strategy.pitch_at(psi),
                source_position: blade_point(turbine, psi, r_source),
            }
        })
        .collect()
}
