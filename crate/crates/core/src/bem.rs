//! Steady blade-element momentum solver.
//!
//! Every annulus carries one pair of induction factors shared by all
//! blades, while each blade sees its own angle of attack through its own
//! pitch: the momentum balance uses the blade-averaged section loads.
//! With collective pitch this reduces to the classic independent-annuli
//! BEM. Closure: Prandtl tip and hub loss, Buhl's high-induction
//! correction above a = 0.4, relaxed fixed-point iteration.

use std::f64::consts::PI;

use crate::config::TurbineConfig;
use crate::error::{Error, Result};

/// Admissible pitch range, deg. The upper end allows fully feathered checks.
pub const PITCH_RANGE: (f64, f64) = (-5.0, 90.0);

const A_MIN: f64 = -0.5;
const A_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BemSettings {
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BemSettings {
    fn default() -> Self {
        BemSettings {
            relaxation: 0.25,
            tolerance: 1e-6,
            max_iterations: 500,
        }
    }
}

/// Flow at one blade station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionFlowState {
    pub span_fraction: f64,
    /// m
    pub radius: f64,
    /// Local angle of attack, deg.
    pub alpha: f64,
    /// Relative inflow speed, m/s.
    pub u_rel: f64,
    /// Inflow angle from the rotor plane, deg.
    pub inflow_angle: f64,
    pub a_axial: f64,
    pub a_tangential: f64,
    pub cl: f64,
    pub cd: f64,
    /// Angle of attack fell outside the polar table and was clamped.
    pub polar_clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotorPerformance {
    /// W
    pub power: f64,
    /// N
    pub thrust: f64,
    /// N·m, one entry per blade
    pub per_blade_torque: Vec<f64>,
    /// Indexed `[blade][station]`.
    pub section_states: Vec<Vec<SectionFlowState>>,
    /// Largest final relative induction update over all annuli.
    pub max_residual: f64,
    /// Iterations used by the slowest annulus.
    pub iterations: usize,
    /// Any polar lookup clamped to the table ends.
    pub polar_clamped: bool,
}

fn prandtl(num_blades: f64, distance: f64, radius: f64, sin_phi: f64) -> f64 {
    let f = num_blades * distance / (2.0 * radius * sin_phi.abs().max(1e-6));
    (2.0 / PI * (-f).exp().clamp(0.0, 1.0).acos()).max(1e-4)
}

/// Axial induction from the normal-load parameter, with Buhl's correction.
fn axial_induction(k: f64, f: f64) -> f64 {
    if k <= 2.0 / 3.0 {
        if (1.0 + k).abs() < 1e-12 {
            return A_MIN;
        }
        k / (1.0 + k)
    } else {
        let g1 = 2.0 * f * k - (10.0 / 9.0 - f);
        let g2 = (2.0 * f * k - f * (4.0 / 3.0 - f)).max(0.0);
        let g3 = 2.0 * f * k - (25.0 / 9.0 - 2.0 * f);
        if g3.abs() < 1e-6 {
            1.0 - 1.0 / (2.0 * g2.sqrt())
        } else {
            (g1 - g2.sqrt()) / g3
        }
    }
}

/// Radial extent of the load strip around each station.
fn strip_widths(turbine: &TurbineConfig) -> Vec<f64> {
    let r: Vec<f64> = turbine
        .blade_stations
        .iter()
        .map(|s| s.span_fraction * turbine.rotor_radius)
        .collect();
    let inner = turbine.hub_radius.min(r[0]);
    let n = r.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { inner } else { 0.5 * (r[i - 1] + r[i]) };
            let hi = if i + 1 == n { turbine.rotor_radius } else { 0.5 * (r[i] + r[i + 1]) };
            hi - lo
        })
        .collect()
}

pub fn solve_bem(
    turbine: &TurbineConfig,
    wind_speed: f64,
    omega: f64,
    blade_pitches: &[f64],
) -> Result<RotorPerformance> {
    solve_bem_with(turbine, wind_speed, omega, blade_pitches, &BemSettings::default())
}

pub fn solve_bem_with(
    turbine: &TurbineConfig,
    wind_speed: f64,
    omega: f64,
    blade_pitches: &[f64],
    settings: &BemSettings,
) -> Result<RotorPerformance> {
    if !(wind_speed > 0.0 && wind_speed.is_finite()) {
        return Err(Error::InvalidArgument(format!("wind speed must be positive, got {wind_speed}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("rotor speed must be positive, got {omega}")));
    }
    let nb = turbine.num_blades;
    if blade_pitches.len() != nb {
        return Err(Error::InvalidArgument(format!(
            "expected {nb} blade pitches, got {}",
            blade_pitches.len()
        )));
    }
    if let Some(p) = blade_pitches
        .iter()
        .find(|p| !(PITCH_RANGE.0..=PITCH_RANGE.1).contains(*p))
    {
        return Err(Error::InvalidArgument(format!(
            "pitch {p}° outside [{}, {}]°",
            PITCH_RANGE.0, PITCH_RANGE.1
        )));
    }

    let rho = turbine.air.density;
    let big_r = turbine.rotor_radius;
    let r_hub = turbine.hub_radius;
    let b = nb as f64;
    let widths = strip_widths(turbine);

    let mut sections = vec![Vec::with_capacity(turbine.blade_stations.len()); nb];
    let mut torque = vec![0.0; nb];
    let mut thrust = 0.0;
    let mut max_residual: f64 = 0.0;
    let mut max_iter = 0;
    let mut any_clamped = false;

    for (annulus, (station, &dr)) in turbine.blade_stations.iter().zip(&widths).enumerate() {
        let r = station.span_fraction * big_r;
        let polar = turbine.polar(&station.polar_id);
        let sigma = b * station.chord / (2.0 * PI * r);

        let mut a = 0.25;
        let mut ap = 0.0;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;

        // blade-averaged normal/tangential coefficients at the current state
        let averaged = |a: f64, ap: f64| {
            let phi = ((1.0 - a) * wind_speed).atan2((1.0 + ap) * omega * r);
            let (s, c) = phi.sin_cos();
            let (mut cn, mut ct) = (0.0, 0.0);
            for &pitch in blade_pitches {
                let alpha = phi.to_degrees() - (station.twist + pitch);
                let p = polar.lookup(alpha);
                cn += p.cl * c + p.cd * s;
                ct += p.cl * s - p.cd * c;
            }
            (phi, cn / b, ct / b)
        };

        while iterations < settings.max_iterations {
            iterations += 1;
            let (phi, cn, ct) = averaged(a, ap);
            let (s, c) = phi.sin_cos();
            let mut f = prandtl(b, big_r - r, r, s);
            if r_hub > 0.0 && r > r_hub {
                f *= prandtl(b, r - r_hub, r_hub, s);
            }
            let k = sigma * cn / (4.0 * f * s * s).max(1e-12);
            let a_new = axial_induction(k, f).clamp(A_MIN, A_MAX);
            let kp = sigma * ct / (4.0 * f * s * c).max(1e-12);
            let ap_new = if (1.0 - kp).abs() < 1e-9 { A_MAX } else { kp / (1.0 - kp) }.clamp(A_MIN, A_MAX);

            residual = ((a_new - a).abs() / a_new.abs().max(0.01))
                .max((ap_new - ap).abs() / ap_new.abs().max(0.01));
            if residual < settings.tolerance {
                a = a_new;
                ap = ap_new;
                converged = true;
                break;
            }
            a += settings.relaxation * (a_new - a);
            ap += settings.relaxation * (ap_new - ap);
        }
        if !converged {
            return Err(Error::NonConvergence {
                annulus,
                iterations,
                residual,
            });
        }
        max_residual = max_residual.max(residual);
        max_iter = max_iter.max(iterations);

        let u_axial = (1.0 - a) * wind_speed;
        let u_tan = (1.0 + ap) * omega * r;
        let phi = u_axial.atan2(u_tan);
        let (s, c) = phi.sin_cos();
        let w2 = u_axial * u_axial + u_tan * u_tan;
        let q = 0.5 * rho * w2 * station.chord;
        for (blade, &pitch) in blade_pitches.iter().enumerate() {
            let alpha = phi.to_degrees() - (station.twist + pitch);
            let p = polar.lookup(alpha);
            any_clamped |= p.clamped;
            let cn = p.cl * c + p.cd * s;
            let ct = p.cl * s - p.cd * c;
            torque[blade] += q * ct * r * dr;
            thrust += q * cn * dr;
            sections[blade].push(SectionFlowState {
                span_fraction: station.span_fraction,
                radius: r,
                alpha,
                u_rel: w2.sqrt(),
                inflow_angle: phi.to_degrees(),
                a_axial: a,
                a_tangential: ap,
                cl: p.cl,
                cd: p.cd,
                polar_clamped: p.clamped,
            });
        }
    }

    let power = omega * torque.iter().sum::<f64>();
    Ok(RotorPerformance {
        power,
        thrust,
        per_blade_torque: torque,
        section_states: sections,
        max_residual,
        iterations: max_iter,
        polar_clamped: any_clamped,
    })
}

/// Power loss relative to nominal, percent: (1 − P/P_nom)·100.
pub fn power_loss(power: f64, power_nominal: f64) -> Result<f64> {
    if !(power_nominal > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "nominal power must be positive, got {power_nominal}"
        )));
    }
    Ok((1.0 - power / power_nominal) * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_loss_definition() {
        assert_eq!(power_loss(5e6, 5e6).unwrap(), 0.0);
        assert!((power_loss(0.95 * 5e6, 5e6).unwrap() - 5.0).abs() < 1e-9);
        assert_eq!(power_loss(0.0, 5e6).unwrap(), 100.0);
        assert!(power_loss(1.0, 0.0).is_err());
    }

    #[test]
    fn buhl_branch_is_continuous_at_a_04() {
        for f in [0.3, 0.7, 1.0] {
            let k = 2.0 / 3.0;
            let lo = axial_induction(k, f);
            let hi = axial_induction(k + 1e-9, f);
            assert!((lo - 0.4).abs() < 1e-12);
            assert!((lo - hi).abs() < 1e-6, "F = {f}: {lo} vs {hi}");
        }
    }

    #[test]
    fn prandtl_vanishes_towards_the_tip() {
        let s = 0.1;
        assert!(prandtl(3.0, 0.01, 60.0, s) < 0.05);
        assert!(prandtl(3.0, 30.0, 30.0, s) > 0.999);
    }
}
