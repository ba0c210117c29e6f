//! Brooks–Pope–Marcolini turbulent-boundary-layer trailing-edge noise.
//!
//! Semi-empirical ⅓-octave levels for one airfoil segment of chord `c`,
//! span `L` and inflow speed `U` at angle of attack `α*`:
//!
//! ```text
//! SPL_p = 10 log(δ*_p M⁵ L D̄h / re²) + A(St_p / St₁)  + (K₁ − 3) + ΔK₁
//! SPL_s = 10 log(δ*_s M⁵ L D̄h / re²) + A(St_s / St̄₁) + (K₁ − 3)
//! SPL_α = 10 log(δ*_s M⁵ L D̄h / re²) + B(St_s / St₂)  + K₂
//! ```
//!
//! Above the stall switch angle the suction and pressure terms vanish and
//! the separation term uses the low-frequency directivity D̄l and the A
//! curve evaluated at 3·Rc.
//!
//! Levels are split into an observer-independent "shape" (everything but
//! D̄/re²) and the directivity factor, so one segment can be evaluated at
//! many observers cheaply.

use crate::config::BoundaryLayer;

/// Upper validity bound of the correlations; larger angles are clamped.
pub const MAX_ALPHA_DEG: f64 = 25.0;

/// Observer-independent parameters of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentFlow {
    /// m
    pub chord: f64,
    /// m
    pub span: f64,
    /// m/s
    pub u: f64,
    /// deg
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    /// m/s
    pub sound_speed: f64,
    /// m²/s
    pub kinematic_viscosity: f64,
}

/// Which directivity function scales a segment's shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectivityKind {
    HighFrequency,
    /// Deep-stall separation.
    LowFrequency,
}

/// ⅓-octave levels of one segment before the directivity and spreading
/// factor `D̄/re²` is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentShape {
    /// Pa²·m² per band; multiply by D̄/re² for mean-square pressure.
    pub shape_msp: Vec<f64>,
    pub directivity: DirectivityKind,
    /// α* exceeded [`MAX_ALPHA_DEG`] and was clamped.
    pub alpha_clamped: bool,
    /// Boundary-layer displacement thicknesses used (m).
    pub delta_star_pressure: f64,
    pub delta_star_suction: f64,
}

/// Boundary-layer thickness and displacement thickness at zero incidence.
pub fn zero_incidence_thickness(reynolds_chord: f64, chord: f64, bl: BoundaryLayer) -> (f64, f64) {
    let l = reynolds_chord.log10();
    match bl {
        BoundaryLayer::Tripped => {
            let delta = 10f64.powf(1.892 - 0.9045 * l + 0.0596 * l * l) * chord;
            let dstar = if reynolds_chord <= 0.3e6 {
                0.0601 * reynolds_chord.powf(-0.114)
            } else {
                10f64.powf(3.411 - 1.5397 * l + 0.1059 * l * l)
            } * chord;
            (delta, dstar)
        }
        BoundaryLayer::Untripped => {
            let delta = 10f64.powf(1.6569 - 0.9045 * l + 0.0596 * l * l) * chord;
            let dstar = 10f64.powf(3.0187 - 1.5397 * l + 0.1059 * l * l) * chord;
            (delta, dstar)
        }
    }
}

/// Pressure- and suction-side displacement thicknesses at α* (deg ≥ 0).
pub fn displacement_thickness(
    reynolds_chord: f64,
    chord: f64,
    alpha: f64,
    bl: BoundaryLayer,
) -> (f64, f64) {
    let (_, d0) = zero_incidence_thickness(reynolds_chord, chord, bl);
    let pressure = d0 * 10f64.powf(-0.0432 * alpha + 0.00113 * alpha * alpha);
    let suction = d0
        * match bl {
            BoundaryLayer::Tripped => {
                if alpha <= 5.0 {
                    10f64.powf(0.0679 * alpha)
                } else if alpha <= 12.5 {
                    0.381 * 10f64.powf(0.1516 * alpha)
                } else {
                    14.296 * 10f64.powf(0.0258 * alpha)
                }
            }
            BoundaryLayer::Untripped => {
                if alpha <= 7.5 {
                    10f64.powf(0.0679 * alpha)
                } else if alpha <= 12.5 {
                    0.0162 * 10f64.powf(0.3066 * alpha)
                } else {
                    52.42 * 10f64.powf(0.0258 * alpha)
                }
            }
        };
    (pressure, suction)
}

fn a_min(a: f64) -> f64 {
    if a < 0.204 {
        (67.552 - 886.788 * a * a).sqrt() - 8.219
    } else if a <= 0.244 {
        -32.665 * a + 3.981
    } else {
        -142.795 * a.powi(3) + 103.656 * a * a - 57.757 * a + 6.006
    }
}

fn a_max(a: f64) -> f64 {
    if a < 0.13 {
        (67.552 - 886.788 * a * a).sqrt() - 8.219
    } else if a <= 0.321 {
        -15.901 * a + 1.098
    } else {
        -4.669 * a.powi(3) + 3.491 * a * a - 16.699 * a + 1.149
    }
}

fn a0(reynolds_chord: f64) -> f64 {
    if reynolds_chord < 9.52e4 {
        0.57
    } else if reynolds_chord <= 8.57e5 {
        -9.57e-13 * (reynolds_chord - 8.57e5).powi(2) + 1.13
    } else {
        1.13
    }
}

/// Spectral shape A for Strouhal ratio `st_ratio` at chord Reynolds number.
pub fn spectrum_a(st_ratio: f64, reynolds_chord: f64) -> f64 {
    let a = st_ratio.log10().abs();
    let a0 = a0(reynolds_chord);
    let ar = (-20.0 - a_min(a0)) / (a_max(a0) - a_min(a0));
    a_min(a) + ar * (a_max(a) - a_min(a))
}

fn b_min(b: f64) -> f64 {
    if b < 0.13 {
        (16.888 - 886.788 * b * b).sqrt() - 4.109
    } else if b <= 0.145 {
        -83.607 * b + 8.138
    } else {
        -817.810 * b.powi(3) + 355.210 * b * b - 135.024 * b + 10.619
    }
}

fn b_max(b: f64) -> f64 {
    if b < 0.10 {
        (16.888 - 886.788 * b * b).sqrt() - 4.109
    } else if b <= 0.187 {
        -31.330 * b + 1.854
    } else {
        -80.541 * b.powi(3) + 44.174 * b * b - 39.381 * b + 2.344
    }
}

fn b0(reynolds_chord: f64) -> f64 {
    if reynolds_chord < 9.52e4 {
        0.30
    } else if reynolds_chord <= 8.57e5 {
        -4.48e-13 * (reynolds_chord - 8.57e5).powi(2) + 0.56
    } else {
        0.56
    }
}

/// Spectral shape B of the separation term.
pub fn spectrum_b(st_ratio: f64, reynolds_chord: f64) -> f64 {
    let b = st_ratio.log10().abs();
    let b0 = b0(reynolds_chord);
    let br = (-20.0 - b_min(b0)) / (b_max(b0) - b_min(b0));
    b_min(b) + br * (b_max(b) - b_min(b))
}

/// Amplitude function K₁.
pub fn k1(reynolds_chord: f64) -> f64 {
    if reynolds_chord < 2.47e5 {
        -4.31 * reynolds_chord.log10() + 156.3
    } else if reynolds_chord <= 8.0e5 {
        -9.0 * reynolds_chord.log10() + 181.6
    } else {
        128.5
    }
}

/// Pressure-side amplitude correction ΔK₁.
pub fn delta_k1(alpha: f64, reynolds_dstar_pressure: f64) -> f64 {
    if reynolds_dstar_pressure <= 5000.0 {
        alpha * (1.43 * reynolds_dstar_pressure.log10() - 5.29)
    } else {
        0.0
    }
}

/// Angle-dependent separation parameters (γ, γ₀, β, β₀), deg / dB.
fn k2_params(mach: f64) -> (f64, f64, f64, f64) {
    (
        27.094 * mach + 3.31,
        23.43 * mach + 4.651,
        72.65 * mach + 10.74,
        -34.19 * mach - 13.82,
    )
}

/// Amplitude function K₂ of the separation term.
pub fn k2(alpha: f64, mach: f64, reynolds_chord: f64) -> f64 {
    let (gamma, gamma0, beta, beta0) = k2_params(mach);
    let extra = if alpha < gamma0 - gamma {
        -1000.0
    } else if alpha <= gamma0 + gamma {
        (beta * beta - (beta / gamma).powi(2) * (alpha - gamma0).powi(2)).max(0.0).sqrt() + beta0
    } else {
        -12.0
    };
    k1(reynolds_chord) + extra
}

/// Separation Strouhal number St₂ relative to St₁.
fn st2(st1: f64, alpha: f64) -> f64 {
    if alpha < 1.33 {
        st1
    } else if alpha <= 12.5 {
        st1 * 10f64.powf(0.0054 * (alpha - 1.33).powi(2))
    } else {
        4.72 * st1
    }
}

/// Stall switch: above this α* only the separation term remains.
pub fn stall_switch_angle(mach: f64) -> f64 {
    let (_, gamma0, _, _) = k2_params(mach);
    gamma0.min(12.5)
}

/// Per-band trailing-edge levels of one segment, without D̄/re².
///
/// Negative angles of attack are mirrored (the correlations describe a
/// symmetric section), so only |α| enters.
pub fn segment_shape(
    flow: &SegmentFlow,
    medium: &Medium,
    bl: BoundaryLayer,
    bands: &[f64],
    p_ref: f64,
) -> SegmentShape {
    let mut alpha = flow.alpha.abs();
    let alpha_clamped = alpha > MAX_ALPHA_DEG;
    alpha = alpha.min(MAX_ALPHA_DEG);

    if !(flow.u > 0.0 && flow.span > 0.0 && flow.chord > 0.0) {
        return SegmentShape {
            shape_msp: vec![0.0; bands.len()],
            directivity: DirectivityKind::HighFrequency,
            alpha_clamped,
            delta_star_pressure: 0.0,
            delta_star_suction: 0.0,
        };
    }

    let mach = flow.u / medium.sound_speed;
    let rc = flow.u * flow.chord / medium.kinematic_viscosity;
    let (dp, ds) = displacement_thickness(rc, flow.chord, alpha, bl);
    let r_dp = flow.u * dp / medium.kinematic_viscosity;

    let st1 = 0.02 * mach.powf(-0.6);
    let st2 = st2(st1, alpha);
    let st1_bar = 0.5 * (st1 + st2);
    let k1 = k1(rc);
    let dk1 = delta_k1(alpha, r_dp);
    let k2 = k2(alpha, mach, rc);

    let m5l = mach.powi(5) * flow.span;
    let base_p = 10.0 * (dp * m5l).log10();
    let base_s = 10.0 * (ds * m5l).log10();
    let p2 = p_ref * p_ref;
    let to_msp = |spl: f64| p2 * 10f64.powf(spl / 10.0);

    let stalled = alpha > stall_switch_angle(mach);
    let shape_msp = bands
        .iter()
        .map(|&f| {
            let st_p = f * dp / flow.u;
            let st_s = f * ds / flow.u;
            if stalled {
                to_msp(base_s + spectrum_a(st_s / st2, 3.0 * rc) + k2)
            } else {
                let spl_p = base_p + spectrum_a(st_p / st1, rc) + (k1 - 3.0) + dk1;
                let spl_s = base_s + spectrum_a(st_s / st1_bar, rc) + (k1 - 3.0);
                let spl_a = base_s + spectrum_b(st_s / st2, rc) + k2;
                to_msp(spl_p) + to_msp(spl_s) + to_msp(spl_a)
            }
        })
        .collect();

    SegmentShape {
        shape_msp,
        directivity: if stalled {
            DirectivityKind::LowFrequency
        } else {
            DirectivityKind::HighFrequency
        },
        alpha_clamped,
        delta_star_pressure: dp,
        delta_star_suction: ds,
    }
}

/// High-frequency directivity D̄h; `mach` = 0 disables convective amplification.
pub fn directivity_high(cos_theta: f64, sin2_phi: f64, mach: f64) -> f64 {
    let mc = 0.8 * mach;
    let sin2_half = 0.5 * (1.0 - cos_theta);
    2.0 * sin2_half * sin2_phi / ((1.0 + mach * cos_theta) * (1.0 + (mach - mc) * cos_theta).powi(2))
}

/// Low-frequency directivity D̄l.
pub fn directivity_low(cos_theta: f64, sin2_phi: f64, mach: f64) -> f64 {
    let sin2_theta = 1.0 - cos_theta * cos_theta;
    sin2_theta * sin2_phi / (1.0 + mach * cos_theta).powi(4)
}
