//! Open-loop individual pitch control.
//!
//! Each blade follows a two-branch hyperbolic-tangent law of its own
//! azimuth Ψ (0 = blade pointing up):
//!
//! ```text
//! θ(Ψ) = θ₁ + ½(θ₂ − θ₁)(1 + tanh((Ψ − Ψ₁)k))   Ψ ≤ Ψc
//! θ(Ψ) = θ₂ + ½(θ₁ − θ₂)(1 + tanh((Ψ − Ψ₂)k))   Ψ > Ψc
//! ```
//!
//! with Ψc = (Ψ₁ + Ψ₂)/2. The steepness is bounded by the actuator rate,
//! `k ≤ θ̇max / (Ω Δθ)`, and the window must be wide enough for the pitch to
//! reach the target fraction of Δθ: `ΔΨ ≥ (2ΩΔθ/θ̇max) atanh(0.95)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::config::TurbineConfig;
use crate::error::{Error, Result};

/// Fraction of Δθ that the law must reach at Ψc.
pub const DEFAULT_REACH_THRESHOLD: f64 = 0.95;

/// Wraps an angle to [0, 2π).
pub fn wrap_angle(psi: f64) -> f64 {
    let w = psi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Actuation limits a law is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchLimits {
    /// rad/s
    pub omega: f64,
    /// deg/s
    pub max_pitch_rate: f64,
    /// Fraction of Δθ that must be reached at Ψc.
    pub reach_threshold: f64,
}

impl PitchLimits {
    /// Rated rotor speed and pitch-rate limit of a turbine.
    pub fn for_turbine(turbine: &TurbineConfig) -> Self {
        PitchLimits {
            omega: turbine.rated_omega(),
            max_pitch_rate: turbine.max_pitch_rate,
            reach_threshold: DEFAULT_REACH_THRESHOLD,
        }
    }

    pub fn k_max(&self, delta_theta: f64) -> Result<f64> {
        if !(delta_theta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pitch jump must be positive, got {delta_theta}°"
            )));
        }
        Ok(self.max_pitch_rate / (self.omega * delta_theta))
    }

    pub fn delta_psi_min(&self, delta_theta: f64) -> Result<f64> {
        if !(delta_theta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pitch jump must be positive, got {delta_theta}°"
            )));
        }
        Ok(2.0 * self.omega * delta_theta / self.max_pitch_rate * self.reach_threshold.atanh())
    }
}

/// Maximum transition steepness (1/rad of azimuth) allowed by the turbine's
/// pitch-rate limit at rated rotor speed.
pub fn k_max(turbine: &TurbineConfig, delta_theta: f64) -> Result<f64> {
    PitchLimits::for_turbine(turbine).k_max(delta_theta)
}

/// Minimum phase width (rad) for the law to reach 95% of the pitch jump.
pub fn delta_psi_min(turbine: &TurbineConfig, delta_theta: f64) -> Result<f64> {
    PitchLimits::for_turbine(turbine).delta_psi_min(delta_theta)
}

/// Parameters of the tanh pitch law. Angles Ψ in rad, pitch θ in deg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchLaw {
    theta1: f64,
    theta2: f64,
    psi1: f64,
    psi2: f64,
    k: f64,
}

/// The two schemes evaluated on the reference turbines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedScheme {
    /// Δθ = 3°, ΔΨ = 120°
    Ipc1,
    /// Δθ = 5°, ΔΨ = 150°
    Ipc2,
}

impl NamedScheme {
    pub fn delta_theta(self) -> f64 {
        match self {
            NamedScheme::Ipc1 => 3.0,
            NamedScheme::Ipc2 => 5.0,
        }
    }

    pub fn delta_psi_deg(self) -> f64 {
        match self {
            NamedScheme::Ipc1 => 120.0,
            NamedScheme::Ipc2 => 150.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NamedScheme::Ipc1 => "IPC1",
            NamedScheme::Ipc2 => "IPC2",
        }
    }
}

/// Central phase of both named schemes: middle of the downward quarter.
pub const SCHEME_PSI_C_DEG: f64 = 135.0;

impl PitchLaw {
    /// Builds a law from its window centre and width, without rate checks.
    ///
    /// `psi_c` is wrapped to [0, 2π); `delta_psi` must lie in (0, 2π).
    /// Windows that cross 0/2π are allowed, so Ψ₁ may be negative and Ψ₂
    /// may exceed 2π.
    pub fn from_window(theta1: f64, theta2: f64, psi_c: f64, delta_psi: f64, k: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite()) {
            return Err(Error::InvalidArgument("pitch values must be finite".into()));
        }
        if !(delta_psi > 0.0 && delta_psi < TAU) {
            return Err(Error::InvalidArgument(format!(
                "phase width must lie in (0, 2π), got {delta_psi} rad"
            )));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("steepness k must be positive, got {k}")));
        }
        let psi_c = wrap_angle(psi_c);
        Ok(PitchLaw {
            theta1,
            theta2,
            psi1: psi_c - 0.5 * delta_psi,
            psi2: psi_c + 0.5 * delta_psi,
            k,
        })
    }

    /// Builds a law from explicit window edges Ψ₁ < Ψ₂ in [0, 2π).
    pub fn new(theta1: f64, theta2: f64, psi1: f64, psi2: f64, k: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&psi1) || !(0.0..TAU).contains(&psi2) || psi1 >= psi2 {
            return Err(Error::InvalidArgument(format!(
                "phase window needs 0 ≤ Ψ₁ < Ψ₂ < 2π, got [{psi1}, {psi2}]"
            )));
        }
        Self::from_window(theta1, theta2, 0.5 * (psi1 + psi2), psi2 - psi1, k)
    }

    /// Builds a law and rejects it unless both actuation bounds hold.
    pub fn new_feasible(
        theta1: f64,
        theta2: f64,
        psi_c: f64,
        delta_psi: f64,
        k: f64,
        limits: &PitchLimits,
    ) -> Result<Self> {
        let law = Self::from_window(theta1, theta2, psi_c, delta_psi, k)?;
        law.check_feasible(limits)?;
        Ok(law)
    }

    /// One of the named schemes: θ₁ = rated pitch, k = k_max.
    pub fn named(turbine: &TurbineConfig, scheme: NamedScheme) -> Result<Self> {
        let limits = PitchLimits::for_turbine(turbine);
        let dtheta = scheme.delta_theta();
        let k = limits.k_max(dtheta)?;
        Self::new_feasible(
            turbine.rated_pitch,
            turbine.rated_pitch + dtheta,
            SCHEME_PSI_C_DEG.to_radians(),
            scheme.delta_psi_deg().to_radians(),
            k,
            &limits,
        )
    }

    pub fn check_feasible(&self, limits: &PitchLimits) -> Result<()> {
        let dtheta = self.delta_theta().abs();
        if dtheta == 0.0 {
            return Ok(());
        }
        let k_max = limits.k_max(dtheta)?;
        // relative slack for parameters computed as k_max themselves
        if self.k > k_max * (1.0 + 1e-12) {
            return Err(Error::Infeasible(format!(
                "steepness k = {:.6} rad⁻¹ exceeds the pitch-rate bound k_max = θ̇max/(ΩΔθ) = {:.6} rad⁻¹",
                self.k, k_max
            )));
        }
        let psi_min = limits.delta_psi_min(dtheta)?;
        if self.delta_psi() < psi_min * (1.0 - 1e-12) {
            return Err(Error::Infeasible(format!(
                "phase width ΔΨ = {:.2}° is below ΔΨmin = (2ΩΔθ/θ̇max)·atanh({}) = {:.2}°",
                self.delta_psi().to_degrees(),
                limits.reach_threshold,
                psi_min.to_degrees()
            )));
        }
        Ok(())
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }
    pub fn theta2(&self) -> f64 {
        self.theta2
    }
    pub fn psi1(&self) -> f64 {
        self.psi1
    }
    pub fn psi2(&self) -> f64 {
        self.psi2
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn psi_c(&self) -> f64 {
        0.5 * (self.psi1 + self.psi2)
    }
    pub fn delta_psi(&self) -> f64 {
        self.psi2 - self.psi1
    }
    pub fn delta_theta(&self) -> f64 {
        self.theta2 - self.theta1
    }

    /// Pitch (deg) at local blade azimuth `psi` (rad, any value; wrapped).
    pub fn pitch_at(&self, psi: f64) -> f64 {
        let psi_c = self.psi_c();
        // local frame centred on Ψc, so windows may straddle 0/2π
        let mut offset = wrap_angle(psi) - psi_c;
        if offset > PI {
            offset -= TAU;
        } else if offset <= -PI {
            offset += TAU;
        }
        let local = psi_c + offset;
        if local <= psi_c {
            self.theta1 + 0.5 * (self.theta2 - self.theta1) * (1.0 + ((local - self.psi1) * self.k).tanh())
        } else {
            self.theta2 + 0.5 * (self.theta1 - self.theta2) * (1.0 + ((local - self.psi2) * self.k).tanh())
        }
    }

    /// The rate bound Ω·k·|Δθ| (deg/s) used to size k.
    ///
    /// This bounds the law's time derivative from above; the actual peak
    /// is [`PitchLaw::peak_pitch_rate`].
    pub fn max_pitch_rate(&self, omega: f64) -> f64 {
        omega * self.k * self.delta_theta().abs()
    }

    /// Exact maximum of |dθ/dt| (deg/s) over a revolution.
    ///
    /// Each branch has slope ½kΔθ·sech²(k(Ψ − Ψᵢ)), which peaks at its
    /// window edge Ψᵢ; both edges always lie inside their own branch.
    pub fn peak_pitch_rate(&self, omega: f64) -> f64 {
        0.5 * omega * self.k * self.delta_theta().abs()
    }
}

/// Pitch strategy applied to every blade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PitchStrategy {
    /// Collective constant pitch, deg.
    Constant(f64),
    Ipc(PitchLaw),
}

impl PitchStrategy {
    pub fn pitch_at(&self, psi: f64) -> f64 {
        match self {
            PitchStrategy::Constant(theta) => *theta,
            PitchStrategy::Ipc(law) => law.pitch_at(psi),
        }
    }
}
