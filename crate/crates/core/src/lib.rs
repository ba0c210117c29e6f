//! Underwater footprint of offshore wind-turbine trailing-edge noise.
//!
//! The pipeline: a steady per-blade BEM solve gives section flow states,
//! the BPM trailing-edge model turns them into ⅓-octave spectra at ring
//! observers on the rim of each blade's Snell cone, and the cone-averaged
//! level ŌSPL(t) is reduced to revolution-averaged levels, amplitude
//! modulation depth and marine-mammal weighted levels.

// `!(x > 0.0)` style guards are kept on purpose so NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bem;
pub mod bpm;
pub mod cli;
pub mod config;
pub mod error;
pub mod geom;
pub mod kinematics;
pub mod metrics;
pub mod noise;
pub mod output;
pub mod pitch;
pub mod scenario;
pub mod sim;
pub mod snell;
pub mod spectrum;

pub use error::{Error, Result};
