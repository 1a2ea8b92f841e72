//! Mean-field model of a driven optomechanical cavity that holds a
//! Bose-Einstein condensate and a movable end mirror, with a transverse pump
//! acting on the condensate.
//!
//! * [`params`]: parameter sets, units, presets and derived coefficients.
//! * [`steady_state`]: the photon-number cubic, branch stability, sweeps and
//!   hysteresis.
//! * [`dynamics`]: adiabatic (4D) and full mean-field (6D) equations of motion.
//! * [`potential`]: effective potential surface, critical points and the
//!   photon-number potential.
//! * [`cli`]: command-line front end, run manifests and CSV output.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod params;
pub mod potential;
pub mod steady_state;

pub use error::{Error, Result};
pub use params::{Axis, DerivedCoefficients, SignConvention, SystemParams};
