//! Deterministic mmWave urban-deployment simulator and planner.
//!
//! Models a donor gNB macro layer complemented by four classes of smart-EM
//! nodes (IAB nodes, amplify-and-forward repeaters, reconfigurable
//! intelligent surfaces, fixed passive skins) over a synthetic 2.5D street
//! scene. Evaluates per-UE link budgets with phase-quantized
//! beamforming and wall blockage, and optimizes heterogeneous node
//! placement for cost under a coverage constraint.
//!
//! The crate is organized around the pipeline:
//!
//! - [`scenario`]: 2.5D world geometry, node placements, LoS/blockage queries
//! - [`em`]: scalar link-budget math (FSPL, noise, Shannon capacity)
//! - [`arrays`]: phased-array / RIS beam synthesis with finite phase quantization
//! - [`nodes`]: behavioral models of the five node classes
//! - [`simulate`]: grid evaluation, CDFs, blockage Monte Carlo
//! - [`plan`]: greedy + local-search placement optimization
//!
//! All randomness is seeded explicitly; identical inputs and seed produce
//! bit-identical outputs regardless of worker count.

pub mod arrays;
pub mod cli;
pub mod em;
pub mod nodes;
pub mod plan;
pub mod scenario;
pub mod simulate;

/// Errors produced by domain operations.
///
/// Most operations in this crate are total by contract (violations are data,
/// degradation is encoded in status enums); the variants here cover genuine
/// precondition failures.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("angle out of range: {0}")]
    AngleOutOfRange(String),
    #[error("surface side {side_m} m is smaller than one element pitch {pitch_m} m")]
    SurfaceTooSmall { side_m: f64, pitch_m: f64 },
    #[error("quantization bits must lie in 1..=4, got {0}")]
    InvalidBits(u8),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength in meters for a carrier frequency in Hz.
pub fn wavelength_m(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Renders a float at 9 significant digits (scientific), the fixed width
/// used by every CSV/JSON artifact so outputs diff cleanly across
/// platforms.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}
