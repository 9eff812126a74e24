//! Error type shared by every module of the crate.

use crate::stability::Regime;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Penetration outside the potential's valid range.
    #[error("q = {q} m is outside the potential domain [0, {limit}] m")]
    Domain { q: f64, limit: f64 },

    /// Requested energy cannot be stored by the potential.
    #[error("energy {energy} J is not attainable (maximum {max} J)")]
    EnergyOutOfRange { energy: f64, max: f64 },

    /// A probe detected a violation of the monotonicity conditions.
    #[error("potential violates monotonicity near q = {q} m")]
    InvalidPotential { q: f64 },

    /// Virtual displacement maps past the attainable energy range.
    #[error("virtual displacement x = {x} exceeds the attainable range (maximum U = {max} J)")]
    Range { x: f64, max: f64 },

    /// Trajectory time samples must be strictly increasing.
    #[error("trajectory time is not strictly increasing at sample {index}")]
    NonMonotonicTime { index: usize },

    /// Too few samples for the requested reconstruction.
    #[error("operation needs at least {needed} trajectory samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    /// Adaptive quadrature refinement stalled.
    #[error("quadrature failed to converge: {context}")]
    QuadratureFailure { context: String },

    /// Restitution prediction and the analytic oscillator require zeta < 1.
    #[error("damping ratio {zeta} is not underdamped (require zeta < 1)")]
    OverdampedUnsupported { zeta: f64 },

    /// The transformation gradient diverges at contact onset; no finite bound exists.
    #[error("transformation gradient diverges at contact onset; timestep bound is degenerate")]
    DegenerateBound,

    /// Operation called outside its supported geometric regime.
    #[error("operation requires the {expected:?} regime, found {found:?}")]
    RegimeMismatch { expected: Regime, found: Regime },

    /// The integrator never found the contact exit crossing.
    #[error("no contact exit detected within t = {t_max} s")]
    NoExitDetected { t_max: f64 },

    /// Adaptive step control collapsed below machine resolution.
    #[error("step size underflow at t = {t} s")]
    StepSizeUnderflow { t: f64 },

    /// Constructor or argument validation failure.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
