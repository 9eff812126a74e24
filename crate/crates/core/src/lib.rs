// `!(v > 0.0)` is the idiom used throughout for parameter guards: it
// rejects NaN along with non-positive values in a single comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Contact-dynamics toolkit built around an exact observation: every
//! monotone one-dimensional contact law hides a linear oscillator.
//!
//! Mapping the penetration `q` to the energy coordinate
//! `x = sqrt(2 U(q) / K)` and reparametrising time by
//! `dtau/dt = sqrt(M/m) dx/dq` turns the conservative contact equation
//! `m q'' + U'(q) = 0` into `M x'' + K x = 0` exactly, for arbitrary
//! positive reference constants `K` and `M`. The crate exploits that
//! structure three ways:
//!
//! * [`regularize`] performs the coordinate and time maps and converts
//!   simulated trajectories into the virtual harmonic space;
//! * [`damping`] implements the unique physical damping profile
//!   `C(q) ~ U'/sqrt(U)` that stays a constant-coefficient dashpot in the
//!   virtual space, giving velocity-independent restitution;
//! * [`stability`] turns the virtual oscillator's central-difference
//!   stability limit into a closed-form safe timestep for the physical
//!   nonlinear contact.
//!
//! [`potentials`] supplies the contact-law abstraction with power-law,
//! volumetric-ellipsoid and tabulated families; [`action_angle`] computes
//! the action variable and the contact duration `T = 2 pi dJ/dE`;
//! [`dynamics`] contains the reference and velocity-Verlet integrators.

pub mod action_angle;
pub mod damping;
pub mod dynamics;
pub mod error;
pub mod potentials;
pub mod quadrature;
pub mod regularize;
pub mod stability;
pub mod trajectory;

pub use action_angle::ActionAngleReport;
pub use damping::DampingSpec;
pub use dynamics::{DampingLaw, ImpactScenario};
pub use error::{Error, Result};
pub use potentials::{
    ContactPotential, PowerLawPotential, TabulatedPotential, VolumetricEllipsoidPotential,
};
pub use regularize::ReferenceConstants;
pub use stability::{Regime, StabilityReport};
pub use trajectory::{Trajectory, TransformedTrajectory};
