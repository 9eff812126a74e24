//! Exact energy-coordinate harmonic regularisation.
//!
//! For any valid contact potential and arbitrary positive reference
//! constants `K` (virtual stiffness) and `M` (virtual mass), the coordinate
//!
//! ```text
//! x(q) = sqrt(2 U(q) / K)
//! ```
//!
//! together with the reparametrised time `dtau/dt = sqrt(M/m) dx/dq`
//! turns the conservative contact motion into the exact linear oscillator
//! `M x'' + K x = 0` with frequency `Omega_0 = sqrt(K/M)`. The constants
//! are arbitrary: they cancel in every physical prediction derived from
//! the transformation.
//!
//! This module provides the coordinate map, its inverse, the time
//! gradient, the position-dependent effective mass of the untransformed
//! lift, and the conversion of sampled physical trajectories into the
//! virtual coordinates.

use crate::error::{Error, Result};
use crate::potentials::{turning_point, ContactPotential};
use crate::quadrature::cumulative_path_integral;
use crate::trajectory::{Trajectory, TransformedSample, TransformedTrajectory};

/// Virtual reference stiffness and mass of the regularised oscillator.
///
/// Both constants are strictly positive; the natural frequency
/// `Omega_0 = sqrt(K/M)` is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConstants {
    stiffness: f64,
    mass: f64,
}

impl ReferenceConstants {
    pub fn new(stiffness: f64, mass: f64) -> Result<Self> {
        if !(stiffness > 0.0) || !stiffness.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reference stiffness K must be positive and finite, got {stiffness}"
            )));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reference mass M must be positive and finite, got {mass}"
            )));
        }
        Ok(Self { stiffness, mass })
    }

    /// Virtual stiffness `K`.
    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    /// Virtual mass `M`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Natural frequency `Omega_0 = sqrt(K/M)` of the virtual oscillator.
    pub fn omega0(&self) -> f64 {
        (self.stiffness / self.mass).sqrt()
    }
}

/// Energy coordinate `x(q) = sqrt(2 U(q) / K)`; zero at contact onset and
/// strictly increasing with penetration.
pub fn x_of_q(pot: &dyn ContactPotential, refs: ReferenceConstants, q: f64) -> Result<f64> {
    let limit = pot.domain_limit();
    if !(0.0..=limit).contains(&q) {
        return Err(Error::Domain { q, limit });
    }
    Ok((2.0 * pot.energy(q) / refs.stiffness()).sqrt())
}

/// Inverse coordinate map: the penetration at which `U(q) = K x^2 / 2`.
pub fn q_of_x(pot: &dyn ContactPotential, refs: ReferenceConstants, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "virtual displacement must be finite and non-negative, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let target = 0.5 * refs.stiffness() * x * x;
    turning_point(pot, target).map_err(|e| match e {
        Error::EnergyOutOfRange { max, .. } => Error::Range { x, max },
        other => other,
    })
}

/// Time-reparametrisation gradient
/// `dtau/dt = sqrt(M/(m K)) U'(q) / sqrt(2 U(q))`, valid for `q > 0`.
pub fn time_gradient(
    pot: &dyn ContactPotential,
    refs: ReferenceConstants,
    m: f64,
    q: f64,
) -> Result<f64> {
    let limit = pot.domain_limit();
    if !(q > 0.0) || q > limit {
        return Err(Error::Domain { q, limit });
    }
    check_mass(m)?;
    let prefactor = (refs.mass() / (m * refs.stiffness())).sqrt();
    Ok(prefactor * pot.force(q) / (2.0 * pot.energy(q)).sqrt())
}

/// Position-dependent effective mass `M_eff = 2 m K U(q) / [U'(q)]^2` of
/// the point-canonical lift without time reparametrisation. Constant in
/// `q` exactly when `U(q)` is proportional to `q^2`.
pub fn effective_mass(
    pot: &dyn ContactPotential,
    refs: ReferenceConstants,
    m: f64,
    q: f64,
) -> Result<f64> {
    let limit = pot.domain_limit();
    if !(q > 0.0) || q > limit {
        return Err(Error::Domain { q, limit });
    }
    check_mass(m)?;
    let du = pot.force(q);
    Ok(2.0 * m * refs.stiffness() * pot.energy(q) / (du * du))
}

fn check_mass(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive and finite, got {m}"
        )));
    }
    Ok(())
}

/// Maps a sampled physical trajectory into the virtual harmonic space.
///
/// Displacements come from the exact coordinate map, velocities from the
/// exact kinematic relation `x' = sqrt(m/M) qdot`, and the virtual time
/// from cumulative Simpson quadrature of `dtau/dt` along the sample grid.
/// Samples at `q = 0` (contact start and end), where the gradient may be
/// singular, get one-sided values extrapolated from the two adjacent
/// interior samples so the quadrature never evaluates the endpoint itself.
pub fn transform_trajectory(
    pot: &dyn ContactPotential,
    refs: ReferenceConstants,
    m: f64,
    traj: &Trajectory,
) -> Result<TransformedTrajectory> {
    check_mass(m)?;
    let n = traj.samples.len();
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    for (i, pair) in traj.samples.windows(2).enumerate() {
        if pair[1].t <= pair[0].t {
            return Err(Error::NonMonotonicTime { index: i + 1 });
        }
    }

    let ts: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
    let mut gradient = vec![0.0; n];
    for (g, s) in gradient.iter_mut().zip(&traj.samples) {
        if s.q > 0.0 {
            *g = time_gradient(pot, refs, m, s.q)?;
        } else if s.q < 0.0 {
            return Err(Error::Domain {
                q: s.q,
                limit: pot.domain_limit(),
            });
        }
    }
    // One-sided limits at the contact endpoints by linear extrapolation
    // from the two nearest interior samples.
    if traj.samples[0].q <= 0.0 {
        let g = extrapolate(ts[0], (ts[1], gradient[1]), (ts[2], gradient[2]));
        gradient[0] = g.max(0.0);
    }
    if traj.samples[n - 1].q <= 0.0 {
        let g = extrapolate(
            ts[n - 1],
            (ts[n - 2], gradient[n - 2]),
            (ts[n - 3], gradient[n - 3]),
        );
        gradient[n - 1] = g.max(0.0);
    }

    let tau = cumulative_path_integral(&ts, &gradient);
    let velocity_scale = (m / refs.mass()).sqrt();

    let samples = traj
        .samples
        .iter()
        .zip(&tau)
        .map(|(s, &tau)| {
            let x = (2.0 * pot.energy(s.q.max(0.0)) / refs.stiffness()).sqrt();
            let x_prime = velocity_scale * s.qdot;
            TransformedSample {
                tau,
                x,
                x_prime,
                harmonic_energy: 0.5 * refs.mass() * x_prime * x_prime
                    + 0.5 * refs.stiffness() * x * x,
            }
        })
        .collect();
    Ok(TransformedTrajectory { samples })
}

fn extrapolate(t: f64, (t1, g1): (f64, f64), (t2, g2): (f64, f64)) -> f64 {
    g1 + (t - t1) * (g2 - g1) / (t2 - t1)
}
