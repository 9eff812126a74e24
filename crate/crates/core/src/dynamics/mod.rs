//! Contact-trajectory simulation.
//!
//! * [`simulate_reference`] — adaptive Dormand–Prince 5(4) with dense
//!   output and exit-event location; the high-accuracy oracle.
//! * [`simulate_verlet`] — fixed-step velocity Verlet used by the
//!   stability experiments.
//! * [`analytic_damped_oscillator`] — closed-form underdamped solution of
//!   the virtual system `M x'' + C0 x' + K x = 0` for comparison against
//!   transformed trajectories.

mod dopri;
mod verlet;

pub use verlet::{linear_oscillator_amplification, simulate_verlet, VerletRun, VerletTermination};

use crate::action_angle;
use crate::damping::DampingSpec;
use crate::error::{Error, Result};
use crate::potentials::ContactPotential;
use crate::regularize::ReferenceConstants;
use crate::trajectory::{Trajectory, TrajectorySample, TransformedSample, TransformedTrajectory};
use std::sync::Arc;

/// Physical damping profile attached to a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingLaw {
    /// `C(q) = C0 sqrt(m/M) U'(q) / sqrt(2 K U(q))`: the unique profile
    /// that stays constant in the virtual coordinates.
    Universal(DampingSpec),
    /// Constant physical dashpot `C(q) = c`; kept as the counterexample
    /// profile whose transformed coefficient is not constant.
    ConstantPhysical(f64),
}

/// One-dimensional normal impact: a particle of mass `m` enters the
/// contact at `q = 0` with speed `v0 > 0`.
#[derive(Clone)]
pub struct ImpactScenario {
    pot: Arc<dyn ContactPotential>,
    m: f64,
    v0: f64,
    refs: ReferenceConstants,
    damping: Option<DampingLaw>,
}

impl ImpactScenario {
    pub fn new(
        pot: Arc<dyn ContactPotential>,
        m: f64,
        v0: f64,
        refs: ReferenceConstants,
    ) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {m}"
            )));
        }
        if !(v0 > 0.0) || !v0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "impact speed must be positive and finite, got {v0}"
            )));
        }
        Ok(Self {
            pot,
            m,
            v0,
            refs,
            damping: None,
        })
    }

    /// Attaches the universal damping law with virtual coefficient `c0`.
    pub fn with_universal_damping(mut self, c0: f64) -> Result<Self> {
        let spec = DampingSpec::new(c0, self.refs, self.m)?;
        self.damping = if c0 > 0.0 {
            Some(DampingLaw::Universal(spec))
        } else {
            None
        };
        Ok(self)
    }

    /// Attaches a constant physical dashpot (the non-universal profile).
    pub fn with_constant_damping(mut self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "physical damping must be non-negative and finite, got {c}"
            )));
        }
        self.damping = if c > 0.0 {
            Some(DampingLaw::ConstantPhysical(c))
        } else {
            None
        };
        Ok(self)
    }

    pub fn potential(&self) -> &dyn ContactPotential {
        self.pot.as_ref()
    }

    pub fn potential_arc(&self) -> Arc<dyn ContactPotential> {
        Arc::clone(&self.pot)
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn impact_speed(&self) -> f64 {
        self.v0
    }

    pub fn refs(&self) -> ReferenceConstants {
        self.refs
    }

    pub fn damping(&self) -> Option<DampingLaw> {
        self.damping
    }

    /// Impact kinetic energy `m v0^2 / 2`.
    pub fn impact_energy(&self) -> f64 {
        0.5 * self.m * self.v0 * self.v0
    }

    /// Checks that the impact energy is attainable by the potential.
    pub fn validate(&self) -> Result<()> {
        let limit = self.pot.domain_limit();
        if limit.is_finite() {
            let u_max = self.pot.energy(limit);
            if self.impact_energy() > u_max {
                return Err(Error::EnergyOutOfRange {
                    energy: self.impact_energy(),
                    max: u_max,
                });
            }
        }
        Ok(())
    }
}

/// Restoring force on the particle with a smooth odd extension below zero.
///
/// The physical contact ends at `q = 0`; integrator stages may probe
/// slightly past it, and the odd extension keeps the right-hand side `C^1`
/// there so the dense output stays accurate through the exit crossing.
pub(crate) fn contact_force(pot: &dyn ContactPotential, q: f64) -> f64 {
    if q >= 0.0 {
        -pot.force(q)
    } else {
        pot.force(-q)
    }
}

/// Damping coefficient at `q > 0` for the scenario's law, `None` when the
/// scenario is conservative. At `q <= 0` the damping force is taken as
/// zero by continuous extension.
pub(crate) fn damping_coefficient(scn: &ImpactScenario, q: f64) -> Option<f64> {
    match scn.damping? {
        DampingLaw::Universal(spec) => Some(
            spec.universal_coefficient(scn.potential(), q)
                .unwrap_or(0.0),
        ),
        DampingLaw::ConstantPhysical(c) => Some(c),
    }
}

/// Integration controls for [`simulate_reference_with`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of uniformly spaced output samples (entry and exit included).
    pub n_samples: usize,
    /// Exit-search budget as a multiple of the conservative duration.
    pub max_time_factor: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-13,
            n_samples: 2000,
            max_time_factor: 10.0,
        }
    }
}

/// High-accuracy reference simulation of one contact, from entry to the
/// located `q = 0` exit crossing, sampled uniformly in time.
pub fn simulate_reference(scn: &ImpactScenario, rtol: f64, atol: f64) -> Result<Trajectory> {
    simulate_reference_with(
        scn,
        IntegrationOptions {
            rtol,
            atol,
            ..Default::default()
        },
    )
}

/// [`simulate_reference`] with explicit sampling and budget controls.
pub fn simulate_reference_with(
    scn: &ImpactScenario,
    opts: IntegrationOptions,
) -> Result<Trajectory> {
    if !(opts.rtol >= 1e-14) || !(opts.atol >= 1e-14) {
        return Err(Error::InvalidParameter(format!(
            "tolerances below 1e-14 are not resolvable (rtol = {}, atol = {})",
            opts.rtol, opts.atol
        )));
    }
    if opts.n_samples < 4 {
        return Err(Error::InvalidParameter(
            "need at least 4 output samples".into(),
        ));
    }
    scn.validate()?;

    let pot = scn.potential();
    let m = scn.mass();
    let t_max = opts.max_time_factor * action_angle::contact_duration(pot, m, scn.impact_energy())?;

    let rhs = |_t: f64, y: [f64; 2]| {
        let q = y[0];
        let qdot = y[1];
        let mut f = contact_force(pot, q);
        if q > 0.0 {
            if let Some(c) = damping_coefficient(scn, q) {
                f -= c * qdot;
            }
        }
        [qdot, f / m]
    };

    let sol = dopri::integrate_until_down_crossing(
        rhs,
        [0.0, scn.impact_speed()],
        t_max,
        opts.rtol,
        opts.atol,
        |y| y[0],
    )?;

    let duration = sol.t_end;
    let exit_speed = sol.y_end[1].abs();
    let n = opts.n_samples;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = duration * i as f64 / (n - 1) as f64;
        let y = sol.eval(t);
        let q = y[0].max(0.0);
        samples.push(TrajectorySample {
            t,
            q,
            qdot: y[1],
            energy: 0.5 * m * y[1] * y[1] + pot.energy(q),
        });
    }
    Ok(Trajectory {
        samples,
        exit_speed,
        duration,
    })
}

/// Exact underdamped solution of `M x'' + C0 x' + K x = 0` with
/// `x(0) = 0`, `x'(0) = sqrt(2 E / M)`, sampled uniformly in `tau` over
/// the half period `pi / omega_d` of the damped frequency.
pub fn analytic_damped_oscillator(
    refs: ReferenceConstants,
    c0: f64,
    energy: f64,
    n_samples: usize,
) -> Result<TransformedTrajectory> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "energy must be positive and finite, got {energy}"
        )));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 output samples".into(),
        ));
    }
    let zeta = c0 / (2.0 * (refs.stiffness() * refs.mass()).sqrt());
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::OverdampedUnsupported { zeta });
    }
    let omega0 = refs.omega0();
    let omega_d = omega0 * (1.0 - zeta * zeta).sqrt();
    let v0 = (2.0 * energy / refs.mass()).sqrt();
    let tau_end = std::f64::consts::PI / omega_d;

    let samples = (0..n_samples)
        .map(|i| {
            let tau = tau_end * i as f64 / (n_samples - 1) as f64;
            let decay = (-zeta * omega0 * tau).exp();
            let (sin, cos) = (omega_d * tau).sin_cos();
            let x = v0 / omega_d * decay * sin;
            let x_prime = v0 * decay * (cos - zeta * omega0 / omega_d * sin);
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{PowerLawPotential, VolumetricEllipsoidPotential};
    use approx::assert_relative_eq;

    fn table1_scenario(v0: f64) -> ImpactScenario {
        let pot =
            Arc::new(VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap());
        let refs = ReferenceConstants::new(1.0, 0.75).unwrap();
        ImpactScenario::new(pot, 0.05, v0, refs).unwrap()
    }

    #[test]
    fn linear_spring_half_cycle() {
        let pot = Arc::new(PowerLawPotential::new(1.0, 1.0).unwrap());
        let refs = ReferenceConstants::new(1.0, 1.0).unwrap();
        let scn = ImpactScenario::new(pot, 1.0, 1.0, refs).unwrap();
        let traj = simulate_reference(&scn, 1e-13, 1e-13).unwrap();
        assert_relative_eq!(traj.duration, std::f64::consts::PI, max_relative = 1e-11);
        assert_relative_eq!(traj.exit_speed, 1.0, max_relative = 1e-11);
        let q_peak = traj.samples.iter().map(|s| s.q).fold(0.0_f64, f64::max);
        assert_relative_eq!(q_peak, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn ellipsoid_reference_peak_penetration_and_exit() {
        let scn = table1_scenario(0.99);
        let traj = simulate_reference(&scn, 1e-13, 1e-13).unwrap();
        let q_peak = traj.samples.iter().map(|s| s.q).fold(0.0_f64, f64::max);
        assert_relative_eq!(q_peak, 6.706989e-3, max_relative = 1e-5);
        assert_relative_eq!(traj.exit_speed, 0.99, max_relative = 1e-9);
    }

    #[test]
    fn conservative_energy_drift_within_budget() {
        let scn = table1_scenario(1.5);
        let traj = simulate_reference(&scn, 1e-13, 1e-13).unwrap();
        let e0 = scn.impact_energy();
        let drift = traj
            .samples
            .iter()
            .map(|s| (s.energy - e0).abs() / e0)
            .fold(0.0_f64, f64::max);
        assert!(drift < 1e-11, "max drift {drift:.3e}");
    }

    #[test]
    fn damped_energy_is_nonincreasing() {
        let scn = table1_scenario(0.99).with_universal_damping(0.5).unwrap();
        let traj = simulate_reference(&scn, 1e-13, 1e-13).unwrap();
        let mut prev = f64::INFINITY;
        for s in &traj.samples {
            assert!(s.energy <= prev * (1.0 + 1e-11));
            prev = s.energy;
        }
        assert!(traj.exit_speed < 0.99);
    }

    #[test]
    fn restitution_matches_prediction() {
        let scn = table1_scenario(0.99).with_universal_damping(0.5).unwrap();
        let spec = DampingSpec::new(0.5, scn.refs(), scn.mass()).unwrap();
        let traj = simulate_reference(&scn, 1e-13, 1e-13).unwrap();
        let e_sim = traj.exit_speed / 0.99;
        assert_relative_eq!(
            e_sim,
            spec.predicted_restitution().unwrap(),
            max_relative = 1e-5
        );
    }

    #[test]
    fn analytic_oscillator_limits() {
        let refs = ReferenceConstants::new(1.0, 0.75).unwrap();
        // conservative: perfect half ellipse, energy exact at all samples
        let cons = analytic_damped_oscillator(refs, 0.0, 0.0245025, 501).unwrap();
        for s in &cons.samples {
            assert_relative_eq!(s.harmonic_energy, 0.0245025, max_relative = 1e-12);
            assert!(s.x >= -1e-12);
        }
        assert_relative_eq!(
            cons.samples.last().unwrap().x_prime,
            -(2.0 * 0.0245025 / 0.75_f64).sqrt(),
            max_relative = 1e-12
        );

        // damped: exit speed ratio equals the predicted restitution
        let spec = DampingSpec::new(0.5, refs, 0.05).unwrap();
        let damped = analytic_damped_oscillator(refs, 0.5, 0.0245025, 501).unwrap();
        let v0 = (2.0 * 0.0245025 / 0.75_f64).sqrt();
        let ratio = -damped.samples.last().unwrap().x_prime / v0;
        assert_relative_eq!(
            ratio,
            spec.predicted_restitution().unwrap(),
            max_relative = 1e-12
        );

        // log-spiral: the rotated radius decays exactly exponentially
        let zeta = spec.ratio();
        let omega0 = refs.omega0();
        let omega_d = omega0 * (1.0 - zeta * zeta).sqrt();
        let r0 = v0;
        for s in &damped.samples {
            let r = ((omega_d * s.x).powi(2) + (s.x_prime + zeta * omega0 * s.x).powi(2)).sqrt();
            let expected = r0 * (-zeta * omega0 * s.tau).exp();
            assert_relative_eq!(r, expected, max_relative = 1e-9);
        }

        let over = analytic_damped_oscillator(refs, 5.0, 1.0, 10);
        assert!(matches!(over, Err(Error::OverdampedUnsupported { .. })));
    }

    #[test]
    fn rejects_unattainable_impact_energy() {
        let scn = table1_scenario(50.0);
        assert!(matches!(
            simulate_reference(&scn, 1e-12, 1e-12),
            Err(Error::EnergyOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_unresolvable_tolerances() {
        let scn = table1_scenario(0.5);
        assert!(simulate_reference(&scn, 1e-15, 1e-13).is_err());
    }

    #[test]
    fn deterministic_repeated_runs() {
        let scn = table1_scenario(0.99).with_universal_damping(0.5).unwrap();
        let a = simulate_reference(&scn, 1e-12, 1e-12).unwrap();
        let b = simulate_reference(&scn, 1e-12, 1e-12).unwrap();
        assert_eq!(a, b);
    }
}
