//! Fixed-step velocity-Verlet integration of a single contact, plus the
//! long-run linear-oscillator probe used to demonstrate the virtual-space
//! stability threshold.

use super::{contact_force, damping_coefficient, ImpactScenario};
use crate::error::Result;
use crate::potentials::turning_point;
use crate::trajectory::{Trajectory, TrajectorySample};

/// Why a Verlet run stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerletTermination {
    /// Contact completed: the particle reached `q <= 0` moving outward.
    Exit,
    /// Penetration exceeded the excursion cap (twice the conservative
    /// turning point, clipped to the potential domain).
    ExcursionExceeded,
    /// State stopped being finite.
    NonFinite,
    /// Ten conservative contact durations elapsed without an exit.
    Timeout,
}

/// Outcome of a fixed-step velocity-Verlet contact run.
#[derive(Debug, Clone)]
pub struct VerletRun {
    pub samples: Vec<TrajectorySample>,
    pub termination: VerletTermination,
    /// Outgoing speed magnitude at the first `q <= 0` step, when reached.
    pub exit_speed: Option<f64>,
    /// Time at termination.
    pub duration: f64,
    /// Peak of `|E(t) - E(0)| / E(0)` over recorded in-contact samples.
    pub max_energy_drift: f64,
    /// Peak penetration over the run divided by the conservative turning point.
    pub max_excursion: f64,
    /// Conservative turning point used for the excursion normalisation.
    pub q_max_reference: f64,
}

impl VerletRun {
    /// Samples as a [`Trajectory`] when the run completed a contact.
    pub fn trajectory(&self) -> Option<Trajectory> {
        let exit_speed = self.exit_speed?;
        Some(Trajectory {
            samples: self.samples.clone(),
            exit_speed,
            duration: self.duration,
        })
    }
}

/// Runs velocity Verlet through one contact at fixed step `dt`.
///
/// The force is `-U'(q)` inside the contact and zero for `q <= 0`; damped
/// scenarios add `-C(q) qdot` with the half-step velocity. The run stops
/// at the first `q <= 0` state, when the penetration leaves the excursion
/// cap, when the state stops being finite, or after ten conservative
/// durations.
pub fn simulate_verlet(scn: &ImpactScenario, dt: f64) -> Result<VerletRun> {
    scn.validate()?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(crate::error::Error::InvalidParameter(format!(
            "timestep must be positive and finite, got {dt}"
        )));
    }
    let pot = scn.potential();
    let m = scn.mass();
    let e0 = 0.5 * m * scn.impact_speed() * scn.impact_speed();
    let q_max_ref = turning_point(pot, e0)?;
    let q_cap = (2.0 * q_max_ref).min(pot.domain_limit());
    let t_budget = 10.0 * crate::action_angle::contact_duration(pot, m, e0)?;

    let accel = |q: f64, qdot: f64| -> f64 {
        let mut f = contact_force(pot, q);
        if q > 0.0 {
            if let Some(c) = damping_coefficient(scn, q) {
                f -= c * qdot;
            }
        }
        f / m
    };

    let mut t = 0.0;
    let mut q = 0.0_f64;
    let mut qdot = scn.impact_speed();
    let mut acc = accel(q, qdot);

    let mut samples = vec![TrajectorySample {
        t,
        q,
        qdot,
        energy: e0,
    }];
    let mut max_drift = 0.0_f64;
    let mut max_q = 0.0_f64;

    loop {
        let v_half = qdot + 0.5 * acc * dt;
        q += v_half * dt;
        let acc_new = accel(q, v_half);
        qdot = v_half + 0.5 * acc_new * dt;
        acc = acc_new;
        t += dt;

        if !q.is_finite() || !qdot.is_finite() {
            return Ok(VerletRun {
                samples,
                termination: VerletTermination::NonFinite,
                exit_speed: None,
                duration: t,
                max_energy_drift: f64::INFINITY,
                max_excursion: f64::INFINITY,
                q_max_reference: q_max_ref,
            });
        }

        max_q = max_q.max(q);
        let energy = 0.5 * m * qdot * qdot + pot.energy(q.max(0.0));
        samples.push(TrajectorySample { t, q, qdot, energy });

        if q <= 0.0 {
            return Ok(VerletRun {
                samples,
                termination: VerletTermination::Exit,
                exit_speed: Some(qdot.abs()),
                duration: t,
                max_energy_drift: max_drift,
                max_excursion: max_q / q_max_ref,
                q_max_reference: q_max_ref,
            });
        }
        max_drift = max_drift.max((energy - e0).abs() / e0);
        if q > q_cap {
            return Ok(VerletRun {
                samples,
                termination: VerletTermination::ExcursionExceeded,
                exit_speed: None,
                duration: t,
                max_energy_drift: max_drift,
                max_excursion: max_q / q_max_ref,
                q_max_reference: q_max_ref,
            });
        }
        if t > t_budget {
            return Ok(VerletRun {
                samples,
                termination: VerletTermination::Timeout,
                exit_speed: None,
                duration: t,
                max_energy_drift: max_drift,
                max_excursion: max_q / q_max_ref,
                q_max_reference: q_max_ref,
            });
        }
    }
}

/// Largest displacement amplification of velocity Verlet on the linear
/// virtual oscillator `M x'' = -K x` over `n_steps` of size `dtau`,
/// starting from `(x, x') = (0, 1)`.
///
/// Below the threshold `dtau = 2 / omega0` the discrete orbit stays on a
/// bounded ellipse; above it the amplification grows without bound.
pub fn linear_oscillator_amplification(omega0: f64, dtau: f64, n_steps: usize) -> f64 {
    let omega_sq = omega0 * omega0;
    let scale = 1.0 / omega0; // amplitude of the exact solution
    let mut x = 0.0_f64;
    let mut v = 1.0_f64;
    let mut acc = -omega_sq * x;
    let mut max_ratio = 0.0_f64;
    for _ in 0..n_steps {
        let v_half = v + 0.5 * acc * dtau;
        x += v_half * dtau;
        acc = -omega_sq * x;
        v = v_half + 0.5 * acc * dtau;
        max_ratio = max_ratio.max(x.abs() / scale);
        if !max_ratio.is_finite() || max_ratio > 1e12 {
            return f64::INFINITY;
        }
    }
    max_ratio
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PowerLawPotential;
    use crate::regularize::ReferenceConstants;
    use std::sync::Arc;

    fn linear_scenario() -> ImpactScenario {
        let pot = Arc::new(PowerLawPotential::new(1.0, 1.0).unwrap());
        let refs = ReferenceConstants::new(1.0, 1.0).unwrap();
        ImpactScenario::new(pot, 1.0, 1.0, refs).unwrap()
    }

    #[test]
    fn linear_contact_below_and_above_the_classical_limit() {
        let scn = linear_scenario();
        let below = simulate_verlet(&scn, 1.9).unwrap();
        assert_eq!(below.termination, VerletTermination::Exit);
        assert!(below.max_excursion <= 2.0);

        let above = simulate_verlet(&scn, 2.01).unwrap();
        assert_eq!(above.termination, VerletTermination::ExcursionExceeded);
    }

    #[test]
    fn small_step_energy_drift_scales_second_order() {
        let scn = linear_scenario();
        let drift_at = |dt: f64| simulate_verlet(&scn, dt).unwrap().max_energy_drift;
        let coarse = drift_at(0.02);
        let fine = drift_at(0.01);
        let order = (coarse / fine).log2();
        assert!(
            (order - 2.0).abs() < 0.1,
            "expected O(dt^2) drift, measured order {order}"
        );
    }

    #[test]
    fn exit_speed_accurate_at_small_steps() {
        let scn = linear_scenario();
        let run = simulate_verlet(&scn, 1e-4).unwrap();
        let exit = run.exit_speed.unwrap();
        assert!((exit - 1.0).abs() < 1e-3);
        assert!((run.duration - std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn linear_oscillator_threshold_is_sharp() {
        let just_below = linear_oscillator_amplification(1.0, 1.99, 20_000);
        assert!(just_below.is_finite());
        assert!(
            just_below < 15.0,
            "bounded orbit expected, got {just_below}"
        );

        let just_above = linear_oscillator_amplification(1.0, 2.01, 20_000);
        assert!(
            just_above > 1e3,
            "unbounded growth expected, got {just_above}"
        );

        // scaling with omega0: threshold moves to 2/omega0
        let scaled = linear_oscillator_amplification(2.0, 0.995, 20_000);
        assert!(scaled < 15.0);
        let scaled_above = linear_oscillator_amplification(2.0, 1.005, 20_000);
        assert!(scaled_above > 1e3);
    }
}
