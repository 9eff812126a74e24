//! Action variable, its energy derivative, and the contact duration.
//!
//! For a conservative contact at energy `E` with turning point `q_max`,
//!
//! ```text
//! J(E)    = sqrt(2m)/pi     * integral_0^{q_max} sqrt(E - U(q)) dq
//! dJ/dE   = sqrt(2m)/(2 pi) * integral_0^{q_max} dq / sqrt(E - U(q))
//! T(E)    = 2 pi dJ/dE
//! ```
//!
//! `J` is strictly increasing in `E` and `T` is the full entry-to-exit
//! contact duration. Both integrals are computed after the substitution
//! `q = q_max sin^2(theta)`, which removes the inverse-square-root
//! endpoint singularity exactly when the turning point is simple
//! (`U'(q_max) > 0`); a degenerate turning point is rejected.

use crate::error::{Error, Result};
use crate::potentials::{turning_point, ContactPotential};
use crate::quadrature::integrate_adaptive;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Action-variable summary for one impact energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionAngleReport {
    /// Impact energy (J).
    #[serde(rename = "E")]
    pub energy: f64,
    /// Turning point (m).
    pub q_max: f64,
    /// Action variable (J s).
    #[serde(rename = "J")]
    pub action: f64,
    /// Energy derivative of the action (s).
    #[serde(rename = "dJ_dE")]
    pub dj_de: f64,
    /// Contact duration from entry to exit (s).
    #[serde(rename = "T")]
    pub duration: f64,
}

fn validate(m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive and finite, got {m}"
        )));
    }
    Ok(())
}

fn simple_turning_point(pot: &dyn ContactPotential, energy: f64) -> Result<f64> {
    let q_max = turning_point(pot, energy)?;
    if pot.force(q_max) <= 0.0 {
        return Err(Error::QuadratureFailure {
            context: format!("degenerate turning point at q_max = {q_max} (U'(q_max) <= 0)"),
        });
    }
    Ok(q_max)
}

/// Action variable `J(E)`, the phase-space loop area over `2 pi`.
pub fn action(pot: &dyn ContactPotential, m: f64, energy: f64) -> Result<f64> {
    validate(m)?;
    let q_max = simple_turning_point(pot, energy)?;
    let integrand = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let q = q_max * sin * sin;
        let head = energy - pot.energy(q);
        if head <= 0.0 {
            return 0.0;
        }
        head.sqrt() * 2.0 * q_max * sin * cos
    };
    let integral = integrate_adaptive(integrand, 0.0, FRAC_PI_2, 1e-12)?;
    Ok((2.0 * m).sqrt() / PI * integral)
}

/// `dJ/dE`, with the endpoint singularity removed by the substitution.
///
/// Near the turning point `E - U` cancels catastrophically, so once the
/// head drops below `1e-12 E` the integrand switches to its analytic
/// limit `2 q_max sin(theta) / sqrt(q_max U'(q))`.
pub fn dj_de(pot: &dyn ContactPotential, m: f64, energy: f64) -> Result<f64> {
    validate(m)?;
    let q_max = simple_turning_point(pot, energy)?;
    let switch = 1e-12 * energy;
    let integrand = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let q = q_max * sin * sin;
        let head = energy - pot.energy(q);
        if head > switch {
            2.0 * q_max * sin * cos / head.sqrt()
        } else {
            2.0 * q_max * sin / (q_max * pot.force(q)).sqrt()
        }
    };
    let integral = integrate_adaptive(integrand, 0.0, FRAC_PI_2, 1e-10)?;
    Ok((2.0 * m).sqrt() / (2.0 * PI) * integral)
}

/// Contact duration `T(E) = 2 pi dJ/dE`: twice the compression time, i.e.
/// the span from the entry crossing to the exit crossing.
pub fn contact_duration(pot: &dyn ContactPotential, m: f64, energy: f64) -> Result<f64> {
    Ok(2.0 * PI * dj_de(pot, m, energy)?)
}

/// Bundles `E`, `q_max`, `J`, `dJ/dE` and `T` for one energy.
pub fn report(pot: &dyn ContactPotential, m: f64, energy: f64) -> Result<ActionAngleReport> {
    validate(m)?;
    let q_max = simple_turning_point(pot, energy)?;
    let action = action(pot, m, energy)?;
    let dj_de = dj_de(pot, m, energy)?;
    Ok(ActionAngleReport {
        energy,
        q_max,
        action,
        dj_de,
        duration: 2.0 * PI * dj_de,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{PowerLawPotential, VolumetricEllipsoidPotential};
    use approx::assert_relative_eq;

    fn table1_ellipsoid() -> VolumetricEllipsoidPotential {
        VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap()
    }

    #[test]
    fn linear_spring_closed_forms() {
        // J = (E/2) sqrt(m/k), dJ/dE = sqrt(m/k)/2, T = pi sqrt(m/k)
        let pot = PowerLawPotential::new(1.0, 1.0).unwrap();
        assert_relative_eq!(action(&pot, 1.0, 1.0).unwrap(), 0.5, max_relative = 1e-11);
        for e in [0.2, 1.0, 7.5] {
            assert_relative_eq!(dj_de(&pot, 1.0, e).unwrap(), 0.5, max_relative = 1e-9);
            assert_relative_eq!(
                contact_duration(&pot, 1.0, e).unwrap(),
                std::f64::consts::PI,
                max_relative = 1e-9
            );
        }
        let stiff = PowerLawPotential::new(4.0, 1.0).unwrap();
        assert_relative_eq!(
            action(&stiff, 9.0, 2.0).unwrap(),
            1.0 * (9.0f64 / 4.0).sqrt(),
            max_relative = 1e-11
        );
    }

    #[test]
    fn action_vanishes_with_energy() {
        let pot = table1_ellipsoid();
        let j = action(&pot, 0.05, 1e-12).unwrap();
        assert!(j > 0.0 && j < 1e-10);
    }

    #[test]
    fn ellipsoid_reference_values() {
        // Frozen from a 2e6-node trapezoid oracle on the substituted integrand.
        let pot = table1_ellipsoid();
        let cases = [
            (0.00625, 2.738943854395e-5, 3.718662291177e-3),
            (0.0245025, 8.793922669500e-5, 3.088270029683e-3),
            (0.05625, 1.806982725686e-4, 2.807497473890e-3),
        ];
        for (e, j_ref, dj_ref) in cases {
            assert_relative_eq!(action(&pot, 0.05, e).unwrap(), j_ref, max_relative = 1e-8);
            assert_relative_eq!(dj_de(&pot, 0.05, e).unwrap(), dj_ref, max_relative = 1e-8);
        }
    }

    #[test]
    fn dj_de_matches_finite_difference_of_action() {
        let pot = table1_ellipsoid();
        let m = 0.05;
        for e in [0.004, 0.0245025, 0.05] {
            let de = 1e-6 * e;
            let fd =
                (action(&pot, m, e + de).unwrap() - action(&pot, m, e - de).unwrap()) / (2.0 * de);
            assert_relative_eq!(dj_de(&pot, m, e).unwrap(), fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn action_strictly_increasing_in_energy() {
        let pots: Vec<Box<dyn ContactPotential>> = vec![
            Box::new(PowerLawPotential::new(1.0, 1.5).unwrap()),
            Box::new(table1_ellipsoid()),
        ];
        for pot in &pots {
            let e_hi = if pot.domain_limit().is_finite() {
                0.9 * pot.energy(pot.domain_limit())
            } else {
                10.0
            };
            let mut last = 0.0;
            for i in 0..20 {
                let e = e_hi * 10f64.powf(-2.0 + 2.0 * i as f64 / 19.0);
                let j = action(pot.as_ref(), 0.05, e).unwrap();
                assert!(j > last, "J must increase with E (E = {e})");
                last = j;
            }
        }
    }

    #[test]
    fn duration_scaling_across_power_laws() {
        // T ~ E^((1-p)/(2(p+1))): constant for p = 1, decreasing for p > 1.
        let pot = PowerLawPotential::new(1.0, 2.0).unwrap();
        let t_low = contact_duration(&pot, 1.0, 0.05).unwrap();
        let t_high = contact_duration(&pot, 1.0, 5.0).unwrap();
        assert!(t_high < t_low);
        let expected_ratio = (5.0f64 / 0.05).powf((1.0 - 2.0) / (2.0 * 3.0));
        assert_relative_eq!(t_high / t_low, expected_ratio, max_relative = 1e-7);
    }

    #[test]
    fn quadrature_node_doubling_is_converged() {
        use crate::quadrature::{integrate_adaptive_with, GaussLegendre};
        let pot = table1_ellipsoid();
        let energy = 0.0245025;
        let q_max = turning_point(&pot, energy).unwrap();
        let integrand = |theta: f64| {
            let (sin, cos) = theta.sin_cos();
            let q = q_max * sin * sin;
            (energy - pot.energy(q)).max(0.0).sqrt() * 2.0 * q_max * sin * cos
        };
        let coarse = integrate_adaptive_with(
            &GaussLegendre::new(32),
            integrand,
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-12,
        )
        .unwrap();
        let fine = integrate_adaptive_with(
            &GaussLegendre::new(64),
            integrand,
            0.0,
            std::f64::consts::FRAC_PI_2,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(coarse, fine, max_relative = 1e-11);
    }

    #[test]
    fn report_is_internally_consistent() {
        let pot = table1_ellipsoid();
        let r = report(&pot, 0.05, 0.0245025).unwrap();
        assert_eq!(r.duration, 2.0 * std::f64::consts::PI * r.dj_de);
        assert_relative_eq!(pot.energy(r.q_max), r.energy, max_relative = 1e-12);
        let json = serde_json::to_value(r).unwrap();
        for key in ["E", "q_max", "J", "dJ_dE", "T"] {
            assert!(json.get(key).is_some(), "missing JSON field {key}");
        }
    }
}
