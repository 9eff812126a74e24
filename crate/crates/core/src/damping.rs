//! The universal damping law and its restitution consequences.
//!
//! Adding the physical dashpot `C(q) qdot` to the contact equation and
//! applying the harmonic regularisation turns the motion into
//! `M x'' + C_*(x) x' + K x = 0`. The transformed coefficient is constant,
//! `C_*(x) = C0`, if and only if the physical coefficient follows
//!
//! ```text
//! C(q) = C0 sqrt(m/M) U'(q) / sqrt(2 K U(q))
//! ```
//!
//! Under this law the virtual system is an exact constant-coefficient
//! spring–dashpot, so the restitution coefficient is velocity-independent:
//! `e = exp(-pi zeta / sqrt(1 - zeta^2))` with `zeta = C0 / (2 sqrt(K M))`.
//! For the power-law family the law reduces to `C(q)` proportional to
//! `q^((p-1)/2)`.

use crate::error::{Error, Result};
use crate::potentials::ContactPotential;
use crate::regularize::ReferenceConstants;

/// Virtual damping specification: coefficient `C0` in the unit system of
/// the reference constants, plus the physical mass it applies to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingSpec {
    c0: f64,
    refs: ReferenceConstants,
    m: f64,
}

impl DampingSpec {
    pub fn new(c0: f64, refs: ReferenceConstants, m: f64) -> Result<Self> {
        if !(c0 >= 0.0) || !c0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "virtual damping C0 must be non-negative and finite, got {c0}"
            )));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {m}"
            )));
        }
        Ok(Self { c0, refs, m })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn refs(&self) -> ReferenceConstants {
        self.refs
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Damping ratio `zeta = C0 / (2 sqrt(K M))` of the virtual oscillator.
    pub fn ratio(&self) -> f64 {
        self.c0 / (2.0 * (self.refs.stiffness() * self.refs.mass()).sqrt())
    }

    /// Physical damping coefficient `C(q)` demanded by the universal law.
    ///
    /// The `q -> 0` limit is potential-dependent (it may vanish, stay
    /// finite, or diverge), so the onset itself is rejected; force
    /// assembly treats the damping force there by continuous extension.
    pub fn universal_coefficient(&self, pot: &dyn ContactPotential, q: f64) -> Result<f64> {
        let limit = pot.domain_limit();
        if !(q > 0.0) || q > limit {
            return Err(Error::Domain { q, limit });
        }
        // C0/sqrt(KM) * sqrt(m) * U'/sqrt(2U): hoisting the reference pair
        // keeps co-scaled (K, M, C0) choices bit-identical.
        let prefactor = self.c0 / (self.refs.stiffness() * self.refs.mass()).sqrt() * self.m.sqrt();
        Ok(prefactor * pot.force(q) / (2.0 * pot.energy(q)).sqrt())
    }

    /// Restitution of the underdamped virtual oscillator,
    /// `e = exp(-pi zeta / sqrt(1 - zeta^2))`.
    ///
    /// Because `qdot = sqrt(M/m) x'` scales entry and exit speeds by the
    /// same constant, the physical restitution equals `e` for every impact
    /// speed. Critically damped and overdamped specs are rejected: the
    /// virtual motion no longer re-crosses zero within a half cycle.
    pub fn predicted_restitution(&self) -> Result<f64> {
        let zeta = self.ratio();
        if zeta >= 1.0 {
            return Err(Error::OverdampedUnsupported { zeta });
        }
        Ok((-std::f64::consts::PI * zeta / (1.0 - zeta * zeta).sqrt()).exp())
    }
}

/// Reconstructs the transformed damping coefficient
/// `C_*(x) = C(q) sqrt(M/m) dq/dx` from a physical coefficient value.
///
/// Along a universally damped trajectory this is constant and equal to
/// `C0`; any other physical profile produces a varying `C_*`.
pub fn transformed_damping(
    pot: &dyn ContactPotential,
    refs: ReferenceConstants,
    m: f64,
    q: f64,
    physical_coefficient: f64,
) -> Result<f64> {
    let limit = pot.domain_limit();
    if !(q > 0.0) || q > limit {
        return Err(Error::Domain { q, limit });
    }
    // dq/dx = sqrt(2 K U) / U'
    let dq_dx = (2.0 * refs.stiffness() * pot.energy(q)).sqrt() / pot.force(q);
    Ok(physical_coefficient * (refs.mass() / m).sqrt() * dq_dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{PowerLawPotential, VolumetricEllipsoidPotential};
    use approx::assert_relative_eq;

    fn fig1_spec() -> DampingSpec {
        let refs = ReferenceConstants::new(1.0, 0.75).unwrap();
        DampingSpec::new(0.5, refs, 0.05).unwrap()
    }

    #[test]
    fn linear_spring_universal_coefficient_is_constant() {
        let refs = ReferenceConstants::new(1.0, 1.0).unwrap();
        let spec = DampingSpec::new(0.5, refs, 1.0).unwrap();
        let pot = PowerLawPotential::new(1.0, 1.0).unwrap();
        for q in [0.01, 0.4, 2.0] {
            assert_relative_eq!(
                spec.universal_coefficient(&pot, q).unwrap(),
                0.5,
                max_relative = 1e-14
            );
        }
        assert!(spec.universal_coefficient(&pot, 0.0).is_err());
    }

    #[test]
    fn power_law_exponent_recovered_from_log_slope() {
        let refs = ReferenceConstants::new(1.0, 0.75).unwrap();
        for p in [0.5, 1.0, 1.5, 2.0] {
            let pot = PowerLawPotential::new(2.0, p).unwrap();
            let spec = DampingSpec::new(0.5, refs, 0.3).unwrap();
            // least-squares slope of log C against log q over 3 decades
            let n = 400;
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            for i in 0..n {
                let q = 10f64.powf(-2.0 + 3.0 * i as f64 / (n - 1) as f64);
                let c = spec.universal_coefficient(&pot, q).unwrap();
                let (lx, ly) = (q.ln(), c.ln());
                sx += lx;
                sy += ly;
                sxx += lx * lx;
                sxy += lx * ly;
            }
            let nf = n as f64;
            let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
            assert_relative_eq!(slope, (p - 1.0) / 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn ellipsoid_coefficient_vanishes_at_onset_and_matches_geometry() {
        let pot = VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap();
        let spec = fig1_spec();
        // C ~ S_n V_c^{-1/4}: check proportionality across the domain
        let reference_q = 5e-3;
        let c_ref = spec.universal_coefficient(&pot, reference_q).unwrap();
        let shape =
            |q: f64| pot.cross_section(q) * pot.overlap_volume(q).powf((pot.alpha() - 1.0) / 2.0);
        for q in [5e-4, 2e-3, 8e-3, 1.2e-2] {
            let expected = c_ref * shape(q) / shape(reference_q);
            assert_relative_eq!(
                spec.universal_coefficient(&pot, q).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
        // finite and decaying toward onset
        let tiny = spec.universal_coefficient(&pot, 1e-9).unwrap();
        assert!(tiny.is_finite() && tiny < c_ref * 1e-2);
    }

    #[test]
    fn damping_ratio_and_restitution_values() {
        let spec = fig1_spec();
        assert_relative_eq!(spec.ratio(), 0.288675, epsilon = 1e-6);
        assert_relative_eq!(
            spec.predicted_restitution().unwrap(),
            0.38781,
            epsilon = 1e-5
        );

        let refs = ReferenceConstants::new(1.0, 1.0).unwrap();
        let conservative = DampingSpec::new(0.0, refs, 1.0).unwrap();
        assert_eq!(conservative.ratio(), 0.0);
        assert_eq!(conservative.predicted_restitution().unwrap(), 1.0);

        let critical = DampingSpec::new(2.0, refs, 1.0).unwrap();
        assert_eq!(critical.ratio(), 1.0);
        assert!(matches!(
            critical.predicted_restitution(),
            Err(Error::OverdampedUnsupported { .. })
        ));
    }

    #[test]
    fn reconstruction_returns_c0_under_the_universal_law() {
        let pot = VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap();
        let spec = fig1_spec();
        for q in [1e-4, 1e-3, 6e-3, 1.4e-2] {
            let c_q = spec.universal_coefficient(&pot, q).unwrap();
            let c_star = transformed_damping(&pot, spec.refs(), spec.mass(), q, c_q).unwrap();
            assert_relative_eq!(c_star, spec.c0(), max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_physical_damping_reconstructs_nonconstant() {
        let pot = PowerLawPotential::new(1.0, 2.0).unwrap();
        let refs = ReferenceConstants::new(1.0, 0.75).unwrap();
        let mut values = Vec::new();
        for q in [0.05, 0.2, 0.5, 1.0] {
            values.push(transformed_damping(&pot, refs, 1.0, q, 0.4).unwrap());
        }
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(0.0, f64::max);
        assert!(
            (max - min) / max > 0.1,
            "C_* must vary for non-universal damping"
        );
    }
}
