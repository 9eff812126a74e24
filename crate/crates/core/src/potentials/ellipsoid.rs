//! Regularised volumetric contact law for an ellipsoid pressed flat-on
//! against a rigid plane along its `a` semi-axis.
//!
//! The overlap cross-section and volume have exact closed forms,
//!
//! ```text
//! S_n(d) = (pi b c / a^2) (2 a d - d^2)
//! V_c(d) = (pi b c / a^2) (a d^2 - d^3 / 3)
//! ```
//!
//! with `S_n = dV_c/dd`, and the stored energy is
//! `U(d) = K_n / (alpha + 1) * V_c(d)^(alpha + 1)`, giving the restoring
//! force `U'(d) = K_n V_c(d)^alpha S_n(d)`.

use super::{ContactPotential, GradientLimit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumetricEllipsoidPotential {
    a: f64,
    b: f64,
    c: f64,
    k_n: f64,
    alpha: f64,
    /// pi b c / a^2, precomputed.
    geom: f64,
}

impl VolumetricEllipsoidPotential {
    /// `a` is the semi-axis along the impact direction, `b` and `c` the
    /// transverse semi-axes, `k_n` the stiffness parameter (Pa) and `alpha`
    /// the regularisation exponent. All must be positive.
    pub fn new(a: f64, b: f64, c: f64, k_n: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("K_n", k_n), ("alpha", alpha)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "ellipsoid parameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            k_n,
            alpha,
            geom: std::f64::consts::PI * b * c / (a * a),
        })
    }

    pub fn semi_axis_a(&self) -> f64 {
        self.a
    }

    pub fn k_n(&self) -> f64 {
        self.k_n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Contact cross-section area `S_n(d)` in m^2.
    pub fn cross_section(&self, d: f64) -> f64 {
        self.geom * (2.0 * self.a * d - d * d)
    }

    /// Overlap volume `V_c(d)` in m^3.
    pub fn overlap_volume(&self, d: f64) -> f64 {
        self.geom * (self.a * d * d - d * d * d / 3.0)
    }

    /// `(S_n(d), V_c(d))` with a domain check; the model is kept to
    /// hemisphere depth `0 <= d <= a`.
    pub fn overlap_geometry(&self, d: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.a).contains(&d) {
            return Err(Error::Domain {
                q: d,
                limit: self.a,
            });
        }
        Ok((self.cross_section(d), self.overlap_volume(d)))
    }
}

impl ContactPotential for VolumetricEllipsoidPotential {
    fn energy(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.k_n / (self.alpha + 1.0) * self.overlap_volume(q).powf(self.alpha + 1.0)
    }

    fn force(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.k_n * self.overlap_volume(q).powf(self.alpha) * self.cross_section(q)
    }

    fn stiffness(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        let v = self.overlap_volume(q);
        let s = self.cross_section(q);
        let s_prime = self.geom * (2.0 * self.a - 2.0 * q);
        self.k_n * (self.alpha * v.powf(self.alpha - 1.0) * s * s + v.powf(self.alpha) * s_prime)
    }

    fn domain_limit(&self) -> f64 {
        self.a
    }

    // U'/sqrt(2U) ~ d^alpha near onset, which vanishes for alpha > 0.
    fn gradient_limit(&self, _q_scale: f64) -> GradientLimit {
        GradientLimit::Finite(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn table1() -> VolumetricEllipsoidPotential {
        VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap()
    }

    #[test]
    fn overlap_geometry_endpoints() {
        let pot = table1();
        assert_eq!(pot.overlap_geometry(0.0).unwrap(), (0.0, 0.0));

        let (s, v) = pot.overlap_geometry(0.015).unwrap();
        assert_relative_eq!(s, PI * 0.008 * 0.008, max_relative = 1e-14);
        assert_relative_eq!(
            v,
            2.0 / 3.0 * PI * 0.015 * 0.008 * 0.008,
            max_relative = 1e-14
        );

        assert!(pot.overlap_geometry(-1e-9).is_err());
        assert!(pot.overlap_geometry(0.0151).is_err());
    }

    #[test]
    fn overlap_geometry_at_reference_penetration() {
        // Values evaluated from the closed forms at the v0 = 0.99 turning point.
        let pot = table1();
        let d = 6.706989e-3;
        let (s, v) = pot.overlap_geometry(d).unwrap();
        assert_relative_eq!(s, 1.39604e-4, max_relative = 1e-5);
        assert_relative_eq!(v, 5.1310e-7, max_relative = 1e-4);
        // Cross-check the force assembly against the reference peak force.
        assert_relative_eq!(pot.force(d), 10.000023, max_relative = 1e-5);
    }

    #[test]
    fn cross_section_is_volume_derivative() {
        let pot = table1();
        for d in [1e-4, 2e-3, 7e-3, 1.2e-2] {
            let h = d * 1e-5;
            let fd = (pot.overlap_volume(d + h) - pot.overlap_volume(d - h)) / (2.0 * h);
            assert_relative_eq!(fd, pot.cross_section(d), max_relative = 1e-8);
        }
    }

    #[test]
    fn stiffness_matches_force_difference() {
        let pot = table1();
        for d in [1e-3, 5e-3, 9e-3] {
            let h = d * 1e-6;
            let fd = (pot.force(d + h) - pot.force(d - h)) / (2.0 * h);
            assert_relative_eq!(fd, pot.stiffness(d), max_relative = 1e-6);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(VolumetricEllipsoidPotential::new(0.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(VolumetricEllipsoidPotential::new(1.0, 1.0, 1.0, -1.0, 0.5).is_err());
        assert!(VolumetricEllipsoidPotential::new(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }
}
