//! Contact-potential abstraction and the concrete potential families.
//!
//! A contact potential is a scalar elastic energy `U(q)` stored at
//! penetration depth `q >= 0`, subject to the monotonicity conditions
//!
//! * `U(0) = 0`,
//! * `U'(q) > 0` for every `q` in the interior of the domain,
//! * `U` is `C^1` on `[0, q_lim)` and twice differentiable inside,
//! * every attainable energy `E > 0` has a unique turning point
//!   `q_max(E)` with `U(q_max) = E`.
//!
//! Three families are provided: [`PowerLawPotential`] (`U = k q^(p+1)/(p+1)`),
//! [`VolumetricEllipsoidPotential`] (regularised overlap-volume law for an
//! ellipsoid pressed against a plane) and [`TabulatedPotential`]
//! (monotonicity-preserving cubic interpolation of sampled data).

mod ellipsoid;
mod power_law;
mod tabulated;

pub use ellipsoid::VolumetricEllipsoidPotential;
pub use power_law::PowerLawPotential;
pub use tabulated::TabulatedPotential;

use crate::error::{Error, Result};

/// Behaviour of the transformation gradient `U'(q)/sqrt(2 U(q))` as `q -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientLimit {
    /// The gradient approaches a finite value (possibly zero).
    Finite(f64),
    /// The gradient grows without bound at contact onset.
    Divergent,
}

/// Evaluable 1-D contact potential with first and second derivatives.
///
/// Implementations must be cheap to evaluate and free of interior mutation;
/// every operation in this crate treats potentials as immutable shared data.
pub trait ContactPotential: Send + Sync {
    /// Stored elastic energy `U(q)` in joules.
    fn energy(&self, q: f64) -> f64;

    /// Restoring force magnitude `U'(q)` in newtons.
    fn force(&self, q: f64) -> f64;

    /// Contact stiffness `U''(q)` in newtons per metre.
    fn stiffness(&self, q: f64) -> f64;

    /// Upper end of the valid penetration range; `f64::INFINITY` if unbounded.
    fn domain_limit(&self) -> f64;

    /// Limit of `U'(q)/sqrt(2 U(q))` as `q -> 0+`.
    ///
    /// The default probes the gradient at `q_scale * {1e-6, 1e-7, 1e-8}` and
    /// declares divergence when successive probes grow by more than a factor
    /// of ten, otherwise it extrapolates the limit by Aitken's delta-squared.
    /// Families with a known closed form override this.
    fn gradient_limit(&self, q_scale: f64) -> GradientLimit {
        let probes = [1e-6, 1e-7, 1e-8].map(|s| {
            let q = q_scale * s;
            self.force(q) / (2.0 * self.energy(q)).sqrt()
        });
        let [g0, g1, g2] = probes;
        if !g1.is_finite() || !g2.is_finite() || g1 > 10.0 * g0 || g2 > 10.0 * g1 {
            return GradientLimit::Divergent;
        }
        let denom = (g2 - g1) - (g1 - g0);
        if denom.abs() < 1e-14 * g2.abs().max(1e-300) {
            GradientLimit::Finite(g2)
        } else {
            GradientLimit::Finite(g2 - (g2 - g1) * (g2 - g1) / denom)
        }
    }
}

impl<P: ContactPotential + ?Sized> ContactPotential for &P {
    fn energy(&self, q: f64) -> f64 {
        (**self).energy(q)
    }
    fn force(&self, q: f64) -> f64 {
        (**self).force(q)
    }
    fn stiffness(&self, q: f64) -> f64 {
        (**self).stiffness(q)
    }
    fn domain_limit(&self) -> f64 {
        (**self).domain_limit()
    }
    fn gradient_limit(&self, q_scale: f64) -> GradientLimit {
        (**self).gradient_limit(q_scale)
    }
}

/// Finds the unique turning point `q_max` with `U(q_max) = E`.
///
/// Brackets the root by a doubling/halving search from an interior scale,
/// shrinks the bracket by bisection until it is machine-adjacent, then
/// applies one guarded Newton polish. Robust for rough `U''` (tabulated
/// data) at the cost of a few extra evaluations.
pub fn turning_point(pot: &dyn ContactPotential, energy: f64) -> Result<f64> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::EnergyOutOfRange {
            energy,
            max: f64::INFINITY,
        });
    }
    let q_lim = pot.domain_limit();

    // Establish an upper bracket end with U(hi) >= E.
    let mut hi;
    let mut lo = 0.0_f64;
    if q_lim.is_finite() {
        let u_lim = pot.energy(q_lim);
        if energy > u_lim {
            return Err(Error::EnergyOutOfRange { energy, max: u_lim });
        }
        hi = q_lim;
    } else {
        hi = 1.0;
        let mut steps = 0;
        while pot.energy(hi) < energy {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps > 2100 || !hi.is_finite() {
                return Err(Error::EnergyOutOfRange {
                    energy,
                    max: pot.energy(lo),
                });
            }
        }
    }
    // Tighten the lower end so the bracket spans at most one octave.
    if lo == 0.0 {
        let mut probe = hi * 0.5;
        let mut steps = 0;
        while probe > 0.0 && pot.energy(probe) > energy {
            hi = probe;
            probe *= 0.5;
            steps += 1;
            if steps > 2100 {
                break;
            }
        }
        lo = probe.max(0.0);
    }
    if pot.energy(lo) > pot.energy(hi) {
        return Err(Error::InvalidPotential { q: lo });
    }

    // Bisection to a machine-adjacent bracket.
    let mut f_lo = pot.energy(lo) - energy;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = pot.energy(mid) - energy;
        if (f_mid <= 0.0) == (f_lo <= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    // One guarded Newton polish.
    let mut root = if f_lo.abs() <= (pot.energy(hi) - energy).abs() {
        lo
    } else {
        hi
    };
    let slope = pot.force(root);
    if slope > 0.0 {
        let candidate = root - (pot.energy(root) - energy) / slope;
        if candidate >= lo.min(hi) && candidate <= hi.max(lo) && candidate > 0.0 {
            root = candidate;
        }
    } else if root > 0.0 {
        return Err(Error::InvalidPotential { q: root });
    }
    if root <= 0.0 {
        root = hi;
    }
    Ok(root)
}

/// Local stiffening margin `2 U(q) U''(q) - [U'(q)]^2`.
///
/// Non-negative values mean the transformation gradient grows with `q`
/// (stiffening geometry); negative values mean it decays (softening).
pub fn stiffening_margin(pot: &dyn ContactPotential, q: f64) -> Result<f64> {
    let limit = pot.domain_limit();
    if !(q > 0.0) || q > limit {
        return Err(Error::Domain { q, limit });
    }
    let u = pot.energy(q);
    let du = pot.force(q);
    Ok(2.0 * u * pot.stiffness(q) - du * du)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table1_ellipsoid() -> VolumetricEllipsoidPotential {
        VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap()
    }

    #[test]
    fn turning_point_linear_spring() {
        let pot = PowerLawPotential::new(1.0, 1.0).unwrap();
        let q = turning_point(&pot, 0.5).unwrap();
        assert_relative_eq!(q, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn turning_point_ellipsoid_matches_reference_penetrations() {
        let pot = table1_ellipsoid();
        let cases = [(0.99, 6.706989e-3), (1.50, 9.143383e-3)];
        for (v0, expected) in cases {
            let e = 0.5 * 0.05 * v0 * v0;
            let q = turning_point(&pot, e).unwrap();
            assert_relative_eq!(q, expected, max_relative = 1e-5);
            assert_relative_eq!(pot.energy(q), e, max_relative = 1e-12);
        }
    }

    #[test]
    fn turning_point_rejects_unattainable_energy() {
        let pot = table1_ellipsoid();
        let too_much = pot.energy(pot.domain_limit()) * 1.5;
        assert!(matches!(
            turning_point(&pot, too_much),
            Err(Error::EnergyOutOfRange { .. })
        ));
        assert!(matches!(
            turning_point(&pot, -1.0),
            Err(Error::EnergyOutOfRange { .. })
        ));
    }

    #[test]
    fn turning_point_satisfies_energy_identity_over_random_energies() {
        let pot = table1_ellipsoid();
        let u_max = pot.energy(pot.domain_limit());
        // 50 deterministic pseudo-random energies across the attainable range
        let mut state = 0x243f6a8885a308d3_u64;
        for _ in 0..50 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let frac = (state >> 11) as f64 / (1u64 << 53) as f64;
            let e = u_max * (1e-6 + 0.999 * frac);
            let q = turning_point(&pot, e).unwrap();
            assert_relative_eq!(pot.energy(q), e, max_relative = 1e-12);
        }
    }

    #[test]
    fn stiffening_margin_power_laws() {
        let linear = PowerLawPotential::new(1.0, 1.0).unwrap();
        assert_eq!(stiffening_margin(&linear, 0.3).unwrap(), 0.0);

        let quadratic = PowerLawPotential::new(1.0, 2.0).unwrap();
        for q in [0.1, 0.7, 2.0, 11.0] {
            let margin = stiffening_margin(&quadratic, q).unwrap();
            assert_relative_eq!(margin, q.powi(4) / 3.0, max_relative = 1e-12);
            assert!(margin > 0.0);
        }
    }

    #[test]
    fn stiffening_margin_ellipsoid_sign_change_near_crossover() {
        let pot = table1_ellipsoid();
        let a = 0.015;
        assert!(stiffening_margin(&pot, 0.7 * a).unwrap() > 0.0);
        assert!(stiffening_margin(&pot, 0.735 * a).unwrap() > 0.0);
        assert!(stiffening_margin(&pot, 0.7351 * a).unwrap() < 0.0);
    }

    #[test]
    fn stiffening_margin_rejects_out_of_domain() {
        let pot = table1_ellipsoid();
        assert!(matches!(
            stiffening_margin(&pot, 0.0),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            stiffening_margin(&pot, 0.016),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn ellipsoid_stiffening_holds_over_claimed_range() {
        let pot = table1_ellipsoid();
        let upper = 0.735 * 0.015;
        for i in 1..=10_000 {
            let q = upper * i as f64 / 10_000.0;
            assert!(
                stiffening_margin(&pot, q).unwrap() >= 0.0,
                "margin negative at q = {q}"
            );
        }
    }

    #[test]
    fn gradient_limit_families() {
        let sub = PowerLawPotential::new(1.0, 0.5).unwrap();
        assert_eq!(sub.gradient_limit(1.0), GradientLimit::Divergent);

        let linear = PowerLawPotential::new(4.0, 1.0).unwrap();
        match linear.gradient_limit(1.0) {
            GradientLimit::Finite(g) => assert_relative_eq!(g, 2.0, max_relative = 1e-12),
            GradientLimit::Divergent => panic!("linear gradient limit must be finite"),
        }

        let ell = table1_ellipsoid();
        match ell.gradient_limit(0.005) {
            GradientLimit::Finite(g) => assert!(g.abs() < 1e-6),
            GradientLimit::Divergent => panic!("ellipsoid gradient vanishes at onset"),
        }
    }

    #[test]
    fn positivity_of_energy_and_force_on_log_grid() {
        let pots: Vec<Box<dyn ContactPotential>> = vec![
            Box::new(PowerLawPotential::new(2.0, 1.5).unwrap()),
            Box::new(table1_ellipsoid()),
        ];
        for pot in &pots {
            let hi = if pot.domain_limit().is_finite() {
                pot.domain_limit()
            } else {
                1.0
            };
            for i in 0..1000 {
                let q = hi * 10f64.powf(-6.0 + 6.0 * i as f64 / 999.0);
                assert!(pot.energy(q) > 0.0, "U(q) must be positive at q = {q}");
                assert!(pot.force(q) > 0.0, "U'(q) must be positive at q = {q}");
            }
        }
    }

    #[test]
    fn central_difference_matches_force() {
        let pots: Vec<(Box<dyn ContactPotential>, f64)> = vec![
            (Box::new(PowerLawPotential::new(3.0, 2.0).unwrap()), 0.8),
            (Box::new(table1_ellipsoid()), 0.006),
        ];
        for (pot, q) in &pots {
            let h = q * 1e-6;
            let fd = (pot.energy(q + h) - pot.energy(q - h)) / (2.0 * h);
            assert_relative_eq!(fd, pot.force(*q), max_relative = 1e-6);
        }
    }
}
