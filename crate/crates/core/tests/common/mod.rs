//! Shared fixtures and independent oracles for the integration suites.

#![allow(dead_code)]

use contact_dynamics::potentials::{turning_point, ContactPotential};
use contact_dynamics::{
    ImpactScenario, PowerLawPotential, ReferenceConstants, TabulatedPotential,
    VolumetricEllipsoidPotential,
};
use std::sync::Arc;

/// Reference ellipsoid: a = 15 mm, b = c = 8 mm, K_n = 1e8 Pa, alpha = 0.5.
pub fn reference_ellipsoid() -> VolumetricEllipsoidPotential {
    VolumetricEllipsoidPotential::new(0.015, 0.008, 0.008, 1e8, 0.5).unwrap()
}

/// Reference constants used throughout: K = 1, M = 0.75.
pub fn reference_constants() -> ReferenceConstants {
    ReferenceConstants::new(1.0, 0.75).unwrap()
}

pub const REFERENCE_MASS: f64 = 0.05;
pub const REFERENCE_SPEEDS: [f64; 3] = [0.50, 0.99, 1.50];
pub const REFERENCE_C0: f64 = 0.5;

pub fn ellipsoid_scenario(v0: f64) -> ImpactScenario {
    ImpactScenario::new(
        Arc::new(reference_ellipsoid()),
        REFERENCE_MASS,
        v0,
        reference_constants(),
    )
    .unwrap()
}

pub fn power_law_scenario(k: f64, p: f64, m: f64, v0: f64) -> ImpactScenario {
    ImpactScenario::new(
        Arc::new(PowerLawPotential::new(k, p).unwrap()),
        m,
        v0,
        reference_constants(),
    )
    .unwrap()
}

/// Tabulated clone of the reference ellipsoid: 400 nodes over [0, 12 mm].
pub fn tabulated_ellipsoid() -> TabulatedPotential {
    let source = reference_ellipsoid();
    let n = 400;
    let q_hi = 0.012;
    let samples: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let q = q_hi * i as f64 / n as f64;
            (q, source.energy(q))
        })
        .collect();
    TabulatedPotential::new(&samples).unwrap()
}

/// Independent action oracle: trapezoid rule on the substituted integrand
/// `2 q_max sin(t) cos(t) sqrt(E - U(q_max sin^2 t))`, deliberately not
/// sharing any code with the adaptive Gauss-Legendre path it checks.
pub fn trapezoid_action_oracle(pot: &dyn ContactPotential, m: f64, energy: f64, n: usize) -> f64 {
    let q_max = turning_point(pot, energy).unwrap();
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let f = |theta: f64| {
        let (sin, cos) = theta.sin_cos();
        let q = q_max * sin * sin;
        (energy - pot.energy(q)).max(0.0).sqrt() * 2.0 * q_max * sin * cos
    };
    let mut acc = 0.5 * (f(0.0) + f(std::f64::consts::FRAC_PI_2));
    for i in 1..n {
        acc += f(i as f64 * h);
    }
    (2.0 * m).sqrt() / std::f64::consts::PI * acc * h
}

/// Least-squares line fit; returns (slope, intercept, max |residual|).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    (slope, intercept, resid)
}
