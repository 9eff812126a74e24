//! Rigorous lower bound on the critical explicit-integration timestep.
//!
//! In the virtual coordinates the contact is a linear oscillator with
//! frequency `Omega_0 = sqrt(K/M)`, whose central-difference stability
//! limit is the universal constant `dtau_crit = 2 / Omega_0`. Pulling that
//! limit back through `dtau/dt = sqrt(M/(mK)) U'/sqrt(2U)` makes the
//! reference constants cancel and leaves the purely physical bound
//!
//! ```text
//! dt_safe = 2 sqrt(m) / sup_{q in (0, q_max]} U'(q)/sqrt(2 U(q))
//! ```
//!
//! which is a guaranteed lower bound on the true critical timestep. The
//! location of the supremum is dictated by the contact geometry:
//! stiffening contacts (`2 U U'' >= U'^2`) peak at maximum compression,
//! softening or linear ones at contact onset, mixed geometries at an
//! interior point found by search. A gradient that diverges at onset
//! (sublinear force laws) admits no finite bound.

use crate::dynamics::{simulate_verlet, ImpactScenario, VerletTermination};
use crate::error::{Error, Result};
use crate::potentials::{stiffening_margin, turning_point, ContactPotential, GradientLimit};
use crate::regularize::ReferenceConstants;
use serde::Serialize;
use std::sync::Arc;

/// Geometric regime of the transformation gradient over `(0, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `2 U U'' >= (U')^2` throughout: gradient peaks at `q_max`.
    Stiffening,
    /// `2 U U'' <= (U')^2` throughout: gradient peaks at contact onset.
    SofteningOrLinear,
    /// Both signs occur: the supremum sits at an interior point.
    Mixed,
    /// The onset gradient diverges; no finite timestep bound exists.
    Degenerate,
}

/// Stability summary for one impact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityReport {
    pub regime: Regime,
    /// Turning point (m).
    pub q_max: f64,
    /// Restoring force at the turning point (N).
    pub force_at_qmax: f64,
    /// Supremum of `U'/sqrt(2U)`; `null` when divergent.
    pub grad_sup: Option<f64>,
    /// Location of the supremum; `null` when divergent.
    pub grad_argmax: Option<f64>,
    /// Guaranteed-stable timestep (s); `0` in the degenerate regime.
    pub dt_safe: f64,
}

/// Transformation gradient `U'(q) / sqrt(2 U(q))` without reference
/// constants (they cancel in the bound).
fn gradient(pot: &dyn ContactPotential, q: f64) -> f64 {
    pot.force(q) / (2.0 * pot.energy(q)).sqrt()
}

const REGIME_TOL: f64 = 1e-12;

/// Classifies the geometry over `(0, q_max]`.
///
/// The margin `2 U U'' - (U')^2` is sampled on a composite log/linear
/// grid; the exact-equality case (linear springs) classifies as
/// `SofteningOrLinear` by convention. Divergent onset gradients are
/// `Degenerate` regardless of the margin.
pub fn classify_regime(pot: &dyn ContactPotential, q_max: f64) -> Result<Regime> {
    let limit = pot.domain_limit();
    if !(q_max > 0.0) || q_max > limit {
        return Err(Error::Domain { q: q_max, limit });
    }
    if pot.gradient_limit(q_max) == GradientLimit::Divergent {
        return Ok(Regime::Degenerate);
    }

    let mut any_above = false;
    let mut any_below = false;
    for q in classification_grid(q_max) {
        let margin = stiffening_margin(pot, q)?;
        let u = pot.energy(q);
        let du = pot.force(q);
        let scale = (2.0 * u * pot.stiffness(q)).abs().max(du * du).max(1e-300);
        if margin > REGIME_TOL * scale {
            any_above = true;
        }
        if margin < -REGIME_TOL * scale {
            any_below = true;
        }
        if any_above && any_below {
            return Ok(Regime::Mixed);
        }
    }
    Ok(match (any_above, any_below) {
        (true, false) => Regime::Stiffening,
        // all within the tolerance band (linear spring) counts as
        // softening-or-linear: the gradient is constant
        (false, _) => Regime::SofteningOrLinear,
        (true, true) => unreachable!("handled inside the loop"),
    })
}

fn classification_grid(q_max: f64) -> impl Iterator<Item = f64> {
    let log_points = 1000;
    let lin_points = 1000;
    let log = (0..log_points)
        .map(move |i| q_max * 10f64.powf(-9.0 + 9.0 * i as f64 / (log_points - 1) as f64));
    let lin = (1..=lin_points).map(move |i| q_max * i as f64 / lin_points as f64);
    log.chain(lin)
}

/// Pure kinetic-energy form of the stiffening bound, `2 m v0 / U'(q_max)`.
pub fn stiffening_bound(m: f64, v0: f64, force_at_qmax: f64) -> f64 {
    2.0 * m * v0 / force_at_qmax
}

/// Stiffening-regime shortcut: `dt_safe = 2 m v0 / U'(q_max)` with
/// `U(q_max) = m v0^2 / 2`. Rejects non-stiffening geometries.
pub fn dt_safe_stiffening(pot: &dyn ContactPotential, m: f64, v0: f64) -> Result<f64> {
    validate_mass_speed(m, v0)?;
    let q_max = turning_point(pot, 0.5 * m * v0 * v0)?;
    let regime = classify_regime(pot, q_max)?;
    if regime != Regime::Stiffening {
        return Err(Error::RegimeMismatch {
            expected: Regime::Stiffening,
            found: regime,
        });
    }
    Ok(stiffening_bound(m, v0, pot.force(q_max)))
}

/// General bound `dt_safe = 2 sqrt(m) / sup U'/sqrt(2U)` with the
/// supremum located by regime-aware search over `(0, q_max]`.
pub fn dt_safe_general(pot: &dyn ContactPotential, m: f64, q_max: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive and finite, got {m}"
        )));
    }
    let regime = classify_regime(pot, q_max)?;
    let (sup, _arg) = gradient_supremum(pot, q_max, regime)?;
    Ok(2.0 * m.sqrt() / sup)
}

/// `(sup, argmax)` of the gradient over `(0, q_max]` for a known regime.
fn gradient_supremum(pot: &dyn ContactPotential, q_max: f64, regime: Regime) -> Result<(f64, f64)> {
    match regime {
        Regime::Degenerate => Err(Error::DegenerateBound),
        Regime::Stiffening => Ok((gradient(pot, q_max), q_max)),
        Regime::SofteningOrLinear | Regime::Mixed => {
            // 10^4-point composite seed grid, then golden-section polish.
            let n_half = 5000;
            let mut best_q = q_max;
            let mut best_g = gradient(pot, q_max);
            let mut consider = |q: f64| {
                let g = gradient(pot, q);
                if g > best_g {
                    best_g = g;
                    best_q = q;
                }
            };
            for i in 0..n_half {
                consider(q_max * 10f64.powf(-12.0 + 12.0 * i as f64 / (n_half - 1) as f64));
            }
            for i in 1..=n_half {
                consider(q_max * i as f64 / n_half as f64);
            }
            let (lo, hi) = (best_q / 1.005, (best_q * 1.005).min(q_max));
            let (q_star, g_star) = golden_section_max(|q| gradient(pot, q), lo, hi);
            if g_star > best_g {
                best_g = g_star;
                best_q = q_star;
            }
            // the onset limit competes in the softening case
            if let GradientLimit::Finite(g0) = pot.gradient_limit(q_max) {
                if g0 > best_g {
                    best_g = g0;
                    best_q = 0.0;
                }
            }
            Ok((best_g, best_q))
        }
    }
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
        if (hi - lo).abs() < 1e-14 * hi.abs() {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

fn validate_mass_speed(m: f64, v0: f64) -> Result<()> {
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
    Ok(())
}

/// Full stability summary for an impact at speed `v0`.
///
/// In the degenerate regime the report carries `dt_safe = 0` and no
/// supremum rather than failing, so callers can still inspect geometry.
pub fn stability_report(pot: &dyn ContactPotential, m: f64, v0: f64) -> Result<StabilityReport> {
    validate_mass_speed(m, v0)?;
    let q_max = turning_point(pot, 0.5 * m * v0 * v0)?;
    let regime = classify_regime(pot, q_max)?;
    let force_at_qmax = pot.force(q_max);
    if regime == Regime::Degenerate {
        return Ok(StabilityReport {
            regime,
            q_max,
            force_at_qmax,
            grad_sup: None,
            grad_argmax: None,
            dt_safe: 0.0,
        });
    }
    let (sup, arg) = gradient_supremum(pot, q_max, regime)?;
    Ok(StabilityReport {
        regime,
        q_max,
        force_at_qmax,
        grad_sup: Some(sup),
        grad_argmax: Some(arg),
        dt_safe: 2.0 * m.sqrt() / sup,
    })
}

/// Verdict of an explicit-integration probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
}

/// Result of probing one timestep with velocity Verlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub verdict: Verdict,
    /// Whether the run reached the `q <= 0` exit.
    pub completed: bool,
    /// Peak relative total-energy deviation over the run (informational:
    /// near-critical steps resolve the contact in a handful of samples,
    /// where the sampled energy of a stable bounded orbit still swings by
    /// order one, exactly as for the classical linear-spring limit).
    pub max_energy_drift: f64,
    /// Peak penetration over the conservative turning point.
    pub max_excursion: f64,
    /// Outgoing speed when the contact completed.
    pub exit_speed: Option<f64>,
}

/// Probes stability of velocity Verlet at fixed `dt` through one
/// conservative contact.
///
/// Stable means the discrete orbit stays bounded and leaves the contact:
/// the run reaches `q <= 0` with every state finite and the penetration
/// never exceeding twice the conservative turning point (clipped to the
/// potential domain).
pub fn verify_bound(
    pot: Arc<dyn ContactPotential>,
    m: f64,
    v0: f64,
    dt: f64,
) -> Result<BoundCheck> {
    validate_mass_speed(m, v0)?;
    // reference constants are irrelevant for the conservative probe
    let refs = ReferenceConstants::new(1.0, 1.0).expect("unit constants are valid");
    let scn = ImpactScenario::new(pot, m, v0, refs)?;
    let run = simulate_verlet(&scn, dt)?;
    let completed = run.termination == VerletTermination::Exit;
    let verdict = if completed && run.max_excursion <= 2.0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    };
    Ok(BoundCheck {
        verdict,
        completed,
        max_energy_drift: run.max_energy_drift,
        max_excursion: run.max_excursion,
        exit_speed: run.exit_speed,
    })
}
