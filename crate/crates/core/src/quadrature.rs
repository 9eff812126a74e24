//! Quadrature utilities: Gauss–Legendre rules with adaptive panel
//! bisection, and a cumulative integrator for sampled path data.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule by Newton iteration on the Legendre
    /// polynomial with the usual Chebyshev initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre rule needs at least 2 nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, p_deriv) = legendre_with_derivative(n, x);
                dp = p_deriv;
                let dx = p / p_deriv;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, deriv)
}

fn base_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// Adaptive panel-bisection integration of `f` over `[a, b]`.
///
/// Each panel is accepted once splitting it changes its estimate by less
/// than its share of `rtol * |I|`. Fails with [`Error::QuadratureFailure`]
/// if refinement exceeds 60 levels.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    integrate_adaptive_with(base_rule(), f, a, b, rtol)
}

/// Same as [`integrate_adaptive`] with a caller-supplied base rule.
pub fn integrate_adaptive_with<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    f: F,
    a: f64,
    b: f64,
    rtol: f64,
) -> Result<f64> {
    let whole = rule.integrate(a, b, &f);
    let scale = whole.abs().max(1e-300);
    let span = b - a;

    // (a, b, estimate, depth)
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, estimate, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let refined = left + right;
        let budget = rtol * scale * ((hi - lo) / span);
        if (refined - estimate).abs() <= budget || (hi - lo) < 1e-14 * span {
            total += refined;
        } else if depth >= 60 {
            return Err(Error::QuadratureFailure {
                context: format!("panel refinement stalled on [{lo}, {hi}]"),
            });
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(total)
}

/// Integral over the two halves of a quadratic through three samples.
///
/// Returns the integrals of the interpolating parabola over `[t0, t1]` and
/// `[t1, t2]`; their sum is the non-uniform Simpson panel value.
pub fn quadratic_panel_halves(t0: f64, t1: f64, t2: f64, f0: f64, f1: f64, f2: f64) -> (f64, f64) {
    let h0 = t1 - t0;
    let h1 = t2 - t1;
    let span = h0 + h1;
    let first = f0 * h0 * (3.0 * span - h0) / (6.0 * span)
        + f1 * h0 * (3.0 * span - 2.0 * h0) / (6.0 * h1)
        - f2 * h0 * h0 * h0 / (6.0 * span * h1);
    let second = -f0 * h1 * h1 * h1 / (6.0 * span * h0)
        + f1 * h1 * (3.0 * span - 2.0 * h1) / (6.0 * h0)
        + f2 * h1 * (3.0 * span - h1) / (6.0 * span);
    (first, second)
}

/// Cumulative integral of sampled data `g(t)` at every sample point.
///
/// Composite Simpson over consecutive sample pairs (quadratic panels of two
/// intervals, split at the interior node so every sample gets a value) with
/// a single trapezoid fallback when the interval count is odd.
pub fn cumulative_path_integral(t: &[f64], g: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), g.len());
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let mut i = 0;
    while i + 2 < n {
        let (first, second) =
            quadratic_panel_halves(t[i], t[i + 1], t[i + 2], g[i], g[i + 1], g[i + 2]);
        out[i + 1] = out[i] + first;
        out[i + 2] = out[i + 1] + second;
        i += 2;
    }
    if i + 1 < n {
        out[i + 1] = out[i] + 0.5 * (g[i] + g[i + 1]) * (t[i + 1] - t[i]);
    }
    out
}
