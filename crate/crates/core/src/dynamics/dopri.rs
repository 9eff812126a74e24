//! Embedded Dormand–Prince 5(4) integrator for the two-state contact ODE,
//! with PI step-size control, fourth-order dense output, and down-crossing
//! event location by bisection on the dense interpolant.

use crate::error::{Error, Result};

type State = [f64; 2];

const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Dense-output polynomial for one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    cont: [State; 5],
}

impl DenseStep {
    /// State at `t0 + theta * h`, `theta` in `[0, 1]`.
    pub fn eval(&self, theta: f64) -> State {
        let th1 = 1.0 - theta;
        let mut out = [0.0; 2];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.cont[0][i]
                + theta
                    * (self.cont[1][i]
                        + th1
                            * (self.cont[2][i]
                                + theta * (self.cont[3][i] + th1 * self.cont[4][i])));
        }
        out
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Integration output: accepted dense steps covering `[0, t_end]`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub steps: Vec<DenseStep>,
    pub t_end: f64,
    pub y_end: State,
}

impl DenseSolution {
    /// State at any `t` in `[0, t_end]` via the covering step.
    pub fn eval(&self, t: f64) -> State {
        let i = self
            .steps
            .partition_point(|s| s.t_end() < t)
            .min(self.steps.len() - 1);
        let step = &self.steps[i];
        step.eval(((t - step.t0) / step.h).clamp(0.0, 1.0))
    }
}

/// Integrates `y' = f(t, y)` from `(0, y0)` until `event_down` crosses from
/// positive to non-positive (returning the solution truncated at the
/// crossing) or until `t_max` (returning [`Error::NoExitDetected`]).
///
/// `event_down` is evaluated on the state; the crossing is located by
/// bisection on the dense interpolant down to machine resolution in `t`.
pub fn integrate_until_down_crossing<F, G>(
    rhs: F,
    y0: State,
    t_max: f64,
    rtol: f64,
    atol: f64,
    event_down: G,
) -> Result<DenseSolution>
where
    F: Fn(f64, State) -> State,
    G: Fn(State) -> f64,
{
    // Hairer-style controller parameters for DOPRI5. The safety factor is
    // kept conservative so the fourth-order dense output tracks the
    // fifth-order step accuracy across the whole step.
    let safe = 0.65;
    let beta = 0.04;
    let expo1 = 0.2 - beta * 0.75;
    let facc1 = 1.0 / 0.2;
    let facc2 = 1.0 / 10.0;

    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = rhs(t, y);
    let mut h = initial_step(&rhs, y, k1, rtol, atol, t_max);
    let mut facold = 1e-4_f64;
    let mut last_rejected = false;

    let mut steps = Vec::new();
    let mut event_prev = event_down(y);

    for _ in 0..50_000_000_u64 {
        if t_max - t <= f64::EPSILON * 4.0 * t_max {
            return Err(Error::NoExitDetected { t_max });
        }
        if h <= f64::EPSILON * 16.0 * t.abs().max(1e-3) {
            return Err(Error::StepSizeUnderflow { t });
        }
        h = h.min(t_max - t);

        // six stages plus FSAL
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        let mut y_stage = [0.0; 2];
        for (stage, a_row) in A.iter().enumerate() {
            for i in 0..2 {
                let mut acc = 0.0;
                for (j, a) in a_row.iter().take(stage + 1).enumerate() {
                    acc += a * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            k[stage + 1] = rhs(t + C[stage] * h, y_stage);
        }
        let y_new = y_stage; // stage 6 uses the 5th-order weights
        let k_new = k[6];

        // error norm against mixed tolerance
        let mut err = 0.0;
        for i in 0..2 {
            let mut e_acc = 0.0;
            for (j, e) in E.iter().enumerate() {
                e_acc += e * k[j][i];
            }
            let sk = atol + rtol * y[i].abs().max(y_new[i].abs());
            let ratio = h * e_acc / sk;
            err += ratio * ratio;
        }
        err = (err / 2.0).sqrt();

        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            // accepted
            let dense = build_dense(t, h, y, y_new, &k);
            steps.push(dense);

            let event_new = event_down(y_new);
            if event_prev > 0.0 && event_new <= 0.0 {
                // The final dense step keeps its full parametrisation; the
                // solution is simply truncated at the located crossing.
                let (t_hit, y_hit) = locate_crossing(&dense, &event_down);
                return Ok(DenseSolution {
                    steps,
                    t_end: t_hit,
                    y_end: y_hit,
                });
            }
            event_prev = event_new;
            t += h;
            y = y_new;
            k1 = k_new;

            let mut fac = fac11 / facold.powf(beta);
            fac = (fac / safe).clamp(facc2, facc1);
            facold = err.max(1e-4);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new;
        } else {
            last_rejected = true;
            h /= (fac11 / safe).min(facc1);
        }
    }
    Err(Error::NoExitDetected { t_max })
}

fn build_dense(t0: f64, h: f64, y: State, y_new: State, k: &[State; 7]) -> DenseStep {
    let mut cont = [[0.0; 2]; 5];
    for i in 0..2 {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[6][i] - bspl;
        let mut d_acc = 0.0;
        for (j, d) in D.iter().enumerate() {
            d_acc += d * k[j][i];
        }
        cont[4][i] = h * d_acc;
    }
    DenseStep { t0, h, cont }
}

fn locate_crossing<G: Fn(State) -> f64>(step: &DenseStep, event: &G) -> (f64, State) {
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if event(step.eval(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = hi;
    (step.t0 + theta * step.h, step.eval(theta))
}

/// Initial step size by the usual two-probe heuristic.
fn initial_step<F: Fn(f64, State) -> State>(
    rhs: &F,
    y0: State,
    f0: State,
    rtol: f64,
    atol: f64,
    t_max: f64,
) -> f64 {
    let norm = |v: State, y_ref: State| {
        let mut acc = 0.0_f64;
        for i in 0..2 {
            let sk = atol + rtol * y_ref[i].abs();
            acc += (v[i] / sk) * (v[i] / sk);
        }
        (acc / 2.0).sqrt()
    };
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let mut h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(t_max);

    let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
    let f1 = rhs(h0, y1);
    let d2 = norm([f1[0] - f0[0], f1[1] - f0[1]], y0) / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_max)
}
