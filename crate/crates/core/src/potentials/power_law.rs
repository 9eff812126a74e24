//! Power-law elastic family `U(q) = k q^(p+1) / (p+1)`.

use super::{ContactPotential, GradientLimit};
use crate::error::{Error, Result};

/// Power-law contact potential with force `U'(q) = k q^p`.
///
/// `p = 1` is the linear spring; `p = 3/2` the Hertzian sphere; `p > 1`
/// stiffens, `p < 1` softens with a force gradient that diverges at onset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawPotential {
    k: f64,
    p: f64,
}

impl PowerLawPotential {
    pub fn new(k: f64, p: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power-law stiffness k must be positive and finite, got {k}"
            )));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power-law exponent p must be positive and finite, got {p}"
            )));
        }
        Ok(Self { k, p })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl ContactPotential for PowerLawPotential {
    fn energy(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.k * q.powf(self.p + 1.0) / (self.p + 1.0)
    }

    fn force(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.k * q.powf(self.p)
    }

    fn stiffness(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.k * self.p * q.powf(self.p - 1.0)
    }

    fn domain_limit(&self) -> f64 {
        f64::INFINITY
    }

    // U'/sqrt(2U) = sqrt(k (p+1)/2) q^((p-1)/2), so the onset limit follows
    // from the sign of the exponent.
    fn gradient_limit(&self, _q_scale: f64) -> GradientLimit {
        if self.p < 1.0 {
            GradientLimit::Divergent
        } else if self.p == 1.0 {
            GradientLimit::Finite(self.k.sqrt())
        } else {
            GradientLimit::Finite(0.0)
        }
    }
}
