//! Contact potential interpolated from sampled `(q, U)` data.
//!
//! Uses monotonicity-preserving piecewise-cubic Hermite interpolation
//! (Fritsch–Carlson slopes, three-point endpoint estimates with the usual
//! sign clamps), so strictly increasing samples yield a strictly increasing
//! interpolant and `U' >= 0` everywhere. The second derivative comes from
//! the same cubic pieces and is only piecewise continuous; treat it as
//! approximate.

use super::ContactPotential;
use crate::error::{Error, Result};
use std::io::BufRead;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct TabulatedPotential {
    q: Vec<f64>,
    u: Vec<f64>,
    /// Hermite slopes dU/dq at each node.
    slope: Vec<f64>,
}

impl TabulatedPotential {
    /// Builds the interpolant from `(q, U)` samples. The first sample must
    /// be exactly `(0, 0)` and both columns must be strictly increasing.
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "tabulated potential needs at least 3 samples, got {}",
                samples.len()
            )));
        }
        if samples[0] != (0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "tabulated potential must start at the sample (0, 0)".into(),
            ));
        }
        for pair in samples.windows(2) {
            let ((q0, u0), (q1, u1)) = (pair[0], pair[1]);
            if !(q1 > q0) || !(u1 > u0) || !q1.is_finite() || !u1.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "tabulated samples must be strictly increasing, violated at q = {q1}"
                )));
            }
        }
        let q: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let u: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let slope = monotone_slopes(&q, &u);
        Ok(Self { q, u, slope })
    }

    /// Reads the two-column CSV interchange format with header `q_m,U_J`.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut samples = Vec::new();
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, Ok(line))) => {
                    let trimmed = line.trim();
                    if trimmed.is_empty() || trimmed.starts_with('#') {
                        continue;
                    }
                    break trimmed.to_owned();
                }
                Some((i, Err(e))) => {
                    return Err(Error::InvalidParameter(format!(
                        "cannot read potential CSV line {}: {e}",
                        i + 1
                    )))
                }
                None => return Err(Error::InvalidParameter("potential CSV is empty".into())),
            }
        };
        if header != "q_m,U_J" {
            return Err(Error::InvalidParameter(format!(
                "potential CSV must start with header 'q_m,U_J', got '{header}'"
            )));
        }
        for (i, line) in lines {
            let line = line.map_err(|e| {
                Error::InvalidParameter(format!("cannot read potential CSV line {}: {e}", i + 1))
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split(',');
            let parse = |field: Option<&str>| -> Result<f64> {
                field
                    .ok_or(())
                    .and_then(|f| f.trim().parse::<f64>().map_err(|_| ()))
                    .map_err(|_| {
                        Error::InvalidParameter(format!(
                            "potential CSV line {} is not a 'q,U' pair: '{trimmed}'",
                            i + 1
                        ))
                    })
            };
            let q = parse(fields.next())?;
            let u = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(Error::InvalidParameter(format!(
                    "potential CSV line {} has more than two columns",
                    i + 1
                )));
            }
            samples.push((q, u));
        }
        Self::new(&samples)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot open potential CSV {}: {e}", path.display()))
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.q.iter().zip(&self.u).map(|(&q, &u)| (q, u))
    }

    /// Index of the segment containing q (clamped to the last segment).
    fn segment(&self, q: f64) -> usize {
        match self.q.binary_search_by(|probe| probe.total_cmp(&q)) {
            Ok(i) => i.min(self.q.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.q.len() - 2),
        }
    }

    fn hermite(&self, q: f64) -> (f64, f64, f64) {
        let i = self.segment(q);
        let h = self.q[i + 1] - self.q[i];
        let t = (q - self.q[i]) / h;
        let (y0, y1) = (self.u[i], self.u[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);

        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;

        let d00 = 6.0 * t * (t - 1.0);
        let d10 = (1.0 - t) * (1.0 - 3.0 * t);
        let d01 = -d00;
        let d11 = t * (3.0 * t - 2.0);
        let deriv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;

        let s00 = 12.0 * t - 6.0;
        let s10 = 6.0 * t - 4.0;
        let s01 = -s00;
        let s11 = 6.0 * t - 2.0;
        let second = (s00 * y0 + s10 * m0 + s01 * y1 + s11 * m1) / (h * h);

        (value, deriv, second)
    }
}

impl ContactPotential for TabulatedPotential {
    fn energy(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.hermite(q).0
    }

    fn force(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.hermite(q).1
    }

    fn stiffness(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        self.hermite(q).2
    }

    fn domain_limit(&self) -> f64 {
        *self.q.last().unwrap()
    }
}

/// Fritsch–Carlson slopes for strictly increasing data.
fn monotone_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = y
        .windows(2)
        .zip(&h)
        .map(|(w, h)| (w[1] - w[0]) / h)
        .collect();

    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m[0] = endpoint_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = endpoint_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// Three-point endpoint estimate with the standard shape-preserving clamps.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        m = 0.0;
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        m = 3.0 * d0;
    }
    m
}
