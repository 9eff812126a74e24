//! Time-series containers for physical and regularised contact motion.

use crate::error::{Error, Result};
use std::io::{self, BufRead, Write};

/// One physical sample: time, penetration, velocity, total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
    pub energy: f64,
}

/// Sampled physical contact trajectory from entry to exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Speed magnitude at the exit crossing.
    pub exit_speed: f64,
    /// Time from entry (t = 0) to the exit crossing.
    pub duration: f64,
}

/// One regularised sample: virtual time, displacement, velocity and the
/// harmonic energy `M x'^2 / 2 + K x^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedSample {
    pub tau: f64,
    pub x: f64,
    pub x_prime: f64,
    pub harmonic_energy: f64,
}

/// Trajectory expressed in the virtual harmonic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedTrajectory {
    pub samples: Vec<TransformedSample>,
}

impl Trajectory {
    /// Writes the `t,q,qdot,E` interchange CSV. Any `comments` are emitted
    /// first, one `#`-prefixed line each.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "t,q,qdot,E")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.q, s.qdot, s.energy
            )?;
        }
        Ok(())
    }

    /// Reads the `t,q,qdot,E` interchange CSV, ignoring `#` comment lines.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut samples: Vec<TrajectorySample> = Vec::new();
        let mut saw_header = false;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| {
                Error::InvalidParameter(format!("cannot read trajectory CSV line {}: {e}", i + 1))
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !saw_header {
                if trimmed != "t,q,qdot,E" {
                    return Err(Error::InvalidParameter(format!(
                        "trajectory CSV must start with header 't,q,qdot,E', got '{trimmed}'"
                    )));
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<f64> = trimmed
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| {
                    Error::InvalidParameter(format!(
                        "trajectory CSV line {} is not numeric: '{trimmed}'",
                        i + 1
                    ))
                })?;
            if fields.len() != 4 {
                return Err(Error::InvalidParameter(format!(
                    "trajectory CSV line {} must have 4 columns",
                    i + 1
                )));
            }
            samples.push(TrajectorySample {
                t: fields[0],
                q: fields[1],
                qdot: fields[2],
                energy: fields[3],
            });
        }
        if samples.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: samples.len(),
            });
        }
        let last = samples.last().unwrap();
        Ok(Self {
            exit_speed: last.qdot.abs(),
            duration: last.t - samples[0].t,
            samples,
        })
    }
}

impl TransformedTrajectory {
    /// Writes the `tau,x,x_prime,E_h` interchange CSV.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "tau,x,x_prime,E_h")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                s.tau, s.x, s.x_prime, s.harmonic_energy
            )?;
        }
        Ok(())
    }
}
