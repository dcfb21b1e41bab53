use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spectrum::PolynomialSpec;
use crate::{Error, Result};

/// Default node density for suprema over a continuous interval.
pub const DEFAULT_NODES_PER_UNIT: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridMode {
    /// `n` equispaced nodes including both endpoints (`n = 1` gives `t0`).
    Uniform { n: usize },
    /// Spacing `1/n` from `t0` with `n >= max(2π Σ j_k a_k², 1/ε)`; integer
    /// frequencies only.
    GapControlled { eps: f64 },
    /// Spacing `1/density`, both endpoints included.
    PerUnit { density: usize },
    /// `t0 + j * step` for `j = 0..count`.
    Step { step: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub mode: GridMode,
}

impl GridSpec {
    pub fn uniform(t0: f64, t1: f64, n: usize) -> Self {
        Self {
            t0,
            t1,
            mode: GridMode::Uniform { n },
        }
    }

    pub fn per_unit(t0: f64, t1: f64, density: usize) -> Self {
        Self {
            t0,
            t1,
            mode: GridMode::PerUnit { density },
        }
    }

    /// Lattice `j / n`, `j = 0..=z`.
    pub fn lattice(n: usize, z: usize) -> Self {
        Self {
            t0: 0.0,
            t1: z as f64 / n as f64,
            mode: GridMode::Step {
                step: 1.0 / n as f64,
                count: z + 1,
            },
        }
    }

    /// Smallest `n` satisfying the periodic grid rule.
    pub fn gap_controlled_n(spec: &PolynomialSpec, eps: f64) -> Result<usize> {
        if !(eps > 0.0) {
            return Err(Error::pre("eps", "eps must be positive"));
        }
        let s = 2.0 * PI * spec.weighted_frequency_sum()?;
        Ok(s.max(1.0 / eps).ceil().max(1.0) as usize)
    }

    /// Node positions. `spec` is needed for the gap-controlled mode only.
    pub fn nodes(&self, spec: Option<&PolynomialSpec>) -> Result<Vec<f64>> {
        if !(self.t0 <= self.t1) {
            return Err(Error::pre("grid interval", format!("t0 = {} > t1 = {}", self.t0, self.t1)));
        }
        let len = self.t1 - self.t0;
        let spaced = |step: f64| {
            let count = (len / step + 1e-9).floor() as usize + 1;
            (0..count).map(|j| self.t0 + j as f64 * step).collect::<Vec<_>>()
        };
        Ok(match self.mode {
            GridMode::Uniform { n } => {
                if n == 0 {
                    return Err(Error::pre("grid size", "n >= 1"));
                }
                if n == 1 {
                    vec![self.t0]
                } else {
                    (0..n).map(|i| self.t0 + len * i as f64 / (n - 1) as f64).collect()
                }
            }
            GridMode::GapControlled { eps } => {
                let spec = spec.ok_or_else(|| Error::pre("gap-controlled grid", "needs the polynomial spec"))?;
                let n = Self::gap_controlled_n(spec, eps)?;
                spaced(1.0 / n as f64)
            }
            GridMode::PerUnit { density } => {
                if density == 0 {
                    return Err(Error::pre("grid density", "density >= 1"));
                }
                spaced(1.0 / density as f64)
            }
            GridMode::Step { step, count } => {
                if !(step > 0.0) || count == 0 {
                    return Err(Error::pre("grid step", "step > 0 and count >= 1"));
                }
                (0..count).map(|j| self.t0 + j as f64 * step).collect()
            }
        })
    }
}
