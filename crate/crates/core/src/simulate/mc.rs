use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{CovarianceSpec, GridSpec, McConfig, McEstimate};
use crate::spectrum::PolynomialSpec;
use crate::{Error, Result};

/// Functional whose grid supremum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `max_i X_i`.
    #[default]
    Max,
    /// `max_i |X_i|`.
    AbsMax,
}

impl Functional {
    #[inline]
    fn sup(self, values: &[f64]) -> f64 {
        match self {
            Functional::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Functional::AbsMax => values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        }
    }
}

/// Precomputed trigonometric basis for a spec on a fixed set of nodes.
///
/// A replication draws `g_k, g'_k` for `k = y..=x` in that order
/// (interleaved), so two samplers over specs with the same range consume
/// identical Gaussian inputs from the same generator.
#[derive(Debug, Clone)]
pub struct PathSampler {
    terms: usize,
    nodes: usize,
    coeffs: Vec<f64>,
    /// Row-major `nodes x 2 terms`: `cos(ω_k t_i), sin(ω_k t_i)`.
    basis: Vec<f64>,
}

impl PathSampler {
    pub fn new(spec: &PolynomialSpec, nodes: &[f64]) -> Self {
        let omegas = spec.angular_frequencies();
        let terms = omegas.len();
        let mut basis = Vec::with_capacity(nodes.len() * 2 * terms);
        for &t in nodes {
            for &w in &omegas {
                let (s, c) = (w * t).sin_cos();
                basis.push(c);
                basis.push(s);
            }
        }
        Self {
            terms,
            nodes: nodes.len(),
            coeffs: spec.coefficients().to_vec(),
            basis,
        }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Draws the interleaved Gaussian inputs `(g_y, g'_y, g_{y+1}, ...)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..2 * self.terms).map(|_| rng.sample::<f64, _>(StandardNormal)));
    }

    /// Path values for given Gaussian inputs.
    pub fn path(&self, gaussians: &[f64], out: &mut Vec<f64>) {
        let w: Vec<f64> = gaussians
            .chunks_exact(2)
            .zip(&self.coeffs)
            .flat_map(|(g, a)| [a * g[0], a * g[1]])
            .collect();
        out.clear();
        if self.terms == 0 {
            out.resize(self.nodes, 0.0);
            return;
        }
        out.extend(self.basis.chunks_exact(2 * self.terms).map(|row| {
            let mut s = 0.0;
            for (b, wj) in row.iter().zip(&w) {
                s += b * wj;
            }
            s
        }));
    }
}

fn same_range(a: &PolynomialSpec, b: &PolynomialSpec) -> Result<()> {
    if a.y != b.y || a.x != b.x {
        return Err(Error::pre("coupled range", "coupled specs must share the index range"));
    }
    Ok(())
}

/// One path from replication 0 of `seed`.
pub fn sample_path(spec: &PolynomialSpec, grid: &GridSpec, seed: u64) -> Result<Vec<f64>> {
    let nodes = grid.nodes(Some(spec))?;
    let s = PathSampler::new(spec, &nodes);
    let mut rng = McConfig::new(1, seed).rng(0);
    let (mut g, mut out) = (Vec::new(), Vec::new());
    s.draw(&mut rng, &mut g);
    s.path(&g, &mut out);
    Ok(out)
}

/// Paths of two specs from the same Gaussian inputs (replication 0 of `seed`).
pub fn sample_paths_coupled(
    a: &PolynomialSpec,
    b: &PolynomialSpec,
    grid: &GridSpec,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    same_range(a, b)?;
    let nodes = grid.nodes(Some(a))?;
    let (sa, sb) = (PathSampler::new(a, &nodes), PathSampler::new(b, &nodes));
    let mut rng = McConfig::new(1, seed).rng(0);
    let mut g = Vec::new();
    sa.draw(&mut rng, &mut g);
    let (mut pa, mut pb) = (Vec::new(), Vec::new());
    sa.path(&g, &mut pa);
    sb.path(&g, &mut pb);
    Ok((pa, pb))
}

fn path_sups(spec: &PolynomialSpec, grid: &GridSpec, functional: Functional, mc: &McConfig) -> Result<Vec<f64>> {
    let nodes = grid.nodes(Some(spec))?;
    let s = PathSampler::new(spec, &nodes);
    Ok(mc.replicate(|_, rng| {
        let (mut g, mut out) = (Vec::new(), Vec::new());
        s.draw(rng, &mut g);
        s.path(&g, &mut out);
        functional.sup(&out)
    }))
}

fn count_at_most(sups: &[f64], theta: f64) -> u64 {
    sups.iter().filter(|&&s| s <= theta).count() as u64
}

/// Estimates `P{max over grid nodes <= Θ}`. This is at least the
/// probability of the same event over the whole interval.
pub fn mc_sup_prob(spec: &PolynomialSpec, grid: &GridSpec, theta: f64, mc: &McConfig) -> Result<McEstimate> {
    Ok(mc_sup_prob_multi(spec, grid, &[theta], mc)?.remove(0))
}

/// [`mc_sup_prob`] at several thresholds on common realizations.
pub fn mc_sup_prob_multi(
    spec: &PolynomialSpec,
    grid: &GridSpec,
    thetas: &[f64],
    mc: &McConfig,
) -> Result<Vec<McEstimate>> {
    let sups = path_sups(spec, grid, Functional::Max, mc)?;
    Ok(thetas
        .iter()
        .map(|&t| McEstimate::probability(count_at_most(&sups, t), mc.reps, mc.seed))
        .collect())
}

/// Mean over replications of the grid supremum of `functional(X)`.
pub fn mc_expected_sup(
    spec: &PolynomialSpec,
    grid: &GridSpec,
    functional: Functional,
    mc: &McConfig,
) -> Result<McEstimate> {
    let sups = path_sups(spec, grid, functional, mc)?;
    Ok(McEstimate::mean(&sups, mc.seed))
}

/// Per-replication `max over grid |X_a - X_b|` for coupled specs.
pub fn sup_diff_samples(a: &PolynomialSpec, b: &PolynomialSpec, grid: &GridSpec, mc: &McConfig) -> Result<Vec<f64>> {
    same_range(a, b)?;
    let nodes = grid.nodes(Some(a))?;
    let (sa, sb) = (PathSampler::new(a, &nodes), PathSampler::new(b, &nodes));
    Ok(mc.replicate(|_, rng| {
        let (mut g, mut pa, mut pb) = (Vec::new(), Vec::new(), Vec::new());
        sa.draw(rng, &mut g);
        sa.path(&g, &mut pa);
        sb.path(&g, &mut pb);
        pa.iter().zip(&pb).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()))
    }))
}

/// Mean of `max over grid |X_a - X_b|` with shared Gaussian inputs.
pub fn mc_expected_sup_diff(
    a: &PolynomialSpec,
    b: &PolynomialSpec,
    grid: &GridSpec,
    mc: &McConfig,
) -> Result<McEstimate> {
    let d = sup_diff_samples(a, b, grid, mc)?;
    Ok(McEstimate::mean(&d, mc.seed))
}

/// Sup probabilities of two coupled specs on the same replications:
/// `P{max X_a <= thetas_a[i]}` and `P{max X_b <= thetas_b[i]}`.
pub fn mc_coupled_sup_prob(
    a: &PolynomialSpec,
    b: &PolynomialSpec,
    grid: &GridSpec,
    thetas_a: &[f64],
    thetas_b: &[f64],
    mc: &McConfig,
) -> Result<(Vec<McEstimate>, Vec<McEstimate>)> {
    same_range(a, b)?;
    let nodes = grid.nodes(Some(a))?;
    let (sa, sb) = (PathSampler::new(a, &nodes), PathSampler::new(b, &nodes));
    let sups = mc.replicate(|_, rng| {
        let (mut g, mut pa, mut pb) = (Vec::new(), Vec::new(), Vec::new());
        sa.draw(rng, &mut g);
        sa.path(&g, &mut pa);
        sb.path(&g, &mut pb);
        (Functional::Max.sup(&pa), Functional::Max.sup(&pb))
    });
    let (ua, ub): (Vec<f64>, Vec<f64>) = sups.into_iter().unzip();
    let est = |s: &[f64], ts: &[f64]| {
        ts.iter()
            .map(|&t| McEstimate::probability(count_at_most(s, t), mc.reps, mc.seed))
            .collect::<Vec<_>>()
    };
    Ok((est(&ua, thetas_a), est(&ub, thetas_b)))
}

fn vector_sups(cov: &CovarianceSpec, functional: Functional, mc: &McConfig) -> Result<Vec<f64>> {
    let f = cov.factor()?;
    let n = f.dim();
    Ok(mc.replicate(|_, rng| {
        let mut z = DVector::zeros(n);
        let mut x = vec![0.0; n];
        f.sample_into(rng, &mut z, &mut x);
        functional.sup(&x)
    }))
}

/// Estimates `P{functional sup_i X_i <= Θ}` for `X ~ N(0, C)`.
pub fn mc_vector_sup_prob(
    cov: &CovarianceSpec,
    theta: f64,
    functional: Functional,
    mc: &McConfig,
) -> Result<McEstimate> {
    Ok(mc_vector_sup_prob_multi(cov, &[theta], functional, mc)?.remove(0))
}

pub fn mc_vector_sup_prob_multi(
    cov: &CovarianceSpec,
    thetas: &[f64],
    functional: Functional,
    mc: &McConfig,
) -> Result<Vec<McEstimate>> {
    let sups = vector_sups(cov, functional, mc)?;
    Ok(thetas
        .iter()
        .map(|&t| McEstimate::probability(count_at_most(&sups, t), mc.reps, mc.seed))
        .collect())
}

pub fn mc_vector_expected_sup(cov: &CovarianceSpec, functional: Functional, mc: &McConfig) -> Result<McEstimate> {
    let sups = vector_sups(cov, functional, mc)?;
    Ok(McEstimate::mean(&sups, mc.seed))
}
