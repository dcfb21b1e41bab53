use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Covariance of a finite centered Gaussian vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "structure", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CovarianceSpec {
    /// Row-major symmetric matrix.
    Explicit { rows: Vec<Vec<f64>> },
    /// Unit variances, all correlations `lambda`.
    Equicorrelated { n: usize, lambda: f64 },
    /// `N` diagonal `k x k` blocks with unit diagonal and off-diagonal `u`;
    /// every entry outside the blocks equals `lambda`.
    Block { n_blocks: usize, k: usize, u: f64, lambda: f64 },
    /// Toeplitz matrix `gamma[|i - j|]`, dimension `gamma.len()`.
    Stationary { gamma: Vec<f64> },
}

impl CovarianceSpec {
    pub fn identity(n: usize) -> Self {
        CovarianceSpec::Equicorrelated { n, lambda: 0.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::Explicit { rows } => rows.len(),
            CovarianceSpec::Equicorrelated { n, .. } => *n,
            CovarianceSpec::Block { n_blocks, k, .. } => n_blocks * k,
            CovarianceSpec::Stationary { gamma } => gamma.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CovarianceSpec::Explicit { rows } => {
                let n = rows.len();
                for r in rows {
                    if r.len() != n {
                        return Err(Error::DimensionMismatch { expected: n, got: r.len() });
                    }
                }
                for i in 0..n {
                    for j in 0..i {
                        let (a, b) = (rows[i][j], rows[j][i]);
                        if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                            return Err(Error::pre("symmetric", format!("entry ({i},{j}) = {a} but ({j},{i}) = {b}")));
                        }
                    }
                }
            }
            CovarianceSpec::Equicorrelated { n, lambda } => {
                if *n == 0 {
                    return Err(Error::pre("dimension", "n >= 1"));
                }
                let lo = if *n > 1 { -1.0 / (*n as f64 - 1.0) } else { f64::NEG_INFINITY };
                if !(*lambda > lo && *lambda < 1.0) {
                    return Err(Error::pre(
                        "equicorrelation",
                        format!("lambda = {lambda} must lie in ({lo}, 1)"),
                    ));
                }
            }
            CovarianceSpec::Block { n_blocks, k, u, lambda } => {
                if *n_blocks == 0 || *k == 0 {
                    return Err(Error::pre("dimension", "N >= 1 and k >= 1"));
                }
                if !(u.abs() < 1.0 && lambda.abs() < 1.0) {
                    return Err(Error::pre("block correlations", "|u| < 1 and |lambda| < 1"));
                }
            }
            CovarianceSpec::Stationary { gamma } => {
                if gamma.is_empty() || !(gamma[0] > 0.0) {
                    return Err(Error::pre("stationary variance", "gamma(0) > 0"));
                }
            }
        }
        Ok(())
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            CovarianceSpec::Explicit { rows } => rows[i][j],
            CovarianceSpec::Equicorrelated { lambda, .. } => {
                if i == j {
                    1.0
                } else {
                    *lambda
                }
            }
            CovarianceSpec::Block { k, u, lambda, .. } => {
                if i == j {
                    1.0
                } else if i / k == j / k {
                    *u
                } else {
                    *lambda
                }
            }
            CovarianceSpec::Stationary { gamma } => gamma[i.abs_diff(j)],
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Lower-triangular factor `L` with `L L' = C`, adding diagonal jitter
    /// `1e-12 * trace / n` once if the plain factorization fails.
    pub fn factor(&self) -> Result<Factor> {
        self.validate()?;
        let c = self.matrix();
        let n = c.nrows();
        if let Some(ch) = Cholesky::new(c.clone()) {
            return Ok(Factor { l: ch.l(), jitter: 0.0 });
        }
        let jitter = 1e-12 * c.trace() / n as f64;
        let mut cj = c.clone();
        for i in 0..n {
            cj[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(cj) {
            return Ok(Factor { l: ch.l(), jitter });
        }
        let min_eigenvalue = SymmetricEigen::new(c).eigenvalues.min();
        Err(Error::NotPositiveDefinite { min_eigenvalue })
    }
}

/// Matrix square root used for sampling.
#[derive(Debug, Clone)]
pub struct Factor {
    pub l: DMatrix<f64>,
    /// Diagonal jitter that was added, zero when none was needed.
    pub jitter: f64,
}

impl Factor {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// Writes `L z` for fresh standard normal `z` into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, z: &mut DVector<f64>, out: &mut [f64]) {
        let n = self.dim();
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = self.l.row(i);
            let mut s = 0.0;
            for j in 0..=i {
                s += row[j] * z[j];
            }
            *o = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_matrix_layout() {
        let c = CovarianceSpec::Block { n_blocks: 2, k: 2, u: 0.5, lambda: 0.1 }.matrix();
        let expect = [
            [1.0, 0.5, 0.1, 0.1],
            [0.5, 1.0, 0.1, 0.1],
            [0.1, 0.1, 1.0, 0.5],
            [0.1, 0.1, 0.5, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn factor_reproduces_matrix() {
        let spec = CovarianceSpec::Stationary { gamma: vec![2.0, 0.8, 0.3, -0.1] };
        let f = spec.factor().unwrap();
        let back = &f.l * f.l.transpose();
        assert!((back - spec.matrix()).abs().max() < 1e-14);
        assert_eq!(f.jitter, 0.0);
    }

    #[test]
    fn singular_matrix_uses_jitter_then_fails_loudly() {
        // rank one, PSD: jitter rescues it
        let ones = CovarianceSpec::Explicit { rows: vec![vec![1.0; 3]; 3] };
        let f = ones.factor().unwrap();
        assert!(f.jitter > 0.0);
        // indefinite: fails with the smallest eigenvalue
        let bad = CovarianceSpec::Explicit { rows: vec![vec![1.0, 2.0], vec![2.0, 1.0]] };
        match bad.factor() {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => assert!((min_eigenvalue + 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equicorrelation_range_checked() {
        assert!(CovarianceSpec::Equicorrelated { n: 3, lambda: -0.5 }.validate().is_err());
        assert!(CovarianceSpec::Equicorrelated { n: 3, lambda: -0.49 }.validate().is_ok());
        assert!(CovarianceSpec::Equicorrelated { n: 3, lambda: 1.0 }.validate().is_err());
    }
}
