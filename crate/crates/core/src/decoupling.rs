//! Decoupling coefficients and the cyclic deviation bounds built on them.
//!
//! The decoupling coefficient of a Gaussian vector is the largest row sum
//! of absolute correlations, `p(X) = max_i Σ_j |E X_i X_j| / E X_i²`. For a
//! trigonometric polynomial sampled on `Z/nZ` it reduces to
//! `p_{y,x}(n) = (1/A) Σ_{j<n} |Σ_k a_k² cos(2π j_k j/n)|`.

use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::normal::{interval_mass, mills_tail_lower, psi};
use crate::quadrature::adaptive_gk;
use crate::simulate::{CovarianceSpec, McConfig, McEstimate};
use crate::spectrum::{power_sum, PolynomialSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingReport {
    pub p_value: f64,
    /// Row sums (vector case) or per-`j` terms (cyclic case), before
    /// normalization in the cyclic case.
    pub terms: Vec<f64>,
    /// Normalization used: `A(y,x)` in the cyclic case, 1 otherwise.
    pub normalization: f64,
}

/// `max_i Σ_j |C_ij| / C_ii`.
pub fn decoupling_coeff_vector(cov: &CovarianceSpec) -> Result<DecouplingReport> {
    cov.validate()?;
    let n = cov.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let d = cov.entry(i, i);
        if !(d > 0.0) {
            return Err(Error::pre("non-degenerate component", format!("variance of component {i} is {d}")));
        }
        rows.push((0..n).map(|j| cov.entry(i, j).abs()).sum::<f64>() / d);
    }
    Ok(DecouplingReport {
        p_value: rows.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        terms: rows,
        normalization: 1.0,
    })
}

/// Integer frequencies of `spec` on its range.
fn integer_freqs(spec: &PolynomialSpec) -> Result<Vec<i64>> {
    spec.indices()
        .map(|k| {
            spec.freqs
                .integer(k)
                .ok_or_else(|| Error::pre("integer frequencies", "spec has non-integer frequencies"))
        })
        .collect()
}

/// `cos(2π m / n)` with `m` reduced modulo `n` first.
fn cos_ratio(m: i128, n: i128) -> f64 {
    let r = m.rem_euclid(n);
    (2.0 * PI * r as f64 / n as f64).cos()
}

/// `p_{y,x}(n)`: the decoupling coefficient of the polynomial on `Z/nZ`.
pub fn decoupling_coeff_cyclic(spec: &PolynomialSpec, n: usize) -> Result<DecouplingReport> {
    if n == 0 {
        return Err(Error::pre("n", "n >= 1"));
    }
    let a = power_sum(spec, 2);
    if !(a > 0.0) {
        return Err(Error::pre("A > 0", "A(y,x) must be positive"));
    }
    let freqs = integer_freqs(spec)?;
    let a2: Vec<f64> = spec.coefficients().iter().map(|v| v * v).collect();
    let terms: Vec<f64> = (0..n as i128)
        .map(|j| {
            freqs
                .iter()
                .zip(&a2)
                .map(|(&jk, w)| w * cos_ratio(jk as i128 * j, n as i128))
                .sum::<f64>()
                .abs()
        })
        .collect();
    Ok(DecouplingReport {
        p_value: terms.iter().sum::<f64>() / a,
        terms,
        normalization: a,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannGap {
    pub p_value: f64,
    /// `(n/A) ∫_0^1 |Σ a_k² cos(2π j_k u)| du`.
    pub integral_term: f64,
    pub gap: f64,
    /// `(2π/A) Σ j_k a_k²`.
    pub gap_bound: f64,
    /// `(1/A)(n (Σ a_k⁴)^{1/2} + 2π Σ j_k a_k²)`.
    pub p_upper: f64,
    /// Absolute error estimate of the integral (before scaling by `n/A`).
    pub quadrature_error: f64,
    pub gap_holds: bool,
    pub p_upper_holds: bool,
}

/// `∫_0^1 |Σ a_k² cos(2π j_k u)| du`, integrated over panels no longer
/// than a quarter period of the highest frequency.
pub fn cosine_l1_integral(spec: &PolynomialSpec, tol: f64) -> Result<(f64, f64)> {
    let freqs = integer_freqs(spec)?;
    let a2: Vec<f64> = spec.coefficients().iter().map(|v| v * v).collect();
    let jmax = freqs.iter().map(|j| j.unsigned_abs()).max().unwrap_or(0) as usize;
    let w: Vec<f64> = freqs.iter().map(|&j| 2.0 * PI * j as f64).collect();
    adaptive_gk(
        |u: f64| w.iter().zip(&a2).map(|(wk, c)| c * (wk * u).cos()).sum::<f64>().abs(),
        0.0,
        1.0,
        (4 * jmax).max(1),
        tol,
        1 << 20,
    )
}

/// Compares `p_{y,x}(n)` with its Riemann-integral approximation.
pub fn riemann_gap(spec: &PolynomialSpec, n: usize) -> Result<RiemannGap> {
    let tol = 1e-9;
    let p = decoupling_coeff_cyclic(spec, n)?;
    let a = p.normalization;
    let (integral, err) = cosine_l1_integral(spec, tol)?;
    let integral_term = n as f64 * integral / a;
    let gap = (p.p_value - integral_term).abs();
    let weighted: f64 = integer_freqs(spec)?
        .iter()
        .zip(spec.coefficients())
        .map(|(j, c)| j.unsigned_abs() as f64 * c * c)
        .sum();
    let gap_bound = 2.0 * PI * weighted / a;
    let p_upper = (n as f64 * power_sum(spec, 4).sqrt() + 2.0 * PI * weighted) / a;
    let slack = n as f64 * (err + tol) / a;
    Ok(RiemannGap {
        p_value: p.p_value,
        integral_term,
        gap,
        gap_bound,
        p_upper,
        quadrature_error: err,
        gap_holds: gap <= gap_bound + slack,
        p_upper_holds: p.p_value <= p_upper * (1.0 + 1e-12),
    })
}

/// Real trigonometric polynomial `c_0 + Σ_{h=1}^{d} (a_h cos hx + b_h sin hx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn degree(&self) -> usize {
        let last = |v: &[f64]| v.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
        last(&self.cos).max(last(&self.sin))
    }

    pub fn coefficient_l1(&self) -> f64 {
        self.constant.abs() + self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum::<f64>()
    }

    /// Value at `x = ν π / N`, reducing `hν` modulo `2N` exactly.
    pub fn eval_at_lattice(&self, nu: i64, n: i64) -> f64 {
        let mut s = self.constant;
        for (h, (&a, &b)) in self.cos.iter().zip(self.sin.iter().chain(std::iter::repeat(&0.0))).enumerate() {
            let m = ((h as i64 + 1) * nu).rem_euclid(2 * n);
            let (sn, cs) = (PI * m as f64 / n as f64).sin_cos();
            s += a * cs + b * sn;
        }
        for (h, &b) in self.sin.iter().enumerate().skip(self.cos.len()) {
            let m = ((h as i64 + 1) * nu).rem_euclid(2 * n);
            s += b * (PI * m as f64 / n as f64).sin();
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCheck {
    /// `(1/2π) ∫ P`, i.e. the constant coefficient.
    pub lhs: f64,
    /// `(1/2N) Σ_{ν=-N+1}^{N} P(νπ/N)`.
    pub rhs: f64,
    /// False when `deg P > 2N - 1`; the identity is then not asserted.
    pub applicable: bool,
    pub holds: bool,
}

/// Exactness of the `2N`-point equispaced average for `P`.
pub fn mechanical_quadrature_check(p: &TrigPoly, n: usize) -> Result<QuadratureCheck> {
    if n == 0 {
        return Err(Error::pre("N", "N >= 1"));
    }
    let ni = n as i64;
    let rhs = (-ni + 1..=ni).map(|nu| p.eval_at_lattice(nu, ni)).sum::<f64>() / (2 * n) as f64;
    let lhs = p.constant;
    let applicable = p.degree() < 2 * n;
    Ok(QuadratureCheck {
        lhs,
        rhs,
        applicable,
        holds: (lhs - rhs).abs() <= 1e-12 * (1.0 + p.coefficient_l1()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub value: f64,
    pub beta_bar: f64,
    pub p_x: f64,
    /// Smallest admissible exponent `β̄ p(X)`.
    pub required_p: f64,
}

/// `(Π σ_i)^{1/p} / ((1 - 1/β̄)^{(n/2)(1-1/p)} det(C)^{1/(2p)})`, valid when
/// `p >= β̄ p(X)` with `β̄ = (max σ²/min σ²) ∨ β > 1`.
pub fn decoupling_multiplier(cov: &CovarianceSpec, p: f64, beta: f64) -> Result<Multiplier> {
    if !(beta >= 1.0) {
        return Err(Error::pre("beta", "beta >= 1"));
    }
    let px = decoupling_coeff_vector(cov)?.p_value;
    let n = cov.dim();
    let vars: Vec<f64> = (0..n).map(|i| cov.entry(i, i)).collect();
    let ratio = vars.iter().copied().fold(f64::NEG_INFINITY, f64::max) / vars.iter().copied().fold(f64::INFINITY, f64::min);
    let beta_bar = ratio.max(beta);
    if !(beta_bar > 1.0) {
        return Err(Error::pre("beta_bar > 1", format!("beta_bar = {beta_bar}")));
    }
    let required_p = beta_bar * px;
    if p < required_p {
        return Err(Error::ExponentTooSmall { p, required: required_p });
    }
    let eig = SymmetricEigen::new(cov.matrix()).eigenvalues;
    if !(eig.min() > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: eig.min() });
    }
    let ln_det: f64 = eig.iter().map(|e| e.ln()).sum();
    let ln_sigma: f64 = vars.iter().map(|v| 0.5 * v.ln()).sum();
    let nf = n as f64;
    let ln_value = ln_sigma / p - 0.5 * nf * (1.0 - 1.0 / p) * (1.0 - 1.0 / beta_bar).ln() - ln_det / (2.0 * p);
    Ok(Multiplier {
        value: ln_value.exp(),
        beta_bar,
        p_x: px,
        required_p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecouplingCheck {
    /// MC estimate of `P{X_i ∈ box_i for all i}`.
    pub lhs: McEstimate,
    pub rhs: f64,
    pub multiplier: Multiplier,
    pub masses: Vec<f64>,
    pub holds: bool,
}

/// Checks `E Π 1{X_i ∈ [lo_i, hi_i]} <= multiplier Π P{X_i ∈ [lo_i, hi_i]}^{1/p}`
/// by Monte Carlo on the left.
pub fn verify_decoupling_mc(
    cov: &CovarianceSpec,
    p: f64,
    beta: f64,
    boxes: &[(f64, f64)],
    mc: &McConfig,
) -> Result<DecouplingCheck> {
    let n = cov.dim();
    if boxes.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: boxes.len() });
    }
    if n > 6 {
        return Err(Error::pre("n <= 6", format!("n = {n}")));
    }
    let multiplier = decoupling_multiplier(cov, p, beta)?;
    let masses: Vec<f64> = boxes
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let s = cov.entry(i, i).sqrt();
            interval_mass(lo / s, hi / s)
        })
        .collect();
    let rhs = multiplier.value * masses.iter().map(|m| m.powf(1.0 / p)).product::<f64>();
    let f = cov.factor()?;
    let hits = mc.replicate(|_, rng| {
        let mut z = DVector::zeros(n);
        let mut x = vec![0.0; n];
        f.sample_into(rng, &mut z, &mut x);
        x.iter().zip(boxes).all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
    });
    let lhs = McEstimate::probability(hits.iter().filter(|h| **h).count() as u64, mc.reps, mc.seed);
    let holds = lhs.estimate <= rhs + 3.0 * lhs.half_width;
    Ok(DecouplingCheck {
        lhs,
        rhs,
        multiplier,
        masses,
        holds,
    })
}

/// Test functions for the two-point correlation inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `x`
    Identity,
    /// `x² - 1`
    Hermite2,
    /// `x³ - 3x`
    Hermite3,
}

impl TestFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFunction::Identity => x,
            TestFunction::Hermite2 => x * x - 1.0,
            TestFunction::Hermite3 => x * x * x - 3.0 * x,
        }
    }

    /// `(E |f(Z)|^p)^{1/p}` for standard normal `Z`, by quadrature.
    pub fn norm(self, p: f64) -> f64 {
        let breaks: &[f64] = match self {
            TestFunction::Identity => &[-14.0, 0.0, 14.0],
            TestFunction::Hermite2 => &[-14.0, -1.0, 1.0, 14.0],
            TestFunction::Hermite3 => &[-14.0, -3f64.sqrt(), 0.0, 3f64.sqrt(), 14.0],
        };
        let mut s = 0.0;
        for w in breaks.windows(2) {
            s += adaptive_gk(
                |x: f64| self.eval(x).abs().powf(p) * crate::normal::density(x),
                w[0],
                w[1],
                8,
                1e-13,
                1 << 16,
            )
            .expect("smooth integrand")
            .0;
        }
        s.powf(1.0 / p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationInequalities {
    /// MC estimate of `E f(U) h(V)`.
    pub lhs: McEstimate,
    /// `|ρ| ‖f‖_2 ‖h‖_2`.
    pub gebelein_rhs: f64,
    /// `‖f‖_p ‖h‖_p` with `p = 1 + |ρ|`.
    pub nelson_rhs: f64,
    pub gebelein_holds: bool,
    pub nelson_holds: bool,
}

/// Checks the two-point correlation inequalities for a standard Gaussian
/// pair with correlation `rho`, using `f = h`.
pub fn verify_gebelein_nelson(rho: f64, f: TestFunction, mc: &McConfig) -> Result<CorrelationInequalities> {
    if !(rho.abs() <= 1.0) {
        return Err(Error::pre("|rho| <= 1", format!("rho = {rho}")));
    }
    let s = (1.0 - rho * rho).sqrt();
    let samples = mc.replicate(|_, rng| {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        f.eval(z1) * f.eval(rho * z1 + s * z2)
    });
    let lhs = McEstimate::mean(&samples, mc.seed);
    let n2 = f.norm(2.0);
    let gebelein_rhs = rho.abs() * n2 * n2;
    let np = f.norm(1.0 + rho.abs());
    let nelson_rhs = np * np;
    let slack = 3.0 * lhs.half_width;
    Ok(CorrelationInequalities {
        gebelein_holds: lhs.estimate.abs() <= gebelein_rhs + slack,
        nelson_holds: lhs.estimate.abs() <= nelson_rhs + slack,
        lhs,
        gebelein_rhs,
        nelson_rhs,
    })
}

/// Bounds on `P{max_{m=0..z} X(m/n) <= Θ}` with `z = ⌈nε⌉`.
///
/// `value` is `exp(-ε P{X(0)>Θ} n / p_{y,x}(n))`. When
/// `n >= 2π Σ j_k a_k²` the intermediate `value_ii` holds
/// `exp(-ε P{X(0)>Θ} A / ((Σ a_k⁴)^{1/2} + 1))`. `tail_mills_lower` is the
/// Mills-ratio floor on `P{X(0)>Θ}`.
pub fn cyclic_deviation_bound(spec: &PolynomialSpec, n: usize, eps: f64, theta: f64) -> Result<BoundReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::pre("eps", "eps must lie in (0, 1]"));
    }
    if (n as f64) < 1.0 / eps {
        return Err(Error::pre("n >= 1/eps", format!("n = {n}, 1/eps = {}", 1.0 / eps)));
    }
    if !(theta >= 0.0) {
        return Err(Error::pre("theta >= 0", format!("theta = {theta}")));
    }
    let p = decoupling_coeff_cyclic(spec, n)?;
    let a = p.normalization;
    let h = theta / a.sqrt();
    let tail = psi(h);
    let z = (n as f64 * eps).ceil();
    let value_i = (-eps * tail * n as f64 / p.p_value).exp();
    let mut report = BoundReport {
        value: value_i,
        threshold: Some(theta),
        vacuous: value_i >= 1.0,
        ..Default::default()
    }
    .note("p", p.p_value)
    .note("A", a)
    .note("z", z)
    .note("tail", tail)
    .note("tail_mills_lower", mills_tail_lower(h));
    let weighted = 2.0 * PI * spec.weighted_frequency_sum()?;
    if n as f64 >= weighted {
        let value_ii = (-eps * tail * a / (power_sum(spec, 4).sqrt() + 1.0)).exp();
        report = report.note("value_ii", value_ii);
    }
    Ok(report)
}
