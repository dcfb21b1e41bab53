//! Closed-form upper bounds on `P{sup X <= Θ}` for Gaussian vectors and
//! trigonometric polynomials, plus the two-sided bound for stationary
//! sequences.
//!
//! Each bound returns a [`BoundReport`] carrying the intermediate quantities
//! it was built from. Unspecified absolute constants are explicit arguments
//! and are echoed in `free_constants`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::normal::{interval_mass, phi};
use crate::simulate::CovarianceSpec;
use crate::spectrum::{
    check_moderate_condition, power_sum, spectral_geometric_mean_with, GeometricMeanOptions, PolynomialSpec,
    SpectralDensity,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    /// Threshold the bound applies to, when the statement fixes it.
    pub threshold: Option<f64>,
    pub intermediates: BTreeMap<String, f64>,
    pub free_constants: BTreeMap<String, f64>,
    /// True when a probability bound exceeds 1.
    pub vacuous: bool,
}

impl BoundReport {
    fn new(value: f64) -> Self {
        Self {
            value,
            vacuous: value >= 1.0,
            ..Default::default()
        }
    }

    fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = Some(t);
        self
    }

    pub(crate) fn note(mut self, name: &str, v: f64) -> Self {
        self.intermediates.insert(name.to_string(), v);
        self
    }

    fn constant(mut self, name: &str, v: f64) -> Self {
        self.free_constants.insert(name.to_string(), v);
        self
    }

    pub fn intermediate(&self, name: &str) -> Option<f64> {
        self.intermediates.get(name).copied()
    }
}

fn check_unit_open(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::pre(name, format!("{name} = {v} must lie in (0, 1)")));
    }
    Ok(())
}

/// `(1 + λn/(1-λ))^{(n-1)/2}`.
pub fn equicorrelated_multiplier(n: usize, lambda: f64) -> f64 {
    (1.0 + lambda * n as f64 / (1.0 - lambda)).powf((n as f64 - 1.0) / 2.0)
}

/// Upper bound on `P{max_i X_i <= Θ}` for `n` unit-variance Gaussians with
/// pairwise correlations at most `λ`:
/// `(1 + λn/(1-λ))^{(n-1)/2} Φ(Θ/sqrt(1+λ(n-1)))^n`.
///
/// Valid for every real `Θ`, including negative values.
pub fn bound_equicorrelated(n: usize, lambda: f64, theta: f64) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::pre("n", "n >= 2"));
    }
    check_unit_open("lambda", lambda)?;
    let mult = equicorrelated_multiplier(n, lambda);
    let scale = (1.0 + lambda * (n as f64 - 1.0)).sqrt();
    let p = phi(theta / scale);
    Ok(BoundReport::new(mult * p.powi(n as i32))
        .with_threshold(theta)
        .note("multiplier", mult)
        .note("phi_term", p)
        .note("scale", scale))
}

/// `b_n = sqrt(log(n² / (4π log n)))`, defined when the argument exceeds 1.
pub fn gumbel_b(n: usize) -> Result<f64> {
    let nf = n as f64;
    let arg = if n >= 2 { nf * nf / (4.0 * PI * nf.ln()) } else { 0.0 };
    if arg <= 1.0 {
        return Err(Error::pre("n", format!("b_n is not real for n = {n}")));
    }
    Ok(arg.ln().sqrt())
}

/// Gumbel-type form of [`bound_equicorrelated`] at
/// `Θ = (x/b_n + b_n) sqrt(1 + λ(n-1))`.
pub fn bound_gumbel(n: usize, lambda: f64, x_arg: f64, eps: f64) -> Result<BoundReport> {
    check_unit_open("lambda", lambda)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::pre("eps", "eps must lie in [0, 1]"));
    }
    let b = gumbel_b(n)?;
    if x_arg < -b * b {
        return Err(Error::pre("x", format!("x = {x_arg} < -b_n² = {}", -b * b)));
    }
    let threshold = (x_arg / b + b) * (1.0 + lambda * (n as f64 - 1.0)).sqrt();
    let mult = equicorrelated_multiplier(n, lambda);
    let expo = (-(-x_arg).exp() * (1.0 - eps)).exp();
    Ok(BoundReport::new(mult * expo)
        .with_threshold(threshold)
        .note("b_n", b)
        .note("multiplier", mult)
        .note("exp_factor", expo))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallLambda {
    pub threshold: f64,
    pub lambda_max: f64,
    /// `sqrt(log n)`, the scale of the exponential decay.
    pub decay_scale: f64,
}

/// Threshold `sqrt(2 log n - 2 log log n - η (log n)/n)` and the admissible
/// correlation level `η/(2n)` for nearly independent vectors.
pub fn bound_small_lambda_threshold(n: usize, eta: f64) -> Result<SmallLambda> {
    if n < 3 {
        return Err(Error::pre("n", "n >= 3"));
    }
    check_unit_open("eta", eta)?;
    small_lambda_from_log(n as f64, (n as f64).ln(), eta)
}

fn small_lambda_from_log(n: f64, ln_n: f64, eta: f64) -> Result<SmallLambda> {
    let radicand = 2.0 * ln_n - 2.0 * ln_n.ln() - eta * ln_n / n;
    if radicand <= 0.0 {
        return Err(Error::Domain(format!("threshold radicand {radicand} is not positive")));
    }
    Ok(SmallLambda {
        threshold: radicand.sqrt(),
        lambda_max: eta / (2.0 * n),
        decay_scale: ln_n.sqrt(),
    })
}

fn check_block(lambda: f64, u: f64, k: usize, n_blocks: usize) -> Result<()> {
    if k == 0 || n_blocks == 0 {
        return Err(Error::pre("block dimensions", "k >= 1 and N >= 1"));
    }
    if !(lambda > 0.0) {
        return Err(Error::pre("lambda positive", format!("lambda = {lambda}")));
    }
    if !(lambda <= u) {
        return Err(Error::pre("lambda <= u", format!("lambda = {lambda}, u = {u}")));
    }
    if !(u < 1.0) {
        return Err(Error::pre("u < 1", format!("u = {u}")));
    }
    if !(n_blocks as f64 * u > lambda) {
        return Err(Error::pre("N u > lambda", format!("N u = {}", n_blocks as f64 * u)));
    }
    if !((k as f64 - 1.0) * u > 1.0) {
        return Err(Error::pre("(k-1) u > 1", format!("(k-1) u = {}", (k as f64 - 1.0) * u)));
    }
    Ok(())
}

fn beta_formula(lambda: f64, u: f64, k: usize, n_blocks: usize) -> f64 {
    let (kf, nf) = (k as f64, n_blocks as f64);
    let first = 1.0 / (1.0 - u + kf * (u - lambda));
    let num = 1.0 - u + nf * kf * u - kf * lambda;
    let den = 1.0 - u + nf * kf * (u + lambda) - kf * lambda;
    first * num / den
}

/// `β(λ,u) = (1/(1-u+k(u-λ))) (1-u+Nku-kλ)/(1-u+Nk(u+λ)-kλ)`.
///
/// The preconditions do not force `β < 1` (e.g. `λ` close to `u` with
/// large `k`); such inputs return [`Error::BetaOutOfRange`].
pub fn beta_block(lambda: f64, u: f64, k: usize, n_blocks: usize) -> Result<f64> {
    check_block(lambda, u, k, n_blocks)?;
    let beta = beta_formula(lambda, u, k, n_blocks);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BetaOutOfRange { beta });
    }
    Ok(beta)
}

/// Coefficients `(global, block, diagonal)` of the quadratic form
/// `c_g (Σ x)² + c_b Σ_j (Σ_{block j} x)² + c_d Σ x²`.
pub fn q_form_coefficients(lambda: f64, u: f64, k: usize, n_blocks: usize) -> (f64, f64, f64) {
    let (kf, nf) = (k as f64, n_blocks as f64);
    let inner = 1.0 - u + kf * (u - lambda);
    let global = -lambda / (inner * ((1.0 - u) + nf * kf * u + (nf - 1.0) * kf * lambda));
    let block = -(u - lambda) / ((1.0 - u) * inner);
    let diag = 1.0 / (1.0 - u);
    (global, block, diag)
}

/// The displayed quadratic form, evaluated term by term.
pub fn q_form(lambda: f64, u: f64, k: usize, n_blocks: usize, x: &[f64]) -> Result<f64> {
    if x.len() != n_blocks * k {
        return Err(Error::DimensionMismatch {
            expected: n_blocks * k,
            got: x.len(),
        });
    }
    let (cg, cb, cd) = q_form_coefficients(lambda, u, k, n_blocks);
    let total: f64 = x.iter().sum();
    let blocks: f64 = x.chunks(k).map(|b| b.iter().sum::<f64>().powi(2)).sum();
    let squares: f64 = x.iter().map(|v| v * v).sum();
    Ok(cg * total * total + cb * blocks + cd * squares)
}

/// `[(1-u)^{(k-1)N} (1+u(k-1))^N]^{1/2}`, the determinant of the
/// block-diagonal part, square-rooted.
pub fn block_normalizer(u: f64, k: usize, n_blocks: usize) -> f64 {
    let (kf, nf) = (k as f64, n_blocks as f64);
    ((1.0 - u).powf((kf - 1.0) * nf) * (1.0 + u * (kf - 1.0)).powf(nf)).sqrt()
}

/// Closed form of the product-Gaussian integral
/// `Φ(Θ sqrt β)^{Nk} / (β^{Nk/2} normalizer)`.
pub fn bound_block(lambda: f64, u: f64, k: usize, n_blocks: usize, theta: f64) -> Result<BoundReport> {
    let beta = beta_block(lambda, u, k, n_blocks)?;
    let norm = block_normalizer(u, k, n_blocks);
    let dim = (k * n_blocks) as i32;
    if dim > 12 {
        return Err(Error::pre("N k <= 12", format!("N k = {dim}")));
    }
    let p = phi(theta * beta.sqrt());
    let value = p.powi(dim) / (beta.powf(dim as f64 / 2.0) * norm);
    Ok(BoundReport::new(value)
        .with_threshold(theta)
        .note("beta", beta)
        .note("normalizer", norm)
        .note("phi_term", p))
}

/// Same integral with `β = 1/λ_max(C(λ,u))` and the true `det C(λ,u)`.
/// This is the bound the density comparison actually yields; it is kept for
/// comparison with [`bound_block`].
pub fn bound_block_exact_form(lambda: f64, u: f64, k: usize, n_blocks: usize, theta: f64) -> Result<BoundReport> {
    let cov = CovarianceSpec::Block { n_blocks, k, u, lambda };
    cov.validate()?;
    let eig = SymmetricEigen::new(cov.matrix()).eigenvalues;
    let (min, max) = (eig.min(), eig.max());
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let beta = 1.0 / max;
    let det: f64 = eig.iter().product();
    let dim = (k * n_blocks) as i32;
    let p = phi(theta * beta.sqrt());
    let value = p.powi(dim) / (beta.powf(dim as f64 / 2.0) * det.sqrt());
    Ok(BoundReport::new(value)
        .with_threshold(theta)
        .note("beta", beta)
        .note("det", det)
        .note("phi_term", p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoBounds {
    pub lower: f64,
    pub upper: f64,
    pub geometric_mean: f64,
    /// True when `G(f) = 0`, making the upper bound 1.
    pub upper_vacuous: bool,
}

/// Two-sided bound on `P{max_{j<=n} |X_j| <= z}` for a stationary sequence
/// with spectral density `f`.
pub fn szego_bounds(f: &SpectralDensity, n: usize, z: f64) -> Result<SzegoBounds> {
    szego_bounds_with(f, n, z, GeometricMeanOptions::default())
}

pub fn szego_bounds_with(f: &SpectralDensity, n: usize, z: f64, opts: GeometricMeanOptions) -> Result<SzegoBounds> {
    if !(z > 0.0) {
        return Err(Error::pre("z", "z > 0"));
    }
    let g = spectral_geometric_mean_with(f, opts)?;
    let lower = interval_mass(-z, z).powi(n as i32);
    if g.diverged {
        return Ok(SzegoBounds {
            lower,
            upper: 1.0,
            geometric_mean: 0.0,
            upper_vacuous: true,
        });
    }
    let s = z / g.value.sqrt();
    Ok(SzegoBounds {
        lower,
        upper: interval_mass(-s, s).powi(n as i32),
        geometric_mean: g.value,
        upper_vacuous: false,
    })
}

/// Upper bound on `P{sup_{0<=t<=ε} X(t) <= Θ}` for a trigonometric
/// polynomial, with `Θ = sqrt(2η A log A)` when `η < 1` and
/// `Θ = sqrt(2A log(A/V))` when `η = 1`. Fails when the moderate condition
/// (η < 1) or `0 < V < A` (η = 1) does not hold.
pub fn bound_moderate_trig(spec: &PolynomialSpec, eta: f64, eps: f64, c: f64, v: Option<f64>) -> Result<BoundReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::pre("eps", "eps must lie in (0, 1]"));
    }
    if eta < 1.0 {
        let cond = check_moderate_condition(spec, eta)?;
        if !cond.holds {
            return Err(Error::ConditionFailed {
                name: "moderate condition",
                lhs: cond.lhs,
                rhs: cond.rhs,
            });
        }
    } else if eta == 1.0 {
        let a = power_sum(spec, 2);
        match v {
            Some(v) if v > 0.0 && v < a => {}
            _ => return Err(Error::pre("0 < V < A", format!("V = {v:?}, A = {a}"))),
        }
    } else {
        return Err(Error::pre("eta", "eta must lie in (0, 1]"));
    }
    moderate_trig_formula(spec, eta, eps, c, v)
}

/// The formula of [`bound_moderate_trig`] without the condition checks;
/// only requires `A > 1` (η < 1) or `0 < V < A` (η = 1).
pub fn moderate_trig_formula(spec: &PolynomialSpec, eta: f64, eps: f64, c: f64, v: Option<f64>) -> Result<BoundReport> {
    let a = power_sum(spec, 2);
    let s4 = power_sum(spec, 4).sqrt();
    let report = if eta < 1.0 {
        if a <= 1.0 {
            return Err(Error::Domain(format!("log A must be positive, got A = {a}")));
        }
        let la = a.ln();
        let threshold = (2.0 * eta * a * la).sqrt();
        let exponent = -c * eps * a.powf(1.0 - eta) / (eta * (s4 + 1.0) * la).sqrt();
        BoundReport::new(exponent.exp())
            .with_threshold(threshold)
            .note("exponent", exponent)
    } else {
        let v = v.ok_or_else(|| Error::pre("V", "V is required when eta = 1"))?;
        if !(v > 0.0 && v < a) {
            return Err(Error::pre("0 < V < A", format!("V = {v}, A = {a}")));
        }
        let l = (a / v).ln();
        let threshold = (2.0 * a * l).sqrt();
        let exponent = -c * eps * v / ((s4 + 1.0) * l).sqrt();
        BoundReport::new(exponent.exp())
            .with_threshold(threshold)
            .note("exponent", exponent)
            .note("V", v)
    };
    Ok(report
        .note("A", a)
        .note("fourth_root_sum", s4)
        .constant("C", c))
}

/// Bound for coefficient sequences with `A(x) ~ log log x` and
/// `B = Σ a_k⁴`. `x` is passed through its natural log to allow towers.
pub fn bound_loglog(ln_x: f64, eta: f64, b: f64, c: f64) -> Result<BoundReport> {
    check_unit_open("eta", eta)?;
    if !(ln_x > 0.0) {
        return Err(Error::Domain("log x must be positive".into()));
    }
    let ll = ln_x.ln();
    let lll = if ll > 0.0 { ll.ln() } else { f64::NAN };
    if !(lll > 0.0) {
        return Err(Error::Domain(format!("log log log x must be positive, got {lll}")));
    }
    let threshold = (2.0 * eta * ll * lll).sqrt();
    let exponent = -c * ll.powf(1.0 - eta) / (8.0 * eta * (b + 1.0) * lll).sqrt();
    Ok(BoundReport::new(exponent.exp())
        .with_threshold(threshold)
        .note("loglog_x", ll)
        .note("logloglog_x", lll)
        .note("exponent", exponent)
        .constant("C", c)
        .constant("B", b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_gk;
    use crate::spectrum::PolynomialSpec;
    use proptest::prelude::*;

    /// P{max(X1, X2) <= Θ} for correlation ρ >= 0 by 1-D integration over
    /// the common factor.
    fn bivariate_max_cdf(rho: f64, theta: f64) -> f64 {
        let s = (1.0 - rho).sqrt();
        let r = rho.sqrt();
        adaptive_gk(
            |z: f64| crate::normal::density(z) * phi((theta - r * z) / s).powi(2),
            -12.0,
            12.0,
            24,
            1e-13,
            10_000,
        )
        .unwrap()
        .0
    }

    #[test]
    fn equicorrelated_example() {
        let b = bound_equicorrelated(2, 0.5, 1.0).unwrap();
        let expect = 3f64.sqrt() * phi(1.0 / 1.5f64.sqrt()).powi(2);
        assert!((b.value - expect).abs() < 1e-15);
        assert!((b.value - 1.0889).abs() < 1e-4);
        assert!(b.vacuous);
        assert!(b.value >= bivariate_max_cdf(0.5, 1.0));
        // independent limit and Θ → ∞
        let small = bound_equicorrelated(4, 1e-12, 0.7).unwrap().value;
        assert!((small - phi(0.7).powi(4)).abs() < 1e-10);
        let big = bound_equicorrelated(5, 0.3, 40.0).unwrap().value;
        assert!((big - equicorrelated_multiplier(5, 0.3)).abs() < 1e-14);
        assert!(bound_equicorrelated(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn equicorrelated_dominates_exact_bivariate() {
        for &rho in &[0.05, 0.2, 0.5, 0.8, 0.95] {
            for &t in &[-1.0, -0.3, 0.0, 0.5, 1.5, 3.0] {
                let exact = bivariate_max_cdf(rho, t);
                let b = bound_equicorrelated(2, rho, t).unwrap().value;
                assert!(b >= exact, "rho {rho} theta {t}: {b} < {exact}");
            }
        }
    }

    #[test]
    fn gumbel_examples() {
        let b = gumbel_b(10).unwrap();
        assert!((b - (100.0 / (4.0 * PI * 10f64.ln())).ln().sqrt()).abs() < 1e-15);
        assert!((b - 1.1136).abs() < 1e-4);
        assert!(gumbel_b(3).is_err());
        let r = bound_gumbel(10, 0.2, 0.5, 1.0).unwrap();
        assert_eq!(r.intermediate("exp_factor"), Some(1.0));
        let r = bound_gumbel(10, 0.2, 60.0, 0.3).unwrap();
        assert!((r.value - equicorrelated_multiplier(10, 0.2)).abs() < 1e-12);
        assert!(bound_gumbel(10, 0.2, -2.0, 0.3).is_err());
    }

    #[test]
    fn small_lambda_examples() {
        let r = bound_small_lambda_threshold(100, 0.5).unwrap();
        assert_eq!(r.lambda_max, 0.0025);
        let r = small_lambda_from_log(100.0, 100f64.ln(), 1e-300).unwrap();
        assert!((r.threshold - 2.4811).abs() < 1e-3, "{}", r.threshold);
        let e = std::f64::consts::E;
        let r = small_lambda_from_log(e.powf(e), e, 0.5).unwrap();
        assert!((r.threshold - (2.0 * e - 2.0 - 0.5 * e.powf(1.0 - e)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn beta_examples() {
        let b = beta_block(0.1, 0.5, 4, 3).unwrap();
        assert!((b - 6.1 / (2.1 * 7.3)).abs() < 1e-15);
        // λ = u substitution
        let (u, k, n) = (0.6, 4, 2);
        let (kf, nf) = (k as f64, n as f64);
        let expect = (1.0 / (1.0 - u)) * ((1.0 - u + nf * kf * u - kf * u) / (1.0 - u + 2.0 * nf * kf * u - kf * u));
        assert!((beta_formula(u, u, k, n) - expect).abs() < 1e-15);
        assert!(matches!(beta_block(0.1, 0.5, 2, 3), Err(Error::Precondition { name: "(k-1) u > 1", .. })));
        assert!(matches!(beta_block(0.6, 0.5, 4, 3), Err(Error::Precondition { name: "lambda <= u", .. })));
    }

    #[test]
    fn beta_can_exceed_one_under_stated_preconditions() {
        assert!(matches!(beta_block(0.89, 0.91, 6, 2), Err(Error::BetaOutOfRange { beta }) if beta > 1.6));
    }

    #[test]
    fn q_form_examples() {
        assert_eq!(q_form(0.1, 0.5, 2, 2, &[0.0; 4]).unwrap(), 0.0);
        let x = [0.3, -1.2, 0.7, 2.0];
        let (cg, _, _) = q_form_coefficients(0.0, 0.5, 2, 2);
        assert_eq!(cg, 0.0);
        assert!(q_form(0.1, 0.5, 2, 2, &x[..3]).is_err());
    }

    #[test]
    fn block_bound_limits() {
        let (l, u, k, n) = (0.1, 0.5, 4, 3);
        let r = bound_block(l, u, k, n, 60.0).unwrap();
        let beta = r.intermediate("beta").unwrap();
        let expect = beta.powf(-6.0) / block_normalizer(u, k, n);
        assert!((r.value / expect - 1.0).abs() < 1e-13);
        assert!(bound_block(l, u, 4, 4, 0.0).is_err());
        let e = bound_block_exact_form(l, u, k, n, 60.0).unwrap();
        assert!(e.value >= 1.0);
    }

    #[test]
    fn szego_examples() {
        let s = szego_bounds(&SpectralDensity::constant(1.0), 5, 1.0).unwrap();
        let x = (2.0 * phi(1.0) - 1.0).powi(5);
        assert!((s.lower - x).abs() < 1e-14 && (s.upper - x).abs() < 1e-12);
        let s = szego_bounds(&SpectralDensity::new(|t: f64| t.cos().exp()), 5, 1.0).unwrap();
        assert!((s.upper - x).abs() < 1e-9 && (s.lower - x).abs() < 1e-14);
        assert!((x - 0.1483).abs() < 1e-4);
        let s = szego_bounds(&SpectralDensity::new(|t: f64| t.cos().max(0.0)), 3, 1.0).unwrap();
        assert!(s.upper_vacuous && s.upper == 1.0);
    }

    #[test]
    fn moderate_trig_examples() {
        let spec = PolynomialSpec::trigonometric(vec![1.0; 10_000]);
        // the moderate condition fails here: 100 > 10^4^{1/2} / sqrt(log 10^4)
        assert!(matches!(
            bound_moderate_trig(&spec, 0.5, 1.0, 1.0, None),
            Err(Error::ConditionFailed { .. })
        ));
        let r = moderate_trig_formula(&spec, 0.5, 1.0, 1.0, None).unwrap();
        assert!((r.threshold.unwrap() - 303.49).abs() < 0.01);
        let expo = -100.0 / (0.5 * 101.0 * 1e4f64.ln()).sqrt();
        assert!((r.intermediate("exponent").unwrap() - expo).abs() < 1e-12);
        assert!((expo + 4.6368).abs() < 1e-4);
        // linear in C
        let r2 = moderate_trig_formula(&spec, 0.5, 1.0, 2.0, None).unwrap();
        assert!((r2.value.ln() - 2.0 * r.value.ln()).abs() < 1e-12);
        assert_eq!(r2.free_constants["C"], 2.0);
        // a condition that holds
        let ok = PolynomialSpec::trigonometric(vec![1.0; 100]);
        let r = bound_moderate_trig(&ok, 0.1, 1e-9, 1.0, None).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        let r = bound_moderate_trig(&ok, 1.0, 0.5, 1.0, Some(10.0)).unwrap();
        assert!((r.threshold.unwrap() - (200.0 * 10f64.ln()).sqrt()).abs() < 1e-12);
        assert!(bound_moderate_trig(&ok, 1.0, 0.5, 1.0, Some(100.0)).is_err());
    }

    #[test]
    fn loglog_examples() {
        let e = std::f64::consts::E;
        let r = bound_loglog(e.powf(e), 0.5, 1.0, 1.0).unwrap();
        assert!((r.intermediate("loglog_x").unwrap() - e).abs() < 1e-14);
        assert!((r.intermediate("logloglog_x").unwrap() - 1.0).abs() < 1e-14);
        let r = bound_loglog(100.0 * 10f64.ln(), 0.5, 1.0, 1.0).unwrap();
        assert!((r.intermediate("loglog_x").unwrap() - 5.4392).abs() < 1e-4);
        let expect = -(5.4392f64).sqrt() / (8.0 * 0.5 * 2.0 * 1.6936f64).sqrt();
        assert!((r.intermediate("exponent").unwrap() - expect).abs() < 1e-3);
        let r2 = bound_loglog(200.0 * 10f64.ln(), 0.5, 1.0, 1.0).unwrap();
        assert!(r2.value < r.value);
        assert!(bound_loglog(2.0, 0.5, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn beta_in_unit_interval_when_admissible(
            u in 0.0f64..1.0, t in 0.0f64..1.0, k in 2usize..10, n in 1usize..8,
        ) {
            let lambda = u * t;
            match beta_block(lambda, u, k, n) {
                Ok(b) => prop_assert!(b > 0.0 && b < 1.0),
                Err(Error::BetaOutOfRange { beta }) => prop_assert!(beta >= 1.0 || beta <= 0.0),
                Err(Error::Precondition { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn q_form_matches_assembled_matrix(
            x in prop::collection::vec(-3.0f64..3.0, 4), lambda in 0.01f64..0.4, du in 0.0f64..0.5,
        ) {
            let (k, n) = (2usize, 2usize);
            let u = lambda + du;
            let (cg, cb, cd) = q_form_coefficients(lambda, u, k, n);
            let m = nalgebra::DMatrix::from_fn(4, 4, |i, j| {
                cg + if i / k == j / k { cb } else { 0.0 } + if i == j { cd } else { 0.0 }
            });
            let v = nalgebra::DVector::from_column_slice(&x);
            let quad = (v.transpose() * &m * &v)[(0, 0)];
            let q = q_form(lambda, u, k, n, &x).unwrap();
            prop_assert!((q - quad).abs() <= 1e-10 * quad.abs().max(1.0));
        }

        #[test]
        fn bounds_are_positive(n in 2usize..12, lambda in 0.01f64..0.99, theta in -3.0f64..6.0) {
            prop_assert!(bound_equicorrelated(n, lambda, theta).unwrap().value > 0.0);
        }
    }
}
