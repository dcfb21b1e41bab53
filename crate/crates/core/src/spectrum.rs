//! Coefficient and frequency sequences, polynomial specs and the scalar
//! aggregates derived from them.
//!
//! A [`PolynomialSpec`] describes the Gaussian polynomial
//!
//! ```text
//! X_{y,x}(t) = Σ_{y ≤ k ≤ x} a_k (g_k cos(ω_k t) + g'_k sin(ω_k t))
//! ```
//!
//! where `ω_k = 2π j_k` under [`AngularConvention::TwoPi`] and `ω_k = L_k`
//! under [`AngularConvention::Raw`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::quadrature::midpoint_doubling;
use crate::{Error, Result};

/// Generator for a coefficient sequence `a_1, a_2, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CoefficientRule {
    /// `a_k = values[k - 1]`.
    Explicit { values: Vec<f64> },
    /// `a_k = value`.
    Constant { value: f64 },
    /// `a_k = scale * k^{-exponent}`.
    Power { scale: f64, exponent: f64 },
    /// `a_p = p^{-1/2}` for primes `p`, zero elsewhere.
    PrimeInverseSqrt,
}

/// A finite coefficient sequence materialized from its rule on `1..=len`.
///
/// Values are computed once at construction so every consumer sees the
/// same floating-point numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq {
    rule: CoefficientRule,
    values: Vec<f64>,
}

impl CoefficientSeq {
    pub fn new(rule: CoefficientRule, len: usize) -> Result<Self> {
        let values = match &rule {
            CoefficientRule::Explicit { values } => {
                if values.len() < len {
                    return Err(Error::IndexOutOfRange {
                        what: "explicit coefficient",
                        index: values.len() + 1,
                    });
                }
                values[..len].to_vec()
            }
            CoefficientRule::Constant { value } => vec![*value; len],
            CoefficientRule::Power { scale, exponent } => (1..=len)
                .map(|k| scale * (k as f64).powf(-exponent))
                .collect(),
            CoefficientRule::PrimeInverseSqrt => {
                let sieve = prime_sieve(len);
                (1..=len)
                    .map(|k| if sieve[k] { (k as f64).sqrt().recip() } else { 0.0 })
                    .collect()
            }
        };
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coefficient {v}")));
        }
        Ok(Self { rule, values })
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        let len = values.len();
        Self::new(CoefficientRule::Explicit { values }, len).expect("explicit values are finite")
    }

    pub fn rule(&self) -> &CoefficientRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_k` for `1 <= k <= len`.
    pub fn get(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.values.len() {
            return Err(Error::IndexOutOfRange {
                what: "coefficient",
                index: k,
            });
        }
        Ok(self.values[k - 1])
    }

    /// Slice of `a_y..=a_x`; empty when `y > x`.
    pub fn range(&self, y: usize, x: usize) -> &[f64] {
        if y > x {
            return &[];
        }
        &self.values[y - 1..x]
    }

    /// True when every `a_k`, `y <= k <= x`, is non-zero.
    pub fn is_non_vanishing(&self, y: usize, x: usize) -> bool {
        self.range(y, x).iter().all(|&a| a != 0.0)
    }

    /// Same rule with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rule: CoefficientRule::Explicit {
                values: self.values.iter().map(|a| a * c).collect(),
            },
            values: self.values.iter().map(|a| a * c).collect(),
        }
    }
}

/// `sieve[k]` is true iff `k` is prime, for `0 <= k <= n`.
pub fn prime_sieve(n: usize) -> Vec<bool> {
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    is_prime
}

pub fn primes_up_to(n: usize) -> Vec<usize> {
    prime_sieve(n)
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k))
        .collect()
}

/// Exact rational frequency `num / den` with `den >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFreq {
    pub num: BigInt,
    pub den: BigUint,
}

impl RationalFreq {
    pub fn new(num: BigInt, den: BigUint) -> Self {
        assert!(!den.is_zero(), "rational frequency with zero denominator");
        Self { num, den }
    }

    pub fn from_integer(m: i64) -> Self {
        Self::new(BigInt::from(m), BigUint::one())
    }

    /// Nearest double to `num / den`.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.num, &self.den)
    }
}

impl fmt::Display for RationalFreq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Correctly rounded enough for evaluation: both parts are scaled to at
/// most 64 significant bits before dividing.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigUint) -> f64 {
    let nbits = num.bits() as i64;
    let dbits = den.bits() as i64;
    let shift_n = (nbits - 64).max(0);
    let shift_d = (dbits - 64).max(0);
    let n = (num.abs().to_biguint().unwrap() >> shift_n as usize)
        .to_f64()
        .unwrap();
    let d = (den >> shift_d as usize).to_f64().unwrap();
    let v = n / d * 2f64.powi((shift_n - shift_d) as i32);
    if num.is_negative() {
        -v
    } else {
        v
    }
}

/// Generator for a frequency sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrequencyRule {
    /// Integer frequencies `j_k = k`.
    Identity,
    /// Explicit increasing integers `j_k = values[k - 1]`.
    Integers { values: Vec<i64> },
    /// Explicit increasing reals `L_k = values[k - 1]`.
    Reals { values: Vec<f64> },
    /// `L_k = slope * k + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// `L_k = slope * k + jitter * frac(k * alpha)`; increasing when `jitter < slope`.
    Jittered { slope: f64, jitter: f64, alpha: f64 },
    /// `L_k = sqrt(p_k)` for the k-th prime `p_k`; linearly independent over Q.
    SqrtPrimes,
}

/// Frequencies `ω_k` of one of three kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencySeq {
    Integer(Vec<i64>),
    Real(Vec<f64>),
    Rational(Vec<RationalFreq>),
}

impl FrequencySeq {
    pub fn from_rule(rule: &FrequencyRule, len: usize) -> Result<Self> {
        let seq = match rule {
            FrequencyRule::Identity => FrequencySeq::Integer((1..=len as i64).collect()),
            FrequencyRule::Integers { values } => {
                if values.len() < len {
                    return Err(Error::IndexOutOfRange {
                        what: "explicit integer frequency",
                        index: values.len() + 1,
                    });
                }
                FrequencySeq::Integer(values[..len].to_vec())
            }
            FrequencyRule::Reals { values } => {
                if values.len() < len {
                    return Err(Error::IndexOutOfRange {
                        what: "explicit real frequency",
                        index: values.len() + 1,
                    });
                }
                FrequencySeq::Real(values[..len].to_vec())
            }
            FrequencyRule::Affine { slope, intercept } => {
                FrequencySeq::Real((1..=len).map(|k| slope * k as f64 + intercept).collect())
            }
            FrequencyRule::Jittered { slope, jitter, alpha } => FrequencySeq::Real(
                (1..=len)
                    .map(|k| {
                        let v = k as f64 * alpha;
                        slope * k as f64 + jitter * (v - v.floor())
                    })
                    .collect(),
            ),
            FrequencyRule::SqrtPrimes => {
                let mut bound = 16usize;
                let primes = loop {
                    let p = primes_up_to(bound);
                    if p.len() >= len {
                        break p;
                    }
                    bound *= 2;
                };
                FrequencySeq::Real(primes[..len].iter().map(|&p| (p as f64).sqrt()).collect())
            }
        };
        seq.validate()?;
        Ok(seq)
    }

    fn validate(&self) -> Result<()> {
        match self {
            FrequencySeq::Integer(v) => {
                if v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::pre("increasing frequencies", "integer frequencies must be strictly increasing"));
                }
            }
            FrequencySeq::Real(v) => {
                if v.iter().any(|l| !l.is_finite()) {
                    return Err(Error::Domain("non-finite frequency".into()));
                }
                if v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::pre("increasing frequencies", "real frequencies must be strictly increasing"));
                }
            }
            FrequencySeq::Rational(_) => {}
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match self {
            FrequencySeq::Integer(v) => v.len(),
            FrequencySeq::Real(v) => v.len(),
            FrequencySeq::Rational(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, FrequencySeq::Integer(_))
    }

    /// Strict monotonicity; always true for integer and real kinds.
    pub fn is_monotone(&self) -> bool {
        match self {
            FrequencySeq::Rational(v) => v.windows(2).all(|w| w[0].to_f64() < w[1].to_f64()),
            _ => true,
        }
    }

    /// Frequency value at `k` (1-based) as a double, before any 2π scaling.
    pub fn value(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.len() {
            return Err(Error::IndexOutOfRange {
                what: "frequency",
                index: k,
            });
        }
        Ok(match self {
            FrequencySeq::Integer(v) => v[k - 1] as f64,
            FrequencySeq::Real(v) => v[k - 1],
            FrequencySeq::Rational(v) => v[k - 1].to_f64(),
        })
    }

    /// Integer frequency at `k`, when the sequence is of integer kind.
    pub fn integer(&self, k: usize) -> Option<i64> {
        match self {
            FrequencySeq::Integer(v) => v.get(k.checked_sub(1)?).copied(),
            _ => None,
        }
    }
}

/// How frequencies enter the cosine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AngularConvention {
    /// `cos(2π j_k t)`, periodic on `[0, 1]`.
    TwoPi,
    /// `cos(L_k u)`.
    #[default]
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSpec {
    pub coeffs: CoefficientSeq,
    pub freqs: FrequencySeq,
    pub y: usize,
    pub x: usize,
    pub convention: AngularConvention,
}

impl PolynomialSpec {
    /// Builds a spec on `[y, x]`. `y = x + 1` (or any `y > x`) denotes the
    /// empty range; otherwise both sequences must cover `1..=x`.
    pub fn new(
        coeffs: CoefficientSeq,
        freqs: FrequencySeq,
        y: usize,
        x: usize,
        convention: AngularConvention,
    ) -> Result<Self> {
        if y == 0 {
            return Err(Error::pre("range", "indices start at 1"));
        }
        if y <= x {
            if coeffs.len() < x {
                return Err(Error::IndexOutOfRange {
                    what: "coefficient",
                    index: x,
                });
            }
            if freqs.len() < x {
                return Err(Error::IndexOutOfRange {
                    what: "frequency",
                    index: x,
                });
            }
        }
        Ok(Self {
            coeffs,
            freqs,
            y,
            x,
            convention,
        })
    }

    /// Integer frequencies `j_k = k` with the 2π convention.
    pub fn trigonometric(coeffs: Vec<f64>) -> Self {
        let n = coeffs.len();
        Self::new(
            CoefficientSeq::explicit(coeffs),
            FrequencySeq::Integer((1..=n as i64).collect()),
            1,
            n,
            AngularConvention::TwoPi,
        )
        .expect("consistent lengths")
    }

    pub fn is_empty(&self) -> bool {
        self.y > self.x
    }

    /// Indices `y..=x` (empty when `y > x`).
    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.y..=self.x
    }

    pub fn coefficients(&self) -> &[f64] {
        self.coeffs.range(self.y, self.x)
    }

    /// Angular frequencies `ω_k` for `k` in range, in index order.
    pub fn angular_frequencies(&self) -> Vec<f64> {
        let scale = match self.convention {
            AngularConvention::TwoPi => 2.0 * PI,
            AngularConvention::Raw => 1.0,
        };
        self.indices()
            .map(|k| scale * self.freqs.value(k).expect("validated range"))
            .collect()
    }

    /// `Σ_k j_k a_k²`, defined for integer frequencies.
    pub fn weighted_frequency_sum(&self) -> Result<f64> {
        let mut s = 0.0;
        for k in self.indices() {
            let j = self
                .freqs
                .integer(k)
                .ok_or_else(|| Error::pre("integer frequencies", "spec has non-integer frequencies"))?;
            let a = self.coeffs.get(k)?;
            s += j as f64 * a * a;
        }
        Ok(s)
    }

    /// Same frequencies, coefficients multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coeffs: self.coeffs.scaled(c),
            ..self.clone()
        }
    }

    /// Deterministic evaluation for given Gaussian inputs `g`, `g'` (indexed
    /// from `y`).
    pub fn evaluate(&self, t: f64, g: &[f64], g_prime: &[f64]) -> f64 {
        self.coefficients()
            .iter()
            .zip(self.angular_frequencies())
            .zip(g.iter().zip(g_prime))
            .map(|((a, w), (gc, gs))| a * (gc * (w * t).cos() + gs * (w * t).sin()))
            .sum()
    }
}

/// `Σ_{y ≤ k ≤ x} a_k^p`; zero on an empty range.
pub fn power_sum(spec: &PolynomialSpec, p: u32) -> f64 {
    spec.coefficients().iter().map(|a| a.powi(p as i32)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModerateCondition {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks `(Σ a_k⁴)^{1/2} <= A^{1-η} / sqrt(log A)` with `A = Σ a_k²`.
pub fn check_moderate_condition(spec: &PolynomialSpec, eta: f64) -> Result<ModerateCondition> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::pre("eta", format!("eta = {eta} must lie in (0, 1)")));
    }
    let a2 = power_sum(spec, 2);
    if a2 <= 1.0 {
        return Err(Error::Domain(format!("log A must be positive, got A = {a2}")));
    }
    let lhs = power_sum(spec, 4).sqrt();
    let rhs = a2.powf(1.0 - eta) / a2.ln().sqrt();
    Ok(ModerateCondition {
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

/// Nonnegative spectral density on `[-π, π]`.
#[derive(Clone)]
pub struct SpectralDensity {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Cosine coefficients `c_0 + Σ c_h cos(h t)` when the density is a
    /// trigonometric polynomial.
    cosine_coeffs: Option<Vec<f64>>,
}

impl fmt::Debug for SpectralDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralDensity")
            .field("cosine_coeffs", &self.cosine_coeffs)
            .finish_non_exhaustive()
    }
}

impl SpectralDensity {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            cosine_coeffs: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::cosine_polynomial(vec![c])
    }

    /// `f(t) = c_0 + Σ_{h ≥ 1} c_h cos(h t)`.
    pub fn cosine_polynomial(coeffs: Vec<f64>) -> Self {
        let c = coeffs.clone();
        Self {
            f: Arc::new(move |t| {
                c.iter()
                    .enumerate()
                    .map(|(h, ch)| ch * (h as f64 * t).cos())
                    .sum()
            }),
            cosine_coeffs: Some(coeffs),
        }
    }

    pub fn cosine_coeffs(&self) -> Option<&[f64]> {
        self.cosine_coeffs.as_deref()
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Checks `f >= 0` on a uniform grid of `n` points.
    pub fn is_nonnegative_on_grid(&self, n: usize) -> bool {
        (0..n).all(|i| self.eval(-PI + 2.0 * PI * (i as f64 + 0.5) / n as f64) >= 0.0)
    }

    /// `γ(h) = (1/2π) ∫ f(t) cos(h t) dt`.
    pub fn autocovariance(&self, h: usize, tol: f64) -> Result<f64> {
        let r = midpoint_doubling(
            |t| self.eval(t) * (h as f64 * t).cos(),
            -PI,
            PI,
            tol,
            (4 * h).max(16),
            1 << 22,
        )?;
        Ok(r.value / (2.0 * PI))
    }

    /// `γ(0..n)` by quadrature.
    pub fn autocovariances(&self, n: usize, tol: f64) -> Result<Vec<f64>> {
        (0..n).map(|h| self.autocovariance(h, tol)).collect()
    }
}

/// Controls for [`spectral_geometric_mean_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricMeanOptions {
    pub tol: f64,
    /// Log-mean below this is treated as divergence to `-∞` (G = 0).
    pub log_cutoff: f64,
    pub max_nodes: usize,
}

impl Default for GeometricMeanOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            log_cutoff: -700.0,
            max_nodes: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricMean {
    pub value: f64,
    /// `(1/2π) ∫ log f`, `-∞` when divergent.
    pub log_mean: f64,
    pub nodes: usize,
    pub diverged: bool,
}

/// `exp((1/2π) ∫_{-π}^{π} log f(t) dt)` by midpoint doubling.
pub fn spectral_geometric_mean(f: &SpectralDensity, tol: f64) -> Result<f64> {
    spectral_geometric_mean_with(
        f,
        GeometricMeanOptions {
            tol,
            ..Default::default()
        },
    )
    .map(|g| g.value)
}

pub fn spectral_geometric_mean_with(f: &SpectralDensity, opts: GeometricMeanOptions) -> Result<GeometricMean> {
    let mut n = 16usize;
    let log_mean = |n: usize| -> f64 {
        let h = 2.0 * PI / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let v = f.eval(-PI + (i as f64 + 0.5) * h);
            if v < 0.0 {
                return f64::NAN;
            }
            s += v.ln();
        }
        s / n as f64
    };
    let diverged = |nodes| GeometricMean {
        value: 0.0,
        log_mean: f64::NEG_INFINITY,
        nodes,
        diverged: true,
    };
    let mut prev = log_mean(n);
    if prev.is_nan() {
        return Err(Error::Domain("spectral density is negative at a node".into()));
    }
    if prev == f64::NEG_INFINITY || prev < opts.log_cutoff {
        return Ok(diverged(n));
    }
    let mut change = f64::INFINITY;
    while n < opts.max_nodes {
        n *= 2;
        let cur = log_mean(n);
        if cur.is_nan() {
            return Err(Error::Domain("spectral density is negative at a node".into()));
        }
        if cur == f64::NEG_INFINITY || cur < opts.log_cutoff {
            return Ok(diverged(n));
        }
        change = (cur - prev).abs();
        if change <= opts.tol {
            return Ok(GeometricMean {
                value: cur.exp(),
                log_mean: cur,
                nodes: n,
                diverged: false,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence {
        nodes: n,
        last_change: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn constant_spec(x: usize) -> PolynomialSpec {
        PolynomialSpec::trigonometric(vec![1.0; x])
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(&constant_spec(5), 2), 5.0);
        let empty = PolynomialSpec::new(
            CoefficientSeq::explicit(vec![1.0; 5]),
            FrequencySeq::Integer((1..=5).collect()),
            6,
            5,
            AngularConvention::TwoPi,
        )
        .unwrap();
        assert_eq!(power_sum(&empty, 2), 0.0);
        let spec = PolynomialSpec::new(
            CoefficientSeq::new(CoefficientRule::Power { scale: 1.0, exponent: 0.5 }, 4).unwrap(),
            FrequencySeq::from_rule(&FrequencyRule::Identity, 4).unwrap(),
            1,
            4,
            AngularConvention::TwoPi,
        )
        .unwrap();
        assert!((power_sum(&spec, 2) - 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn moderate_condition_examples() {
        let s = constant_spec(100);
        let c = check_moderate_condition(&s, 0.1).unwrap();
        assert!(c.holds);
        assert!((c.lhs - 10.0).abs() < 1e-12);
        assert!((c.rhs - 100f64.powf(0.9) / 100f64.ln().sqrt()).abs() < 1e-12);
        assert!((c.rhs - 29.40).abs() < 0.01);
        let c = check_moderate_condition(&s, 0.9).unwrap();
        assert!(!c.holds);
        assert!((c.rhs - 0.739).abs() < 1e-3);
        assert!(matches!(
            check_moderate_condition(&constant_spec(1), 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn primes_and_prime_coefficients() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let c = CoefficientSeq::new(CoefficientRule::PrimeInverseSqrt, 10).unwrap();
        assert_eq!(c.get(4).unwrap(), 0.0);
        assert_eq!(c.get(7).unwrap(), 7f64.sqrt().recip());
        assert!(!c.is_non_vanishing(1, 10));
        assert!(c.is_non_vanishing(2, 3));
    }

    #[test]
    fn frequency_rules_validate_monotonicity() {
        assert!(FrequencySeq::from_rule(&FrequencyRule::Integers { values: vec![1, 3, 3] }, 3).is_err());
        assert!(FrequencySeq::from_rule(&FrequencyRule::Reals { values: vec![0.5, 0.4] }, 2).is_err());
        let s = FrequencySeq::from_rule(&FrequencyRule::Jittered { slope: 1.0, jitter: 0.5, alpha: 2f64.sqrt() }, 50)
            .unwrap();
        assert_eq!(s.len(), 50);
        let p = FrequencySeq::from_rule(&FrequencyRule::SqrtPrimes, 5).unwrap();
        assert_eq!(p.value(3).unwrap(), 5f64.sqrt());
    }

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let den = BigUint::one() << 200usize;
        let num = BigInt::from(3) * (BigInt::one() << 199usize);
        assert_eq!(RationalFreq::new(num, den).to_f64(), 1.5);
        assert_eq!(RationalFreq::new(BigInt::from(-14), BigUint::from(10u32)).to_f64(), -1.4);
    }

    #[test]
    fn geometric_mean_examples() {
        assert!((spectral_geometric_mean(&SpectralDensity::constant(1.0), 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert!((spectral_geometric_mean(&SpectralDensity::constant(2.5), 1e-12).unwrap() - 2.5).abs() < 1e-13);
        let f = SpectralDensity::new(|t: f64| t.cos().exp());
        assert!((spectral_geometric_mean(&f, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_mean_zero_branch_is_distinct_from_failure() {
        // vanishes on a set of positive measure: log is not integrable
        let f = SpectralDensity::new(|t: f64| t.cos().max(0.0));
        let g = spectral_geometric_mean_with(&f, GeometricMeanOptions::default()).unwrap();
        assert!(g.diverged);
        assert_eq!(g.value, 0.0);
        // isolated zero: converges, but not to 1e-12 within 2^10 nodes
        let slow = SpectralDensity::new(|t: f64| 1.0 - t.cos());
        let r = spectral_geometric_mean_with(
            &slow,
            GeometricMeanOptions {
                tol: 1e-12,
                max_nodes: 1 << 10,
                ..Default::default()
            },
        );
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn geometric_mean_with_isolated_zero() {
        // (1/2π)∫ log(1 - cos t) = -log 2, so G = 1/2
        let f = SpectralDensity::new(|t: f64| 1.0 - t.cos());
        let g = spectral_geometric_mean(&f, 1e-6).unwrap();
        assert!((g - 0.5).abs() < 1e-5, "{g}");
    }

    #[test]
    fn autocovariance_of_cosine_polynomial() {
        let f = SpectralDensity::cosine_polynomial(vec![2.0, 0.6, -0.4]);
        let g = f.autocovariances(4, 1e-13).unwrap();
        let expect = [2.0, 0.3, -0.2, 0.0];
        for (a, b) in g.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn power_sum_is_additive(values in prop::collection::vec(-3.0f64..3.0, 2..40), cut in 0usize..40) {
            let x = values.len();
            let m = cut % x;
            let mk = |y, x| PolynomialSpec::new(
                CoefficientSeq::explicit(values.clone()),
                FrequencySeq::Integer((1..=values.len() as i64).collect()),
                y, x, AngularConvention::TwoPi).unwrap();
            let whole = power_sum(&mk(1, x), 2);
            let parts = power_sum(&mk(1, m), 2) + power_sum(&mk(m + 1, x), 2);
            prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
        }

        #[test]
        fn fourth_moment_below_second(values in prop::collection::vec(-5.0f64..5.0, 1..60)) {
            let s = PolynomialSpec::trigonometric(values);
            prop_assert!(power_sum(&s, 4).sqrt() <= power_sum(&s, 2) * (1.0 + 1e-12));
        }

        #[test]
        fn geometric_mean_below_arithmetic_mean(c in prop::collection::vec(-1.0f64..1.0, 1..5), margin in 0.05f64..2.0) {
            let c0 = c.iter().map(|v| v.abs()).sum::<f64>() + margin;
            let mut coeffs = vec![c0];
            coeffs.extend(c);
            let f = SpectralDensity::cosine_polynomial(coeffs);
            let g = spectral_geometric_mean(&f, 1e-10).unwrap();
            prop_assert!(g <= c0 * (1.0 + 1e-9));
        }
    }
}
