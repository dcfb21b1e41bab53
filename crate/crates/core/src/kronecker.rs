//! Lattice-localized simultaneous approximation: the obstruction scale `Ξ`,
//! brute-force search of `I ∩ hℕ`, solution counts, the limsup law for
//! exponential sums, divergence of the `p(x, a)` partial sums and the
//! correlation structure of `X^cos` at lattice points.
//!
//! Everything here is exhaustive enumeration under hard budgets. `‖u‖` is
//! `|u - round(u)|` with ties rounded to even.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::normal::phi;
use crate::spectrum::{power_sum, PolynomialSpec};
use crate::{Error, Result};

/// Default for the free constant `C_o ∈ (0, 1/4)`.
pub const DEFAULT_C_O: f64 = 0.125;
/// Cap on enumerated points for `Ξ` and for lattice scans.
pub const ENUMERATION_BUDGET: f64 = 1e8;

/// Distance to the nearest integer.
pub fn nearest_int_dist(u: f64) -> f64 {
    (u - u.round_ties_even()).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeProblem {
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub omega: u64,
    pub h: f64,
    /// Closed interval `[lo, hi]`.
    pub interval: (f64, f64),
    #[serde(default = "default_c_o")]
    pub c_o: f64,
}

fn default_c_o() -> f64 {
    DEFAULT_C_O
}

impl LatticeProblem {
    pub fn new(lambdas: Vec<f64>, betas: Vec<f64>, omega: u64, h: f64, interval: (f64, f64)) -> Result<Self> {
        let p = Self {
            lambdas,
            betas,
            omega,
            h,
            interval,
            c_o: DEFAULT_C_O,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_c_o(mut self, c_o: f64) -> Result<Self> {
        self.c_o = c_o;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::pre("N >= 1", "no frequencies"));
        }
        if self.betas.len() != self.lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lambdas.len(),
                got: self.betas.len(),
            });
        }
        if self.omega < 1 {
            return Err(Error::pre("omega >= 1", "omega = 0"));
        }
        if !(self.h > 0.0) {
            return Err(Error::pre("h > 0", format!("h = {}", self.h)));
        }
        if !(self.interval.1 - self.interval.0 > self.h) {
            return Err(Error::pre(
                "|I| > h",
                format!("I = [{}, {}], h = {}", self.interval.0, self.interval.1, self.h),
            ));
        }
        if !(self.c_o > 0.0 && self.c_o < 0.25) {
            return Err(Error::pre("0 < C_o < 1/4", format!("C_o = {}", self.c_o)));
        }
        Ok(())
    }

    /// `log(N ω / C_o)`.
    pub fn log_scale(&self) -> f64 {
        (self.dim() as f64 * self.omega as f64 / self.c_o).ln()
    }

    /// `M = ⌊6 ω log(N ω / C_o)⌋`.
    pub fn enumeration_radius(&self) -> u64 {
        (6.0 * self.omega as f64 * self.log_scale()).floor() as u64
    }

    /// `T = (1/Ξ) (4 ω / C_o · sqrt(log(N ω / C_o)))^N`.
    pub fn length_threshold(&self, xi: f64) -> f64 {
        let base = 4.0 * self.omega as f64 / self.c_o * self.log_scale().sqrt();
        base.powi(self.dim() as i32) / xi
    }

    /// Integers `m >= 0` with `h m ∈ I`, as an inclusive range.
    pub fn lattice_range(&self) -> Option<(u64, u64)> {
        let lo = (self.interval.0 / self.h).ceil().max(0.0);
        let hi = (self.interval.1 / self.h).floor();
        if hi < lo {
            None
        } else {
            Some((lo as u64, hi as u64))
        }
    }

    /// `max_j ‖t λ_j - β_j‖`.
    pub fn max_distance(&self, t: f64) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.betas)
            .map(|(l, b)| nearest_int_dist(t * l - b))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiReport {
    pub xi: f64,
    pub argmin: Vec<i64>,
    pub radius: u64,
    /// False when `Ξ = 0`, i.e. the non-degeneracy hypothesis fails.
    pub hypothesis_holds: bool,
}

/// `Ξ` by enumeration of nonzero `ν ∈ [-M, M]^N`. Only `ν` whose first
/// nonzero entry is positive are visited, since `‖-u‖ = ‖u‖`; ties go to the
/// lexicographically smallest such `ν`.
pub fn xi(problem: &LatticeProblem) -> Result<XiReport> {
    xi_with_radius(problem, problem.enumeration_radius())
}

pub fn xi_with_radius(problem: &LatticeProblem, radius: u64) -> Result<XiReport> {
    problem.validate()?;
    if radius < 1 {
        return Err(Error::pre("M >= 1", format!("M = {radius}")));
    }
    let n = problem.dim();
    let needed = (2.0 * radius as f64 + 1.0).powi(n as i32);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let m = radius as i64;
    let mut nu = vec![-m; n];
    let mut best = f64::INFINITY;
    let mut argmin = Vec::new();
    loop {
        if let Some(first) = nu.iter().find(|&&v| v != 0) {
            if *first > 0 {
                let s: f64 = problem.lambdas.iter().zip(&nu).map(|(l, &v)| l * v as f64).sum();
                let d = nearest_int_dist(problem.h * s);
                if d < best {
                    best = d;
                    argmin = nu.clone();
                }
            }
        }
        // lexicographic odometer, last coordinate fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(XiReport {
                    xi: best,
                    argmin,
                    radius,
                    hypothesis_holds: best > 0.0,
                });
            }
            i -= 1;
            if nu[i] < m {
                nu[i] += 1;
                break;
            }
            nu[i] = -m;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub t_best: f64,
    pub achieved: f64,
    /// Every `t ∈ I ∩ hℕ` with `max_j ‖t λ_j - β_j‖ <= 1/ω`, ascending.
    pub hits: Vec<f64>,
    pub scanned: u64,
    pub xi: Option<XiReport>,
    pub threshold: Option<f64>,
    /// True when `|I|` exceeds the length threshold, so success is guaranteed.
    pub armed: bool,
    /// `achieved <= 1/ω`.
    pub success: bool,
}

fn scan(problem: &LatticeProblem) -> Result<(f64, f64, Vec<f64>, u64)> {
    let (lo, hi) = problem
        .lattice_range()
        .ok_or_else(|| Error::Domain("I ∩ hℕ is empty".into()))?;
    let count = hi - lo + 1;
    if count as f64 > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: count as f64,
            budget: ENUMERATION_BUDGET,
        });
    }
    let tol = 1.0 / problem.omega as f64;
    let (mut t_best, mut achieved) = (f64::NAN, f64::INFINITY);
    let mut hits = Vec::new();
    for m in lo..=hi {
        let t = problem.h * m as f64;
        let d = problem.max_distance(t);
        if d < achieved {
            achieved = d;
            t_best = t;
        }
        if d <= tol {
            hits.push(t);
        }
    }
    Ok((t_best, achieved, hits, count))
}

/// Full scan of `I ∩ hℕ`. `Ξ` is computed when its enumeration fits the
/// budget; the success assertion is armed only when `|I| > T`.
pub fn lattice_search(problem: &LatticeProblem) -> Result<SearchReport> {
    problem.validate()?;
    let (t_best, achieved, hits, scanned) = scan(problem)?;
    let xi_report = match xi(problem) {
        Ok(r) => Some(r),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let threshold = xi_report
        .as_ref()
        .filter(|r| r.hypothesis_holds)
        .map(|r| problem.length_threshold(r.xi));
    let armed = threshold.is_some_and(|t| problem.interval.1 - problem.interval.0 > t);
    let success = achieved <= 1.0 / problem.omega as f64;
    if armed && !success {
        return Err(Error::ConditionFailed {
            name: "lattice approximation within 1/omega",
            lhs: achieved,
            rhs: 1.0 / problem.omega as f64,
        });
    }
    Ok(SearchReport {
        t_best,
        achieved,
        hits,
        scanned,
        xi: xi_report,
        threshold,
        armed,
        success,
    })
}

/// `k = inf{j >= 1 : N ω / C_o <= 4^{2j-1} / sqrt(j)}`.
pub fn k_index(scale: f64) -> u32 {
    let mut j = 1u32;
    while scale > 4f64.powi(2 * j as i32 - 1) / (j as f64).sqrt() {
        j += 1;
    }
    j
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionCount {
    pub count: usize,
    pub k: u32,
    /// `(C / (ω sqrt k))^N |I ∩ hℕ|`.
    pub lower_proportional: f64,
    /// `C^{N/2} / (h Ξ)`; absent when `Ξ` is out of budget.
    pub lower_xi: Option<f64>,
    pub constant: f64,
}

pub fn solution_count(problem: &LatticeProblem, c: f64) -> Result<SolutionCount> {
    let search = lattice_search(problem)?;
    Ok(solution_count_from(problem, &search, c))
}

/// [`solution_count`] for a search that has already been run.
pub fn solution_count_from(problem: &LatticeProblem, search: &SearchReport, c: f64) -> SolutionCount {
    let n = problem.dim() as i32;
    let k = k_index(problem.dim() as f64 * problem.omega as f64 / problem.c_o);
    let lower_proportional = (c / (problem.omega as f64 * (k as f64).sqrt())).powi(n) * search.scanned as f64;
    let lower_xi = search
        .xi
        .as_ref()
        .map(|r| c.powf(n as f64 / 2.0) / (problem.h * r.xi));
    SolutionCount {
        count: search.hits.len(),
        k,
        lower_proportional,
        lower_xi,
        constant: c,
    }
}

/// Scale `s` in the phase `e^{i s ν λ_k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConvention {
    /// `e^{2πiνλ}`.
    #[default]
    TwoPi,
    /// `e^{2iνλ}`.
    Two,
}

impl PhaseConvention {
    fn phase(self, nu: f64, lambda: f64) -> f64 {
        match self {
            PhaseConvention::TwoPi => std::f64::consts::TAU * (nu * lambda).rem_euclid(1.0),
            PhaseConvention::Two => 2.0 * nu * lambda,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimsupScan {
    pub running_max: Vec<f64>,
    pub final_max: f64,
    /// `Σ α_k`, the limiting value.
    pub total: f64,
}

/// Running maximum of `|Σ α_k e^{i s ν λ_k}|` over `ν = start + step·i`, `i < terms`.
pub fn limsup_exponential_sum(
    alphas: &[f64],
    lambdas: &[f64],
    start: i64,
    step: i64,
    terms: usize,
    convention: PhaseConvention,
) -> Result<LimsupScan> {
    if alphas.len() != lambdas.len() {
        return Err(Error::DimensionMismatch {
            expected: alphas.len(),
            got: lambdas.len(),
        });
    }
    if let Some(a) = alphas.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::pre("alpha >= 0", format!("alpha = {a}")));
    }
    if terms < 1 {
        return Err(Error::pre("M >= 1", "no terms"));
    }
    let mut running_max = Vec::with_capacity(terms);
    let mut best = 0.0f64;
    for i in 0..terms {
        let nu = (start + step * i as i64) as f64;
        let z: Complex64 = alphas
            .iter()
            .zip(lambdas)
            .map(|(&a, &l)| Complex64::from_polar(a, convention.phase(nu, l)))
            .sum();
        best = best.max(z.norm());
        running_max.push(best);
    }
    Ok(LimsupScan {
        running_max,
        final_max: best,
        total: alphas.iter().sum(),
    })
}

/// `S_J = (1/A) Σ_{j=0}^{J} |Σ_k a_k² cos(λ_k j a)|` at each `J` of `ladder`.
pub fn divergence_partial_sums(spec: &PolynomialSpec, a: f64, ladder: &[u64]) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(Error::pre("a > 0", format!("a = {a}")));
    }
    if spec.is_empty() || !spec.coeffs.is_non_vanishing(spec.y, spec.x) {
        return Err(Error::pre("non-vanishing coefficients", "some a_k = 0 on the range"));
    }
    let weights: Vec<f64> = spec.coefficients().iter().map(|c| c * c).collect();
    let big_a = power_sum(spec, 2);
    let freqs = spec.angular_frequencies();
    let top = ladder.iter().copied().max().unwrap_or(0);
    let mut order: Vec<usize> = (0..ladder.len()).collect();
    order.sort_by_key(|&i| ladder[i]);
    let mut out = vec![0.0; ladder.len()];
    let mut next = 0;
    let mut s = 0.0;
    for j in 0..=top {
        let step = j as f64 * a;
        let term: f64 = weights.iter().zip(&freqs).map(|(w, l)| w * (l * step).cos()).sum();
        s += term.abs();
        while next < order.len() && ladder[order[next]] == j {
            out[order[next]] = s / big_a;
            next += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCorrelation {
    pub max_offdiag_corr: f64,
    pub eta: f64,
    pub var_ratio_min: f64,
    /// `max corr <= η`.
    pub correlation_cap_holds: bool,
    /// `min var ratio >= η`.
    pub variance_floor_holds: bool,
    /// Times at which `X^cos` was evaluated.
    pub sample_times: Vec<f64>,
}

/// Preconditions for the lattice correlation cap: `c ∈ (0, 2/π)`,
/// `(c/2) β² < 1` and `ω > 12π / (c (πβ)²)`.
pub fn check_lattice_correlation_preconditions(omega: u64, beta: f64, c: f64) -> Result<()> {
    if !(c > 0.0 && c < 2.0 / std::f64::consts::PI) {
        return Err(Error::pre("0 < c < 2/pi", format!("c = {c}")));
    }
    if !(beta > 0.0 && c / 2.0 * beta * beta < 1.0) {
        return Err(Error::pre("(c/2) beta^2 < 1", format!("beta = {beta}")));
    }
    let pb = std::f64::consts::PI * beta;
    let need = 12.0 * std::f64::consts::PI / (c * pb * pb);
    if !(omega as f64 > need) {
        return Err(Error::pre("omega > 12 pi / (c (pi beta)^2)", format!("omega = {omega}, need > {need}")));
    }
    Ok(())
}

/// Exact normalized correlations of `X^cos(t) = Σ a_k g_k cos(λ_k t)` at
/// `t_u = j_u a` (times `π` when `pi_factor`).
///
/// Each `j_u` must pass the filter `max_k ‖(λ_k j_u a - β) / 2π‖ <= 1/ω`,
/// i.e. be a lattice hit for frequencies `λ_k a / 2π` and targets `β / 2π`.
/// The cap `η = 1 - 2/ω` and the variance floor are reported, not asserted.
pub fn lattice_correlation(
    spec: &PolynomialSpec,
    a: f64,
    omega: u64,
    beta: f64,
    c: f64,
    lattice_points: &[f64],
    pi_factor: bool,
) -> Result<LatticeCorrelation> {
    check_lattice_correlation_preconditions(omega, beta, c)?;
    if lattice_points.is_empty() {
        return Err(Error::pre("lattice points", "at least one"));
    }
    let freqs = spec.angular_frequencies();
    let weights: Vec<f64> = spec.coefficients().iter().map(|v| v * v).collect();
    let tol = 1.0 / omega as f64;
    for &j in lattice_points {
        let worst = freqs
            .iter()
            .map(|l| nearest_int_dist((l * j * a - beta) / std::f64::consts::TAU))
            .fold(0.0, f64::max);
        if worst > tol {
            return Err(Error::ConditionFailed {
                name: "lattice point within 1/omega of the target",
                lhs: worst,
                rhs: tol,
            });
        }
    }
    let scale = if pi_factor { std::f64::consts::PI } else { 1.0 };
    let times: Vec<f64> = lattice_points.iter().map(|j| scale * j * a).collect();
    let cosines: Vec<Vec<f64>> = times.iter().map(|t| freqs.iter().map(|l| (l * t).cos()).collect()).collect();
    let var: Vec<f64> = cosines
        .iter()
        .map(|cs| weights.iter().zip(cs).map(|(w, c)| w * c * c).sum())
        .collect();
    let big_a: f64 = weights.iter().sum();
    let var_ratio_min = var.iter().map(|v| v / big_a).fold(f64::INFINITY, f64::min);
    let mut max_corr = f64::NEG_INFINITY;
    for u in 0..times.len() {
        for v in 0..u {
            let cov: f64 = weights
                .iter()
                .zip(cosines[u].iter().zip(&cosines[v]))
                .map(|(w, (cu, cv))| w * cu * cv)
                .sum();
            max_corr = max_corr.max(cov / (var[u] * var[v]).sqrt());
        }
    }
    let eta = 1.0 - 2.0 / omega as f64;
    Ok(LatticeCorrelation {
        max_offdiag_corr: max_corr,
        eta,
        var_ratio_min,
        correlation_cap_holds: max_corr <= eta,
        variance_floor_holds: var_ratio_min >= eta,
        sample_times: times,
    })
}

/// `(1 - η)^{-(m-1)/2} Φ(κ / sqrt(1 + η(m-1)))^m`.
pub fn bound_cos_lattice(m: usize, eta: f64, kappa: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::pre("m >= 2", format!("m = {m}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::pre("0 < eta < 1", format!("eta = {eta}")));
    }
    let mf = m as f64;
    let p = phi(kappa / (1.0 + eta * (mf - 1.0)).sqrt());
    Ok((1.0 - eta).powf(-(mf - 1.0) / 2.0) * p.powi(m as i32))
}
