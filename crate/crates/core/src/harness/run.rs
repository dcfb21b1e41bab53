use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{BlockForm, DecouplingTarget, Experiment, ExperimentConfig};
use super::record::{Point, ResultRecord};
use crate::bounds::{bound_block, bound_block_exact_form, bound_equicorrelated, bound_moderate_trig, szego_bounds};
use crate::cyclic::{largest_passing_constant, perp_process, sup_diff_bound, transfer_bound, TestSequence};
use crate::decoupling::{cyclic_deviation_bound, verify_decoupling_mc};
use crate::kronecker::{
    bound_cos_lattice, divergence_partial_sums, lattice_correlation, lattice_search, limsup_exponential_sum,
    solution_count_from, LatticeProblem,
};
use crate::simulate::{
    mc_coupled_sup_prob, mc_expected_sup_diff, mc_sup_prob, mc_sup_prob_multi, mc_vector_sup_prob_multi,
    CovarianceSpec, Functional, GridSpec, McConfig,
};
use crate::spectrum::SpectralDensity;
use crate::{Error, Result, VERSION};

/// Runs one experiment: evaluates the bound, estimates the matching
/// probability by Monte Carlo where there is one, and records each
/// comparison as an assertion. MC comparisons allow three half-widths.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let start = Instant::now();
    let seed = cfg.run.seed.unwrap_or(0);
    let mut rec = ResultRecord {
        config_hash: cfg.hash(seed),
        kind: cfg.experiment.kind().to_string(),
        seed,
        reps: cfg.run.reps,
        points: Vec::new(),
        values: BTreeMap::new(),
        assertions: Vec::new(),
        wall_time_ms: 0,
        version: VERSION.to_string(),
    };
    let mc = McConfig::new(cfg.run.reps, seed).with_workers(cfg.run.workers.max(1));
    dispatch(cfg, &mc, &mut rec).map_err(|e| e.context(format!("{} experiment", rec.kind)))?;
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

fn dispatch(cfg: &ExperimentConfig, mc: &McConfig, rec: &mut ResultRecord) -> Result<()> {
    let c = cfg.constants.c;
    match &cfg.experiment {
        Experiment::Equicorrelated { n, lambda, thetas } => {
            let cov = CovarianceSpec::Equicorrelated { n: *n, lambda: *lambda };
            let est = mc_vector_sup_prob_multi(&cov, thetas, Functional::Max, mc)?;
            for (&t, e) in thetas.iter().zip(est) {
                let b = bound_equicorrelated(*n, *lambda, t)?.value;
                rec.check_le(format!("P{{max <= {t}}} <= bound"), e.estimate, b + 3.0 * e.half_width);
                rec.points.push(Point::new("max", t).mc(e).bound(b));
            }
        }
        Experiment::Block {
            n_blocks,
            k,
            u,
            lambda,
            thetas,
            form,
        } => {
            let cov = CovarianceSpec::Block {
                n_blocks: *n_blocks,
                k: *k,
                u: *u,
                lambda: *lambda,
            };
            let est = mc_vector_sup_prob_multi(&cov, thetas, Functional::Max, mc)?;
            for (&t, e) in thetas.iter().zip(est) {
                let b = match form {
                    BlockForm::Verbatim => bound_block(*lambda, *u, *k, *n_blocks, t)?,
                    BlockForm::Exact => bound_block_exact_form(*lambda, *u, *k, *n_blocks, t)?,
                };
                if let Some(beta) = b.intermediate("beta") {
                    rec.set("beta", beta);
                }
                rec.check_le(format!("P{{max <= {t}}} <= bound"), e.estimate, b.value + 3.0 * e.half_width);
                rec.points.push(Point::new("max", t).mc(e).bound(b.value));
            }
        }
        Experiment::Szego { density, n, zs } => {
            let f = SpectralDensity::cosine_polynomial(density.clone());
            if !f.is_nonnegative_on_grid(4096) {
                return Err(Error::pre("spectral density", "must be nonnegative"));
            }
            let gamma = f.autocovariances(*n, 1e-10)?;
            // the two-sided bound presumes unit variance
            rec.set("variance", gamma[0]);
            let cov = CovarianceSpec::Stationary { gamma };
            let est = mc_vector_sup_prob_multi(&cov, zs, Functional::AbsMax, mc)?;
            for (&z, e) in zs.iter().zip(est) {
                let b = szego_bounds(&f, *n, z)?;
                rec.set("geometric_mean", b.geometric_mean);
                rec.check_le(format!("lower({z}) <= P{{max|X| <= {z}}}"), b.lower - 3.0 * e.half_width, e.estimate);
                rec.check_le(format!("P{{max|X| <= {z}}} <= upper({z})"), e.estimate, b.upper + 3.0 * e.half_width);
                rec.points.push(Point::new("lower", z).mc(e.clone()).bound(b.lower));
                rec.points.push(Point::new("upper", z).mc(e).bound(b.upper));
            }
        }
        Experiment::ModerateTrig {
            polynomial,
            eta,
            eps,
            v,
            density,
        } => {
            let spec = polynomial.build()?;
            let report = bound_moderate_trig(&spec, *eta, *eps, c, *v)?;
            let theta = report.threshold.expect("moderate bound fixes its threshold");
            let e = mc_sup_prob(&spec, &GridSpec::per_unit(0.0, *eps, *density), theta, mc)?;
            let exponent = report.intermediate("exponent").unwrap_or(0.0);
            rec.set("theta", theta);
            rec.set("exponent", exponent);
            rec.set("A", report.intermediate("A").unwrap_or(f64::NAN));
            rec.set("c", c);
            let floor = e.estimate - 3.0 * e.half_width;
            let c_max = if floor <= 0.0 || exponent == 0.0 {
                f64::INFINITY
            } else {
                floor.ln() / (exponent / c)
            };
            rec.set("c_max", c_max);
            rec.check_le("P{sup X <= theta} <= bound", e.estimate, report.value + 3.0 * e.half_width);
            rec.points.push(Point::new("sup", theta).mc(e).bound(report.value));
        }
        Experiment::CyclicTransfer {
            polynomial,
            test_sequence,
            u,
            theta,
            h,
            density,
        } => {
            let spec = polynomial.build()?;
            let len = spec.x.max(u.floor() as usize + 1);
            let ts = TestSequence::new(test_sequence.clone(), len)?;
            let perp = perp_process(&spec, &ts)?;
            let grid = GridSpec::per_unit(1.0, *u, *density);
            let t = transfer_bound(&spec, &ts, *u, *theta, *h, c)?;
            let (pa, pb) = mc_coupled_sup_prob(&spec, &perp, &grid, &[theta - h], &[*theta], mc)?;
            let (ea, eb) = (pa.into_iter().next().unwrap(), pb.into_iter().next().unwrap());
            let slack = ea.estimate - eb.estimate - 3.0 * (ea.half_width + eb.half_width);
            let d = t.delta.delta;
            let rate = if d == 0.0 { f64::INFINITY } else { h * h / (d * d * t.log_kappa_used) };
            rec.set("delta", d);
            rec.set("kappa_1_u", t.delta.kappa_one_u.count as f64);
            rec.set("log_kappa_used", t.log_kappa_used);
            rec.set("error_term", t.error_term);
            rec.set("rate", rate);
            rec.set("c", c);
            rec.set("c_max", largest_passing_constant(slack, rate));
            rec.check_le(
                "P{sup X <= theta-h} <= P{sup Xperp <= theta} + error",
                ea.estimate,
                eb.estimate + t.error_term + 3.0 * (ea.half_width + eb.half_width),
            );
            let diff = mc_expected_sup_diff(&spec, &perp, &grid, mc)?;
            let sd = sup_diff_bound(&spec, &ts, *u, c)?;
            rec.set("sup_diff_amplitude", sd.amplitude);
            rec.points.push(Point::new("sup X <= theta-h", theta - h).mc(ea).bound(eb.estimate + t.error_term));
            rec.points.push(Point::new("sup Xperp <= theta", *theta).mc(eb));
            rec.points.push(Point::new("E sup|X - Xperp|", *u).mc(diff).bound(sd.bound));
        }
        Experiment::Decoupling(DecouplingTarget::Vector { covariance, p, beta, boxes }) => {
            let check = verify_decoupling_mc(covariance, *p, *beta, boxes, mc)?;
            rec.set("p_x", check.multiplier.p_x);
            rec.set("multiplier", check.multiplier.value);
            rec.set("required_p", check.multiplier.required_p);
            rec.check_le(
                "P{X in box} <= multiplier * prod P^{1/p}",
                check.lhs.estimate,
                check.rhs + 3.0 * check.lhs.half_width,
            );
            rec.points.push(Point::new("box", *p).mc(check.lhs).bound(check.rhs));
        }
        Experiment::Decoupling(DecouplingTarget::CyclicDeviation {
            polynomial,
            n,
            eps,
            thetas,
        }) => {
            let spec = polynomial.build()?;
            let reports = thetas
                .iter()
                .map(|&t| cyclic_deviation_bound(&spec, *n, *eps, t))
                .collect::<Result<Vec<_>>>()?;
            let z = (*n as f64 * eps).ceil() as usize;
            let est = mc_sup_prob_multi(&spec, &GridSpec::lattice(*n, z), thetas, mc)?;
            if let Some(r) = reports.first() {
                rec.set("p", r.intermediate("p").unwrap_or(f64::NAN));
                rec.set("z", z as f64);
            }
            for ((&t, r), e) in thetas.iter().zip(&reports).zip(est) {
                rec.check_le(format!("P{{max_j X(j/n) <= {t}}} <= bound"), e.estimate, r.value + 3.0 * e.half_width);
                rec.points.push(Point::new("lattice max", t).mc(e).bound(r.value));
            }
        }
        Experiment::KroneckerSearch {
            lambdas,
            betas,
            trials,
            omega,
            h,
            interval,
        } => {
            let draws = McConfig::new(*trials as u64, mc.seed);
            let mut found = 0usize;
            let mut c_prop = f64::INFINITY;
            let mut c_xi = f64::INFINITY;
            for trial in 0..*trials {
                let b = match betas {
                    Some(b) => b.clone(),
                    None => {
                        let mut rng = draws.rng(trial as u64);
                        (0..lambdas.len()).map(|_| rng.random::<f64>()).collect()
                    }
                };
                let problem = LatticeProblem::new(lambdas.clone(), b, *omega, *h, *interval)?
                    .with_c_o(cfg.constants.c_o)?;
                let s = lattice_search(&problem)?;
                let count = solution_count_from(&problem, &s, c);
                if trial == 0 {
                    rec.set("k", count.k as f64);
                    if let Some(x) = &s.xi {
                        rec.set("xi", x.xi);
                    }
                    if let Some(t) = s.threshold {
                        rec.set("length_threshold", t);
                    }
                    rec.set("armed", s.armed as u8 as f64);
                }
                let nf = lambdas.len() as f64;
                let k_sqrt = (count.k as f64).sqrt();
                c_prop = c_prop.min(*omega as f64 * k_sqrt * (count.count as f64 / s.scanned as f64).powf(1.0 / nf));
                if let Some(x) = &s.xi {
                    c_xi = c_xi.min((count.count as f64 * h * x.xi).powf(2.0 / nf));
                }
                found += s.success as usize;
                if s.armed {
                    rec.check_le(format!("trial {trial}: achieved <= 1/omega"), s.achieved, 1.0 / *omega as f64);
                }
                rec.points.push(
                    Point::new("achieved", trial as f64)
                        .value(s.achieved)
                        .bound(1.0 / *omega as f64),
                );
                rec.points.push(
                    Point::new("count", trial as f64)
                        .value(count.count as f64)
                        .bound(count.lower_proportional),
                );
            }
            rec.set("found", found as f64);
            rec.set("trials", *trials as f64);
            rec.set("c_max_proportional", c_prop);
            rec.set("c_max_xi", c_xi);
        }
        Experiment::Limsup {
            alphas,
            lambdas,
            start,
            step,
            ladder,
            convention,
        } => {
            let top = ladder.iter().copied().max().unwrap_or(0);
            let scan = limsup_exponential_sum(alphas, lambdas, *start, *step, top, *convention)?;
            rec.set("total", scan.total);
            let mut prev = 0.0;
            for &m in ladder {
                let v = scan.running_max[m.max(1) - 1];
                rec.check_le(format!("running max non-decreasing at M={m}"), prev, v);
                rec.check_le(format!("running max <= sum alpha at M={m}"), v, scan.total * (1.0 + 1e-12));
                rec.points.push(Point::new("running max", m as f64).value(v).bound(scan.total));
                prev = v;
            }
        }
        Experiment::Divergence {
            polynomial,
            a,
            ladder,
            growth,
        } => {
            let spec = polynomial.build()?;
            let mut all: Vec<u64> = ladder.clone();
            all.extend(ladder.iter().map(|j| 2 * j));
            let sums = divergence_partial_sums(&spec, *a, &all)?;
            let (s, s2) = sums.split_at(ladder.len());
            for ((&j, &sj), &s2j) in ladder.iter().zip(s).zip(s2) {
                rec.check_le(format!("S_2J >= (1+g) S_J at J={j}"), (1.0 + growth) * sj, s2j);
                rec.points.push(Point::new("S_J", j as f64).value(sj));
                rec.points.push(Point::new("S_2J", (2 * j) as f64).value(s2j));
            }
        }
        Experiment::LatticeCorrelation {
            polynomial,
            a,
            omega,
            beta,
            c: c_shape,
            points,
            block_length,
            pi_factor,
            kappa,
        } => {
            let spec = polynomial.build()?;
            let tau = std::f64::consts::TAU;
            let lambdas: Vec<f64> = spec.angular_frequencies().iter().map(|l| l * a / tau).collect();
            let mut found = Vec::with_capacity(*points);
            for u in 0..*points {
                let lo = 1.0 + u as f64 * block_length;
                let problem = LatticeProblem::new(
                    lambdas.clone(),
                    vec![beta / tau; lambdas.len()],
                    *omega,
                    1.0,
                    (lo, lo + block_length),
                )?
                .with_c_o(cfg.constants.c_o)?;
                let s = lattice_search(&problem)?;
                if !s.success {
                    return Err(Error::ConditionFailed {
                        name: "lattice point found in block",
                        lhs: s.achieved,
                        rhs: 1.0 / *omega as f64,
                    });
                }
                found.push(s.t_best);
            }
            let r = lattice_correlation(&spec, *a, *omega, *beta, *c_shape, &found, *pi_factor)?;
            rec.set("eta", r.eta);
            rec.set("max_offdiag_corr", r.max_offdiag_corr);
            rec.set("var_ratio_min", r.var_ratio_min);
            if *points >= 2 {
                rec.set("cos_lattice_bound", bound_cos_lattice(*points, r.eta, *kappa)?);
                rec.check_le("max off-diagonal correlation <= eta", r.max_offdiag_corr, r.eta);
            }
            rec.check_le("eta <= min variance ratio", r.eta, r.var_ratio_min);
            for (i, t) in r.sample_times.iter().enumerate() {
                rec.points.push(Point::new("lattice point", i as f64).value(*t));
            }
        }
    }
    Ok(())
}

/// Largest value of each free constant for which every given record passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub constant: String,
    pub value: f64,
    pub cases: Vec<f64>,
}

/// Collects the per-record `c_max*` values and takes their minimum.
pub fn calibrate(records: &[ResultRecord]) -> Result<Vec<Calibration>> {
    let mut by_name: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        for (k, v) in &r.values {
            if let Some(name) = k.strip_prefix("c_max") {
                let label = format!("{}{}", r.kind, name);
                by_name.entry(label).or_default().push(*v);
            }
        }
    }
    if by_name.is_empty() {
        return Err(Error::Config(
            "no free constant to calibrate (kinds: moderate-trig, cyclic-transfer, kronecker-search)".into(),
        ));
    }
    Ok(by_name
        .into_iter()
        .map(|(constant, cases)| Calibration {
            value: cases.iter().copied().fold(f64::INFINITY, f64::min),
            constant,
            cases,
        })
        .collect())
}
