//! Rational quantization of frequencies and the transfer inequality between
//! an almost periodic polynomial `X` and its cyclic neighbour `X⊥`.
//!
//! A test sequence `N_k >= k` quantizes each frequency to
//! `ℓ(k) = ⌊N_k L_k⌋ / N_k`, so `|ℓ(k) - L_k| <= 1/N_k`. The same sequence
//! sieves an interval `I` into the blocks `[N_{κ-1}, N_κ)` it contains;
//! their number `κ(I)` enters the error term through `log κ`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::spectrum::{power_sum, AngularConvention, FrequencySeq, PolynomialSpec, RationalFreq};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestSequenceRule {
    /// `N_k = values[k - 1]`.
    Explicit { values: Vec<u64> },
    /// `N_k = 2^k`.
    PowersOfTwo,
    /// `N_k = base^k`.
    Geometric { base: u32 },
    /// `N_k = k`.
    Identity,
    /// `N_k = max(k, floor)`.
    AtLeast { floor: u64 },
}

/// Non-decreasing positive integers with `N_k >= k`, materialized on `1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSequence {
    rule: TestSequenceRule,
    values: Vec<BigUint>,
}

impl TestSequence {
    pub fn new(rule: TestSequenceRule, len: usize) -> Result<Self> {
        let values: Vec<BigUint> = match &rule {
            TestSequenceRule::Explicit { values } => {
                if values.len() < len {
                    return Err(Error::IndexOutOfRange {
                        what: "explicit test sequence",
                        index: values.len() + 1,
                    });
                }
                values[..len].iter().map(|&v| BigUint::from(v)).collect()
            }
            TestSequenceRule::PowersOfTwo => (1..=len).map(|k| BigUint::one() << k).collect(),
            TestSequenceRule::Geometric { base } => {
                if *base < 2 {
                    return Err(Error::pre("geometric base", "base >= 2"));
                }
                (1..=len as u32).map(|k| BigUint::from(*base).pow(k)).collect()
            }
            TestSequenceRule::Identity => (1..=len as u64).map(BigUint::from).collect(),
            TestSequenceRule::AtLeast { floor } => (1..=len as u64).map(|k| BigUint::from(k.max(*floor))).collect(),
        };
        for (i, v) in values.iter().enumerate() {
            let k = i + 1;
            if *v < BigUint::from(k) {
                return Err(Error::pre("N_k >= k", format!("N_{k} = {v}")));
            }
            if i > 0 && *v < values[i - 1] {
                return Err(Error::pre("non-decreasing", format!("N_{k} = {v} < N_{} = {}", k - 1, values[i - 1])));
            }
        }
        Ok(Self { rule, values })
    }

    pub fn rule(&self) -> &TestSequenceRule {
        &self.rule
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `N_k` for `1 <= k <= len`.
    pub fn get(&self, k: usize) -> Result<&BigUint> {
        if k == 0 || k > self.values.len() {
            return Err(Error::IndexOutOfRange {
                what: "test sequence",
                index: k,
            });
        }
        Ok(&self.values[k - 1])
    }

    fn as_f64(&self, k: usize) -> f64 {
        self.values[k - 1].to_f64().unwrap_or(f64::INFINITY)
    }
}

/// `(⌊N L⌋, N)`, computed exactly from the binary value of `L`.
pub fn rational_freq(l: f64, n: &BigUint) -> Result<RationalFreq> {
    if n.is_zero() {
        return Err(Error::pre("N >= 1", "N = 0"));
    }
    let exact = BigRational::from_float(l).ok_or_else(|| Error::Domain(format!("frequency {l} is not finite")))?;
    let scaled = exact * BigRational::from_integer(BigInt::from(n.clone()));
    Ok(RationalFreq::new(scaled.floor().to_integer(), n.clone()))
}

/// `L - ℓ` as an exact rational.
pub fn quantization_error(l: f64, q: &RationalFreq) -> Option<BigRational> {
    let exact = BigRational::from_float(l)?;
    Some(exact - BigRational::new(q.num.clone(), BigInt::from(q.den.clone())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaCount {
    pub count: usize,
    /// Blocks with `N_{κ-1} = N_κ`, counted as contained.
    pub degenerate: usize,
    /// True when the sequence ends before leaving the interval, so more
    /// blocks may exist beyond the materialized range.
    pub truncated: bool,
}

/// `κ(I) = #{κ >= 2 : [N_{κ-1}, N_κ) ⊂ [lo, hi]}`.
pub fn kappa_detail(ts: &TestSequence, lo: f64, hi: f64) -> KappaCount {
    let mut count = 0;
    let mut degenerate = 0;
    for kappa in 2..=ts.len() {
        let (a, b) = (ts.as_f64(kappa - 1), ts.as_f64(kappa));
        let contained = if a == b { a >= lo && a <= hi } else { a >= lo && b <= hi };
        if contained {
            count += 1;
            if a == b {
                degenerate += 1;
            }
        }
    }
    KappaCount {
        count,
        degenerate,
        truncated: ts.is_empty() || ts.as_f64(ts.len()) <= hi,
    }
}

pub fn kappa_count(ts: &TestSequence, lo: f64, hi: f64) -> usize {
    kappa_detail(ts, lo, hi).count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaBranch {
    /// `1 <= y <= U`: quantization, head and tail summands.
    HeadTail,
    /// `1 <= U < y`: a single product.
    Short,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub branch: DeltaBranch,
    /// `y (Σ 1/N_k²)^{1/2} A^{1/2}` (head-tail) or `U (Σ 1/N_k²)^{1/2} A^{1/2}` (short).
    pub quantization: f64,
    /// `Σ_{y <= k < κ_U} |a_k|` with `κ_U = max{κ : N_κ <= U}`.
    pub head: f64,
    /// `sup_{κ : y <= N_κ <= U} N_κ (Σ_{κ<=k<=x} 1/N_k²)^{1/2} (Σ_{κ<=k<=x} a_k²)^{1/2}`.
    pub tail: f64,
    pub tail_argmax: Option<usize>,
    pub kappa_u: Option<usize>,
    /// `κ([1, U])`.
    pub kappa_one_u: KappaCount,
    /// `κ([y, U])`.
    pub kappa_y_u: KappaCount,
}

fn check_coverage(spec: &PolynomialSpec, ts: &TestSequence, u: f64) -> Result<()> {
    if ts.len() < spec.x {
        return Err(Error::IndexOutOfRange {
            what: "test sequence",
            index: spec.x,
        });
    }
    // N_κ >= κ, so only κ <= U can satisfy N_κ <= U
    let need = u.floor() as usize;
    if ts.len() < need && ts.as_f64(ts.len()) <= u {
        return Err(Error::IndexOutOfRange {
            what: "test sequence",
            index: ts.len() + 1,
        });
    }
    Ok(())
}

/// The amplitude `Δ` of the transfer inequality.
pub fn delta_term(spec: &PolynomialSpec, ts: &TestSequence, u: f64) -> Result<DeltaReport> {
    if !(u >= 1.0) {
        return Err(Error::pre("U >= 1", format!("U = {u}")));
    }
    if spec.y == 0 || spec.is_empty() {
        return Err(Error::pre("range", "1 <= y <= x"));
    }
    check_coverage(spec, ts, u)?;
    let (y, x) = (spec.y, spec.x);
    let coef = |k: usize| spec.coeffs.get(k).expect("validated range");
    let inv_sq: f64 = (y..=x).map(|k| ts.as_f64(k).powi(-2)).sum();
    let a = power_sum(spec, 2);
    let base = inv_sq.sqrt() * a.sqrt();
    let kappa_one_u = kappa_detail(ts, 1.0, u);
    let kappa_y_u = kappa_detail(ts, y as f64, u);
    if u < y as f64 {
        let q = u * base;
        return Ok(DeltaReport {
            delta: q,
            branch: DeltaBranch::Short,
            quantization: q,
            head: 0.0,
            tail: 0.0,
            tail_argmax: None,
            kappa_u: None,
            kappa_one_u,
            kappa_y_u,
        });
    }
    let quantization = y as f64 * base;
    let kappa_u = (1..=ts.len()).take_while(|&k| ts.as_f64(k) <= u).last();
    let head: f64 = match kappa_u {
        Some(kmax) => (y..kmax.min(x + 1)).map(|k| coef(k).abs()).sum(),
        None => 0.0,
    };
    let mut tail = 0.0;
    let mut tail_argmax = None;
    for kappa in 1..=ts.len().min(x) {
        let nk = ts.as_f64(kappa);
        if nk > u {
            break;
        }
        if nk < y as f64 {
            continue;
        }
        let s_inv: f64 = (kappa..=x).map(|k| ts.as_f64(k).powi(-2)).sum();
        let s_a: f64 = (kappa..=x).map(|k| coef(k).powi(2)).sum();
        let v = nk * s_inv.sqrt() * s_a.sqrt();
        if v > tail {
            tail = v;
            tail_argmax = Some(kappa);
        }
    }
    Ok(DeltaReport {
        delta: quantization + head + tail,
        branch: DeltaBranch::HeadTail,
        quantization,
        head,
        tail,
        tail_argmax,
        kappa_u,
        kappa_one_u,
        kappa_y_u,
    })
}

/// `X⊥`: same coefficients and range, frequencies `ℓ(k) = ⌊N_k L_k⌋/N_k`.
/// Integer-frequency specs are returned unchanged.
pub fn perp_process(spec: &PolynomialSpec, ts: &TestSequence) -> Result<PolynomialSpec> {
    let l = match &spec.freqs {
        FrequencySeq::Integer(_) => return Ok(spec.clone()),
        FrequencySeq::Real(v) => v,
        FrequencySeq::Rational(_) => return Err(Error::pre("real frequencies", "spec is already rational")),
    };
    if spec.convention != AngularConvention::Raw {
        return Err(Error::pre("raw convention", "real frequencies must use the raw angular convention"));
    }
    let n = spec.x.min(l.len());
    if ts.len() < n {
        return Err(Error::IndexOutOfRange {
            what: "test sequence",
            index: n,
        });
    }
    let freqs = (1..=n)
        .map(|k| rational_freq(l[k - 1], ts.get(k)?))
        .collect::<Result<Vec<_>>>()?;
    PolynomialSpec::new(spec.coeffs.clone(), FrequencySeq::Rational(freqs), spec.y, spec.x, spec.convention)
}

/// `max(log κ, 1)`: keeps the error term finite for `κ <= e`.
pub fn guarded_log_kappa(kappa: usize) -> f64 {
    if kappa == 0 {
        1.0
    } else {
        (kappa as f64).ln().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupDiffBound {
    /// `E` (y <= U) or `E'` (U < y); equal to `Δ` of the same branch.
    pub amplitude: f64,
    pub bound: f64,
    /// `κ([y, U])` for the head-tail branch, `κ([1, U])` otherwise.
    pub kappa: usize,
    pub log_kappa_used: f64,
    pub constant: f64,
    pub delta: DeltaReport,
}

/// `C E sqrt(max(log κ, 1))`, an upper bound on `E sup_{1<=u<=U} |X - X⊥|`.
pub fn sup_diff_bound(spec: &PolynomialSpec, ts: &TestSequence, u: f64, c: f64) -> Result<SupDiffBound> {
    let delta = delta_term(spec, ts, u)?;
    let kappa = match delta.branch {
        DeltaBranch::HeadTail => delta.kappa_y_u.count,
        DeltaBranch::Short => delta.kappa_one_u.count,
    };
    let lk = guarded_log_kappa(kappa);
    Ok(SupDiffBound {
        amplitude: delta.delta,
        bound: c * delta.delta * lk.sqrt(),
        kappa,
        log_kappa_used: lk,
        constant: c,
        delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// `2 exp(-C h² / (Δ² max(log κ([1,U]), 1)))`; zero when `Δ = 0`.
    pub error_term: f64,
    pub log_kappa_used: f64,
    pub constant: f64,
    pub delta: DeltaReport,
}

/// Error term of `P{sup X <= Θ - h} <= P{sup X⊥ <= Θ} + error_term` over `[1, U]`.
pub fn transfer_bound(
    spec: &PolynomialSpec,
    ts: &TestSequence,
    u: f64,
    theta: f64,
    h: f64,
    c: f64,
) -> Result<TransferReport> {
    if !(h > 0.0 && h < theta) {
        return Err(Error::pre("0 < h < Θ", format!("h = {h}, Θ = {theta}")));
    }
    let delta = delta_term(spec, ts, u)?;
    let lk = guarded_log_kappa(delta.kappa_one_u.count);
    let error_term = if delta.delta == 0.0 {
        0.0
    } else {
        2.0 * (-c * h * h / (delta.delta * delta.delta * lk)).exp()
    };
    Ok(TransferReport {
        error_term,
        log_kappa_used: lk,
        constant: c,
        delta,
    })
}

/// Largest `C` for which `lhs <= rhs + 2 exp(-C r)` still holds, given the
/// observed slack `s = lhs - rhs` and rate `r = h²/(Δ² max(log κ, 1))`.
/// Infinite when the slack is not positive; zero when it is at least 2.
pub fn largest_passing_constant(slack: f64, rate: f64) -> f64 {
    if slack <= 0.0 {
        return f64::INFINITY;
    }
    if slack >= 2.0 || rate <= 0.0 {
        return 0.0;
    }
    -(slack / 2.0).ln() / rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{sample_paths_coupled, GridSpec};
    use crate::spectrum::CoefficientSeq;
    use proptest::prelude::*;

    fn real_spec(a: Vec<f64>, l: Vec<f64>, y: usize) -> PolynomialSpec {
        let x = a.len();
        PolynomialSpec::new(CoefficientSeq::explicit(a), FrequencySeq::Real(l), y, x, AngularConvention::Raw).unwrap()
    }

    #[test]
    fn rational_freq_examples() {
        let q = rational_freq(2f64.sqrt(), &BigUint::from(10u32)).unwrap();
        assert_eq!((q.num.clone(), q.den.clone()), (BigInt::from(14), BigUint::from(10u32)));
        let err = quantization_error(2f64.sqrt(), &q).unwrap();
        assert!(err > BigRational::zero() && err <= BigRational::new(BigInt::one(), BigInt::from(10)));
        let q = rational_freq(7.0, &BigUint::from(13u32)).unwrap();
        assert_eq!(q.num, BigInt::from(91));
        assert!(quantization_error(7.0, &q).unwrap().is_zero());
        let big = BigUint::one() << 200usize;
        let q = rational_freq(1.0 / 3.0, &big).unwrap();
        assert!((q.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn kappa_examples() {
        let p2 = TestSequence::new(TestSequenceRule::PowersOfTwo, 10).unwrap();
        assert_eq!(kappa_count(&p2, 1.0, 16.0), 3);
        assert_eq!(kappa_count(&p2, 1.0, 3.0), 0);
        let id = TestSequence::new(TestSequenceRule::Identity, 40).unwrap();
        for m in 1..30 {
            assert_eq!(kappa_count(&id, 1.0, m as f64), m - 1);
        }
        let rep = TestSequence::new(TestSequenceRule::Explicit { values: vec![2, 4, 4, 8, 9] }, 5).unwrap();
        let d = kappa_detail(&rep, 1.0, 8.0);
        assert_eq!((d.count, d.degenerate), (3, 1));
        assert!(TestSequence::new(TestSequenceRule::Explicit { values: vec![1, 1] }, 2).is_err());
        assert!(TestSequence::new(TestSequenceRule::Explicit { values: vec![3, 2] }, 2).is_err());
    }

    #[test]
    fn delta_short_branch() {
        let (y, x) = (8usize, 16usize);
        let spec = real_spec(vec![1.0; x], (1..=x).map(|k| k as f64 + 0.5).collect(), y);
        let ts = TestSequence::new(TestSequenceRule::AtLeast { floor: 10 }, x).unwrap();
        let d = delta_term(&spec, &ts, 4.0).unwrap();
        assert_eq!(d.branch, DeltaBranch::Short);
        let s: f64 = (y..=x).map(|k| (k.max(10) as f64).powi(-2)).sum();
        assert!((d.delta - 4.0 * s.sqrt() * ((x - y + 1) as f64).sqrt()).abs() < 1e-14);
        let ts = TestSequence::new(TestSequenceRule::Identity, x).unwrap();
        let e = sup_diff_bound(&spec, &ts, 4.0, 1.0).unwrap();
        let s: f64 = (8..=16).map(|k| (k as f64).powi(-2)).sum();
        assert!((e.amplitude - 4.0 * s.sqrt() * 3.0).abs() < 1e-14);
    }

    #[test]
    fn delta_head_tail_branch() {
        let x = 30;
        let a: Vec<f64> = (1..=x).map(|k| (k as f64).powf(-0.5)).collect();
        let spec = real_spec(a.clone(), (1..=x).map(|k| k as f64 * 1.1).collect(), 1);
        let ts = TestSequence::new(TestSequenceRule::PowersOfTwo, x).unwrap();
        let d = delta_term(&spec, &ts, 64.0).unwrap();
        assert_eq!(d.branch, DeltaBranch::HeadTail);
        // κ_U = 6 since 2^6 = 64 <= U < 2^7
        assert_eq!(d.kappa_u, Some(6));
        let head: f64 = a[..5].iter().sum();
        assert!((d.head - head).abs() < 1e-14);
        assert_eq!(d.kappa_one_u.count, 5);
        // tail of a geometric test sequence stays below 2/sqrt(3) times sqrt(A)
        assert!(d.tail <= 2.0 / 3f64.sqrt() * power_sum(&spec, 2).sqrt());
        for kappa in 1..40 {
            let v = 2f64.powi(kappa) * (kappa..60).map(|k| 4f64.powi(-k)).sum::<f64>().sqrt();
            assert!(v <= 2.0 / 3f64.sqrt() + 1e-12);
        }
        let zero = real_spec(vec![0.0; x], (1..=x).map(|k| k as f64 * 1.1).collect(), 1);
        assert_eq!(delta_term(&zero, &ts, 64.0).unwrap().delta, 0.0);
        let t = transfer_bound(&zero, &ts, 64.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(t.error_term, 0.0);
    }

    #[test]
    fn transfer_error_term() {
        let x = 20;
        let spec = real_spec(vec![0.5; x], (1..=x).map(|k| k as f64 * 1.3).collect(), 1);
        let ts = TestSequence::new(TestSequenceRule::PowersOfTwo, x).unwrap();
        let t = transfer_bound(&spec, &ts, 16.0, 3.0, 1e-9, 1.0).unwrap();
        assert!((t.error_term - 2.0).abs() < 1e-12);
        assert!(transfer_bound(&spec, &ts, 16.0, 1.0, 1.0, 1.0).is_err());
        let t = transfer_bound(&spec, &ts, 16.0, 3.0, 1.5, 2.0).unwrap();
        let d = t.delta.delta;
        let expect = 2.0 * (-2.0 * 2.25 / (d * d * 3f64.ln().max(1.0))).exp();
        assert!((t.error_term - expect).abs() < 1e-15);
    }

    #[test]
    fn perp_process_properties() {
        let spec = PolynomialSpec::trigonometric(vec![1.0, 2.0]);
        let ts = TestSequence::new(TestSequenceRule::Identity, 2).unwrap();
        assert_eq!(perp_process(&spec, &ts).unwrap(), spec);
        let x = 12;
        let l: Vec<f64> = (1..=x).map(|k| (k as f64).sqrt() * 3.3).collect();
        let spec = real_spec((1..=x).map(|k| 1.0 / k as f64).collect(), l.clone(), 1);
        let ts = TestSequence::new(TestSequenceRule::PowersOfTwo, x).unwrap();
        let perp = perp_process(&spec, &ts).unwrap();
        if let FrequencySeq::Rational(q) = &perp.freqs {
            for (k, qk) in q.iter().enumerate() {
                let e = quantization_error(l[k], qk).unwrap();
                assert!(e >= BigRational::zero());
                assert!(e <= BigRational::new(BigInt::one(), BigInt::from(ts.get(k + 1).unwrap().clone())));
            }
        } else {
            panic!("expected rational frequencies");
        }
        let (p, q) = sample_paths_coupled(&spec, &perp, &GridSpec::uniform(0.0, 3.0, 7), 5).unwrap();
        assert_eq!(p[0], q[0]);
    }

    #[test]
    fn largest_passing_constant_inverts_error_term() {
        let c = largest_passing_constant(0.1, 0.5);
        assert!((2.0 * (-c * 0.5f64).exp() - 0.1).abs() < 1e-15);
        assert_eq!(largest_passing_constant(-0.2, 0.5), f64::INFINITY);
        assert_eq!(largest_passing_constant(2.5, 0.5), 0.0);
    }

    proptest! {
        #[test]
        fn quantization_error_below_inverse_n(l in 1e-6f64..1e6, n in 1u64..u64::MAX) {
            let nb = BigUint::from(n);
            let q = rational_freq(l, &nb).unwrap();
            let e = quantization_error(l, &q).unwrap();
            prop_assert!(e >= BigRational::zero());
            prop_assert!(e < BigRational::new(BigInt::one(), BigInt::from(nb)));
        }

        #[test]
        fn refining_test_sequence_does_not_grow_error(l in 0.1f64..100.0, n in 1u64..1_000_000, m in 1u64..50) {
            let e1 = quantization_error(l, &rational_freq(l, &BigUint::from(n)).unwrap()).unwrap();
            let e2 = quantization_error(l, &rational_freq(l, &BigUint::from(n * m)).unwrap()).unwrap();
            // the finer grid contains the coarser one, so its floor is at least as close
            prop_assert!(e2 <= e1);
        }
    }
}
