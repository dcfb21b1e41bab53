//! Numerical integration.
//!
//! Two rules are provided: a composite midpoint rule with doubling
//! refinement (used for periodic integrands, where it converges
//! geometrically, and for integrands with isolated logarithmic
//! singularities, which it never samples exactly), and an adaptive
//! 15-point Gauss-Kronrod rule for piecewise smooth integrands.

use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Result of a midpoint refinement run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointResult {
    pub value: f64,
    pub nodes: usize,
    pub last_change: f64,
}

/// Composite midpoint sum `h * Σ f(a + (i + 1/2) h)` with `n` panels.
pub fn midpoint_sum<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        s += f(a + (i as f64 + 0.5) * h);
    }
    s * h
}

/// Midpoint rule with doubling until two successive estimates differ by
/// less than `tol` (absolute, scaled by `max(1, |value|)`), starting at
/// `start` panels and giving up past `max_nodes`.
pub fn midpoint_doubling<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    start: usize,
    max_nodes: usize,
) -> Result<MidpointResult> {
    let mut n = start.max(1);
    let mut prev = midpoint_sum(&f, a, b, n);
    let mut change = f64::INFINITY;
    while n < max_nodes {
        n *= 2;
        let cur = midpoint_sum(&f, a, b, n);
        change = (cur - prev).abs();
        if !cur.is_finite() {
            return Ok(MidpointResult {
                value: cur,
                nodes: n,
                last_change: change,
            });
        }
        if change <= tol * cur.abs().max(1.0) {
            return Ok(MidpointResult {
                value: cur,
                nodes: n,
                last_change: change,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureNonConvergence {
        nodes: n,
        last_change: change,
    })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One G7/K15 panel: returns (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * hl, ((k - g) * hl).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss-Kronrod integration over `[a, b]`, first split into
/// `initial_panels` equal panels. Bisects the panel with the largest error
/// estimate until the summed estimate is below `abs_tol`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    let m = initial_panels.max(1);
    let h = (b - a) / m as f64;
    let mut heap = BinaryHeap::with_capacity(2 * m);
    for i in 0..m {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == m { b } else { lo + h };
        let (value, err) = gk15(&f, lo, hi);
        heap.push(Panel { a: lo, b: hi, value, err });
    }
    loop {
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= abs_tol {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::QuadratureNonConvergence {
                nodes: heap.len() * 15,
                last_change: err,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect further in floating point
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(&f, lo, hi);
            heap.push(Panel { a: lo, b: hi, value, err });
        }
    }
    // sum in position order so the result does not depend on heap layout
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let err = panels.iter().map(|p| p.err).sum();
    Ok((value, err))
}
