//! Standard normal distribution helpers.
//!
//! `phi` is the CDF and `psi = 1 - phi` the upper tail. Both go through
//! `erfc` so that tails keep full relative precision.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

#[inline]
pub fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

#[inline]
pub fn psi(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Gaussian mass of `[lo, hi]`, evaluated on the side of the tails that
/// avoids cancellation.
pub fn interval_mass(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        psi(lo) - psi(hi)
    } else if hi <= 0.0 {
        phi(hi) - phi(lo)
    } else {
        1.0 - psi(hi) - phi(lo)
    }
}

/// Standard normal density.
#[inline]
pub fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Mills' ratio `R(x) = e^{x^2/2} ∫_x^∞ e^{-t^2/2} dt`.
pub fn mills_ratio(x: f64) -> f64 {
    // psi(x) = R(x) e^{-x^2/2} / sqrt(2 pi); erfcx avoids overflow for large x
    (2.0 * PI).sqrt() * psi(x) * (0.5 * x * x).exp()
}

/// Lower bound `e^{-h^2/2} / (sqrt(2 pi) (h + 1))` on `psi(h)`, valid for `h >= 0`.
pub fn mills_tail_lower(h: f64) -> f64 {
    (-0.5 * h * h).exp() / ((2.0 * PI).sqrt() * (h + 1.0))
}
