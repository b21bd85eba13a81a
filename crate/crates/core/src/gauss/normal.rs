//! Standard normal density, distribution function and quantile.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn std_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF without input checks; infinities map to their limits.
#[inline]
pub fn std_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Φ(x), rejecting non-finite input.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("normal_cdf argument"));
    }
    Ok(std_cdf(x))
}

/// Φ⁻¹(p) for 0 < p < 1.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::InvalidProbability { what: "normal_quantile (needs 0 < p < 1)", value: p });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        // 1 - p is exact here
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

// Quantile for p < 0.5: Newton on ln Φ(x) = ln p from a Mills-ratio start, guarded by a bracket.
fn lower_quantile(p: f64) -> f64 {
    let lp = p.ln();
    let t = (-2.0 * lp).sqrt();
    // p ≈ φ(x)/|x| as x → -∞
    let mut x = -t;
    for _ in 0..4 {
        let inner = -2.0 * (p * x.abs().max(1.0) * (2.0 * PI).sqrt()).ln();
        x = -inner.max(0.0).sqrt();
    }
    let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
    x = x.clamp(lo, hi);
    for _ in 0..200 {
        let c = std_cdf(x);
        let g = c.ln() - lp;
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if g == 0.0 {
            break;
        }
        // d/dx ln Φ = φ/Φ
        let slope = (-0.5 * x * x - 0.5 * (2.0 * PI).ln() - c.ln()).exp();
        let mut next = x - g / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}
