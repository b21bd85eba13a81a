use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{normal_quantile, orthant, Correlation};

/// Range of `P(f = 1, g = 1)` over `{0,1}`-valued `f, g` with `E f = a`, `E g = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorellBounds {
    pub c_lo: f64,
    pub c_hi: f64,
}

impl BorellBounds {
    pub fn contains(&self, c: f64) -> bool {
        self.c_lo <= c && c <= self.c_hi
    }
}

/// Extremal values of the `(1,1)` entry of `C_ρ` for two-valued outputs with marginals `a`, `b`,
/// attained by parallel (or antiparallel) half-spaces.
pub fn borell_bounds(a: f64, b: f64, rho: Correlation) -> Result<BorellBounds> {
    for (what, v) in [("borell_bounds a", a), ("borell_bounds b", b)] {
        if v.is_nan() || v <= 0.0 || v >= 1.0 {
            return Err(Error::InvalidProbability { what, value: v });
        }
    }
    let (s, t) = (normal_quantile(a)?, normal_quantile(b)?);
    let r = rho.value();
    if r == 0.0 {
        return Ok(BorellBounds { c_lo: a * b, c_hi: a * b });
    }
    let aligned = orthant(s, t, r);
    let opposed = b - orthant(-s, t, r);
    let lo = aligned.min(opposed).max((a + b - 1.0).max(0.0));
    let hi = aligned.max(opposed).min(a.min(b));
    Ok(BorellBounds { c_lo: lo, c_hi: hi })
}
