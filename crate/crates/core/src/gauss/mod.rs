//! Gaussian primitives: the normal distribution, Hermite polynomials,
//! Gauss quadrature, orthant probabilities, the Ornstein–Uhlenbeck operator
//! and the correlated kernel.

mod bvn;
mod hermite;
mod normal;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bvn::{bvn_orthant, bvn_orthant_raw};
pub(crate) use bvn::orthant;
pub use hermite::{hermite_1d, hermite_all, hermite_orthonormal, MultiIndex};
pub use normal::{normal_cdf, normal_quantile, std_cdf, std_pdf};
pub use quadrature::{gauss_hermite_1d, gauss_legendre_1d, quadrature_rule, QuadratureRule, DEFAULT_NODE_BUDGET};

/// A correlation coefficient strictly inside `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::InvalidCorrelation(rho));
        }
        Ok(Correlation(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    /// `√(1 − ρ²)`.
    pub fn sigma(self) -> f64 {
        (1.0 - self.0 * self.0).sqrt()
    }

    /// The value, rejecting zero for callers that divide by it.
    pub fn nonzero(self) -> Result<f64> {
        if self.0 == 0.0 {
            Err(Error::ZeroCorrelation)
        } else {
            Ok(self.0)
        }
    }
}

impl TryFrom<f64> for Correlation {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Correlation::new(v)
    }
}

impl From<Correlation> for f64 {
    fn from(c: Correlation) -> f64 {
        c.0
    }
}

/// Quadrature estimate of `T_ρ f(x) = E f(ρx + √(1−ρ²) Z)`.
pub fn ou_apply<F>(f: F, rho: Correlation, x: &[f64], rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if rule.dimension() != x.len() {
        return Err(Error::DimensionMismatch { expected: rule.dimension(), found: x.len() });
    }
    let (r, s) = (rho.value(), rho.sigma());
    let mut y = vec![0.0; x.len()];
    Ok(rule.integrate(|z| {
        for ((ya, &xa), &za) in y.iter_mut().zip(x).zip(z) {
            *ya = r * xa + s * za;
        }
        f(&y)
    }))
}

/// Joint density of a `ρ`-correlated pair `(x, y)` in `R^k × R^k`.
pub fn gauss_kernel(x: &[f64], y: &[f64], rho: Correlation) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    let k = x.len() as f64;
    let r = rho.value();
    let var = 1.0 - r * r;
    let mut ex = 0.0;
    let mut cross = 0.0;
    for (&xa, &ya) in x.iter().zip(y) {
        ex += xa * xa;
        let d = ya - r * xa;
        cross += d * d;
    }
    let log = -k * (2.0 * std::f64::consts::PI).ln() - 0.5 * k * var.ln() - 0.5 * ex - 0.5 * cross / var;
    Ok(log.exp())
}
