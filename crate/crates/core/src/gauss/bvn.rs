//! Bivariate normal orthant probabilities.

use super::normal::{std_cdf, std_pdf};
use super::quadrature::composite_legendre;
use super::Correlation;
use crate::error::{Error, Result};

const LOWER_CUTOFF: f64 = -8.0;
const UPPER_CUTOFF: f64 = 9.0;

/// `P(X ≤ s, Y ≤ t)` for standard normals with correlation `rho`.
/// `±∞` are accepted for `s` and `t`.
pub fn bvn_orthant(s: f64, t: f64, rho: Correlation) -> Result<f64> {
    if s.is_nan() || t.is_nan() {
        return Err(Error::NonFinite("bvn_orthant limits"));
    }
    Ok(orthant(s, t, rho.value()))
}

/// Same as [`bvn_orthant`] for a raw correlation; fails on `|rho| ≥ 1`.
pub fn bvn_orthant_raw(s: f64, t: f64, rho: f64) -> Result<f64> {
    bvn_orthant(s, t, Correlation::new(rho)?)
}

pub(crate) fn orthant(s: f64, t: f64, rho: f64) -> f64 {
    if s == f64::NEG_INFINITY || t == f64::NEG_INFINITY {
        return 0.0;
    }
    if s == f64::INFINITY {
        return std_cdf(t);
    }
    if t == f64::INFINITY {
        return std_cdf(s);
    }
    let (ps, pt) = (std_cdf(s), std_cdf(t));
    let lo = (ps + pt - 1.0).max(0.0);
    let hi = ps.min(pt);
    if rho == 0.0 {
        return (ps * pt).max(lo).min(hi);
    }
    // symmetric in (s, t): integrate over the smaller limit
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    let sigma = (1.0 - rho * rho).sqrt();
    let lower = if s > LOWER_CUTOFF { LOWER_CUTOFF } else { s - 8.0 };
    let upper = s.min(UPPER_CUTOFF);
    let width = (2.0 * sigma / rho.abs()).clamp(0.01, 0.5);
    let integrand = |x: f64| std_pdf(x) * std_cdf((t - rho * x) / sigma);
    let kink = t / rho;
    let raw = if kink > lower && kink < upper {
        composite_legendre(lower, kink, width, integrand) + composite_legendre(kink, upper, width, integrand)
    } else {
        composite_legendre(lower, upper, width, integrand)
    };
    let raw = if upper < s { raw + (std_cdf(s) - std_cdf(upper)) } else { raw };
    raw.max(lo).min(hi)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels() {
        let r = Correlation::new(0.3).unwrap();
        assert_eq!(bvn_orthant(f64::NEG_INFINITY, 1.0, r).unwrap(), 0.0);
        assert_eq!(bvn_orthant(1.0, f64::NEG_INFINITY, r).unwrap(), 0.0);
        assert_eq!(bvn_orthant(f64::INFINITY, 0.0, r).unwrap(), 0.5);
        assert_eq!(bvn_orthant(0.0, f64::INFINITY, r).unwrap(), 0.5);
        assert!(bvn_orthant(f64::NAN, 0.0, r).is_err());
    }

    #[test]
    fn sheppard_formula() {
        for &rho in &[-0.95, -0.6, -0.2, 0.1, 0.5, 0.8, 0.99] {
            let want = 0.25 + f64::asin(rho) / (2.0 * std::f64::consts::PI);
            let got = orthant(0.0, 0.0, rho);
            assert!((got - want).abs() < 1e-12, "rho {rho}: {got} vs {want}");
        }
    }

    #[test]
    fn rejects_unit_correlation() {
        assert!(bvn_orthant_raw(0.0, 0.0, 1.0).is_err());
        assert!(bvn_orthant_raw(0.0, 0.0, -1.0).is_err());
    }
}
