use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the reduction from a finite source to Gaussian noise stability.
///
/// Tower-sized quantities are stored as iterated base-10 logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    /// Regularity threshold `γ = (1−ρ)ε / (100 m ln(m/ε))`.
    pub gamma: f64,
    /// `log10 κ_max`.
    pub log10_kappa_max: f64,
    /// `log10` of the number of variables that suffice.
    pub log10_n_vars: f64,
    /// `log10 log10` of the run-time bound `(5/ε)^{m p^{n_vars}}`, when representable.
    pub log10_log10_runtime: Option<f64>,
    /// One more logarithm of the same bound; always finite for valid inputs.
    pub log10_log10_log10_runtime: f64,
    /// `α = 1` collapses both exponents to zero.
    pub degenerate: bool,
    pub metadata: FormulaMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaMetadata {
    pub log_convention: String,
    pub gamma: String,
    pub log10_kappa_max: String,
    pub log10_n_vars: String,
    pub log10_log10_runtime: String,
}

impl Default for FormulaMetadata {
    fn default() -> Self {
        FormulaMetadata {
            log_convention: "natural logarithms inside the formulas; outputs in base 10".into(),
            gamma: "(1-rho)*eps/(100*m*ln(m/eps))".into(),
            log10_kappa_max: "[1800*m*ln(m/eps)*ln(1/alpha)/((1-rho)*eps)] * log10(eps/(100*2^m))".into(),
            log10_n_vars: "[3600*m*ln(m/eps)*ln(1/alpha)/((1-rho)*eps)] * log10(100*2^m/eps)".into(),
            log10_log10_runtime: "log10(m*log10(5/eps)) + 10^log10_n_vars * log10(p)".into(),
        }
    }
}

/// `log10(10^a + 10^b)` without overflow.
fn log10_sum(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + 10f64.powf(lo - hi)).log10()
}

pub fn reduction_params(m: usize, p: usize, epsilon: f64, rho: f64, alpha: f64) -> Result<ReductionParams> {
    if m < 2 {
        return Err(Error::param("m", "must be at least 2"));
    }
    if p < 1 {
        return Err(Error::param("p", "must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must lie in (0, 1)")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::param("rho", format!("{rho} must lie in [0, 1); maximal correlation 1 is excluded")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} must lie in (0, 1]")));
    }
    let mf = m as f64;
    let l = (mf / epsilon).ln();
    let gamma = (1.0 - rho) * epsilon / (100.0 * mf * l);
    let base = mf * l * (1.0 / alpha).ln() / ((1.0 - rho) * epsilon);
    let two_m = 2f64.powi(m as i32);
    let log10_kappa_max = 1800.0 * base * (epsilon / (100.0 * two_m)).log10();
    let log10_n_vars = 3600.0 * base * (100.0 * two_m / epsilon).log10();

    // log10 runtime = m log10(5/ε) · p^{n_vars}
    let lead = (mf * (5.0 / epsilon).log10()).log10();
    let log10_p = (p as f64).log10();
    let (ll, lll) = if p == 1 {
        (Some(lead), lead.log10())
    } else {
        let n_vars = 10f64.powf(log10_n_vars);
        let direct = lead + n_vars * log10_p;
        // log10(n_vars · log10 p) = log10_n_vars + log10(log10 p)
        let tower = log10_sum(lead.log10(), log10_n_vars + log10_p.log10());
        (direct.is_finite().then_some(direct), if lead > 0.0 { tower } else { direct.log10() })
    };
    Ok(ReductionParams {
        gamma,
        log10_kappa_max: log10_kappa_max + 0.0,
        log10_n_vars: log10_n_vars + 0.0,
        log10_log10_runtime: ll,
        log10_log10_log10_runtime: lll,
        degenerate: alpha == 1.0,
        metadata: FormulaMetadata::default(),
    })
}
