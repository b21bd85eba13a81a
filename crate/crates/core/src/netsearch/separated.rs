use crate::error::{Error, Result};
use crate::stability::{coeff_distance, hermite_coeffs, CellFunction, HermiteCoefficients};

/// Greedy maximal `ε`-separated subset of a stream, in the ℓ2 distance of Hermite tables
/// truncated at total degree `cap`.
///
/// A candidate is kept when it is at least `epsilon` from every kept one.
pub fn separated_set<I>(stream: I, cap: usize, epsilon: f64) -> Result<Vec<(CellFunction, HermiteCoefficients)>>
where
    I: IntoIterator<Item = CellFunction>,
{
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::param("separation", format!("{epsilon} must be nonnegative")));
    }
    let mut kept: Vec<(CellFunction, HermiteCoefficients)> = Vec::new();
    for f in stream {
        let h = hermite_coeffs(&f, cap)?;
        let mut far = true;
        for (_, other) in &kept {
            if coeff_distance(&h, other)? < epsilon {
                far = false;
                break;
            }
        }
        if far {
            kept.push((f, h));
        }
    }
    Ok(kept)
}
