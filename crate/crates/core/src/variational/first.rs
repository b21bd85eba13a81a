use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::label_masses;
use super::objective::{u_coefficients, QuadraticObjective, UCoefficients};
use super::partition::{PartitionGrid, Side};
use crate::error::{Error, Result};
use crate::gauss::Correlation;
use crate::stability::{DistributionMatrix, RectangleTable};

/// Spread of a field over one detected interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InterfaceResidual {
    Measured {
        /// `max − min` of the field over the interface samples.
        residual: f64,
        /// `max |field|` over the interface samples.
        stationarity: f64,
        samples: usize,
    },
    Empty(NotApplicable),
}

/// Serialized as the string `"N/A"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotApplicable {
    #[serde(rename = "N/A")]
    NotApplicable,
}

impl InterfaceResidual {
    pub fn residual(&self) -> Option<f64> {
        match self {
            InterfaceResidual::Measured { residual, .. } => Some(*residual),
            InterfaceResidual::Empty(_) => None,
        }
    }

    pub fn stationarity(&self) -> Option<f64> {
        match self {
            InterfaceResidual::Measured { stationarity, .. } => Some(*stationarity),
            InterfaceResidual::Empty(_) => None,
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            InterfaceResidual::Measured { samples, .. } => *samples,
            InterfaceResidual::Empty(_) => 0,
        }
    }

    fn from_samples(values: &[f64]) -> Self {
        if values.is_empty() {
            return InterfaceResidual::Empty(NotApplicable::NotApplicable);
        }
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let stationarity = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        InterfaceResidual::Measured { residual: max - min, stationarity, samples: values.len() }
    }
}

/// Residuals for one pair `i < j`: `T_ρ(Σ_k u′_ijk 1_{Ω′_k})` on `Σ_ij` and
/// `T_ρ(Σ_k u_ijk 1_{Ω_k})` on `Σ′_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub omega: InterfaceResidual,
    pub omega_prime: InterfaceResidual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstVariationReport {
    pub rho: f64,
    pub s: DistributionMatrix,
    pub pairs: Vec<PairResidual>,
}

impl FirstVariationReport {
    fn fold(&self, f: impl Fn(&InterfaceResidual) -> Option<f64>) -> Option<f64> {
        self.pairs.iter().flat_map(|p| [f(&p.omega), f(&p.omega_prime)]).flatten().reduce(f64::max)
    }

    /// Largest measured residual, `None` when no interface was detected.
    pub fn max_residual(&self) -> Option<f64> {
        self.fold(InterfaceResidual::residual)
    }

    pub fn max_stationarity(&self) -> Option<f64> {
        self.fold(InterfaceResidual::stationarity)
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairResidual> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }
}

pub(crate) fn check_parts(parts: &PartitionGrid, obj: &QuadraticObjective) -> Result<()> {
    if parts.m() != obj.m() {
        return Err(Error::DimensionMismatch { expected: obj.m(), found: parts.m() });
    }
    Ok(())
}

pub(crate) fn state(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective) -> Result<(DistributionMatrix, UCoefficients)> {
    check_parts(parts, obj)?;
    let (f, g) = parts.to_cell_functions();
    let s = RectangleTable::new(parts.grid(), parts.grid(), rho)?.crho(&f, &g)?;
    let u = u_coefficients(&s, obj)?;
    Ok((s, u))
}

/// Samples of the first-variation fields at the face midpoints of every interface.
pub fn first_variation_residual(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective) -> Result<FirstVariationReport> {
    if parts.grid().dimension() > 2 {
        return Err(Error::InvalidGrid(format!(
            "interface detection supports dimension 1 or 2, got {}",
            parts.grid().dimension()
        )));
    }
    let (s, u) = state(parts, rho, obj)?;
    let m = parts.m();
    let mut samples = vec![(Vec::new(), Vec::new()); m * m];
    for side in [Side::Omega, Side::OmegaPrime] {
        let other = match side {
            Side::Omega => parts.omega_prime(),
            Side::OmegaPrime => parts.omega(),
        };
        let values: Vec<(usize, usize, f64)> = parts
            .faces(side)
            .par_iter()
            .map(|face| {
                let (a, b, _) = face.pair();
                let coeffs = match side {
                    Side::Omega => u.u_prime_row(a, b),
                    Side::OmegaPrime => u.u_row(a, b),
                };
                let masses = label_masses(parts.grid(), other, m, rho, &face.point);
                (a, b, masses.iter().zip(coeffs).map(|(x, c)| x * c).sum())
            })
            .collect();
        for (a, b, v) in values {
            let slot = &mut samples[a * m + b];
            match side {
                Side::Omega => slot.0.push(v),
                Side::OmegaPrime => slot.1.push(v),
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let (on, off) = &samples[i * m + j];
            pairs.push(PairResidual {
                i,
                j,
                omega: InterfaceResidual::from_samples(on),
                omega_prime: InterfaceResidual::from_samples(off),
            });
        }
    }
    Ok(FirstVariationReport { rho: rho.value(), s, pairs })
}
