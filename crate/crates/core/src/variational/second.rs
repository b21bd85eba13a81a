use serde::{Deserialize, Serialize};

use super::field::{field, field_slope, label_mass_derivatives, label_masses};
use super::first::state;
use super::objective::QuadraticObjective;
use super::partition::{Face, PartitionGrid, Side};
use super::search::is_local_minimum;
use crate::error::{Error, Result};
use crate::gauss::{gauss_kernel, std_pdf, Correlation};

/// Second variation of the objective under the translation `Ω + sv`, `Ω′ + sign(ρ)sv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationSecondVariation {
    /// `½ d²/ds²` at `s = 0` for the given partitions, exact up to quadrature.
    pub general: f64,
    /// `(1 − 1/|ρ|) Σ |⟨v,N⟩|² ‖∇T_ρ(Σ u 1_Ω)‖ γ + Σ d_ij [..]²`, the form valid at minimizers.
    pub gradient_form: f64,
    /// The squared first-order term `Σ_ij d_ij [∂_s s_ij]²` shared by both.
    pub squared_term: f64,
}

fn one_dimensional(parts: &PartitionGrid, v: f64) -> Result<()> {
    if parts.grid().dimension() != 1 {
        return Err(Error::InvalidGrid(format!(
            "translation formulas need dimension 1, got {}",
            parts.grid().dimension()
        )));
    }
    if !(v.is_finite() && v != 0.0) {
        return Err(Error::param("v", "direction must be finite and nonzero"));
    }
    Ok(())
}

// exterior normals of the two labels meeting at a 1-D face
fn sides(face: &Face) -> [(usize, f64); 2] {
    [(face.lo, 1.0), (face.hi, -1.0)]
}

pub fn translation_second_variation(
    parts: &PartitionGrid,
    rho: Correlation,
    obj: &QuadraticObjective,
    v: f64,
) -> Result<TranslationSecondVariation> {
    one_dimensional(parts, v)?;
    let r = rho.nonzero()?;
    let (s, u) = state(parts, rho, obj)?;
    let m = parts.m();
    let grid = parts.grid();
    let e = obj.residuals(s.entries());
    let w = r.signum() * v;
    let faces = parts.faces(Side::Omega);
    let faces_p = parts.faces(Side::OmegaPrime);

    let mut curvature = 0.0;
    let mut first = vec![0.0; m * m];
    for f in &faces {
        let p = f.point[0];
        let t = label_masses(grid, parts.omega_prime(), m, rho, &f.point);
        let dt = label_mass_derivatives(grid, parts.omega_prime(), m, rho, p);
        let g = std_pdf(p);
        for (i, n) in sides(f) {
            for j in 0..m {
                curvature += e[i * m + j] * v * v * n * g * (dt[j] - p * t[j]);
                first[i * m + j] += v * n * g * t[j];
            }
        }
    }
    for f in &faces_p {
        let q = f.point[0];
        let t = label_masses(grid, parts.omega(), m, rho, &f.point);
        let dt = label_mass_derivatives(grid, parts.omega(), m, rho, q);
        let g = std_pdf(q);
        for (j, n) in sides(f) {
            for i in 0..m {
                curvature += e[i * m + j] * w * w * n * g * (dt[i] - q * t[i]);
                first[i * m + j] += w * n * g * t[i];
            }
        }
    }
    let mut cross = 0.0;
    for f in &faces {
        for fp in &faces_p {
            let k = gauss_kernel(&f.point, &fp.point, rho)?;
            for (i, n) in sides(f) {
                for (j, np) in sides(fp) {
                    cross += 2.0 * v * w * e[i * m + j] * n * np * k;
                }
            }
        }
    }
    let squared_term: f64 = (0..m * m).map(|ij| obj.d(ij / m, ij % m) * first[ij] * first[ij]).sum();

    let mut gradient_sum = 0.0;
    for f in &faces {
        let (a, b, _) = f.pair();
        let slope = field_slope(grid, parts.omega_prime(), u.u_prime_row(a, b), rho, f.point[0]);
        gradient_sum += v * v * slope.abs() * std_pdf(f.point[0]);
    }
    for f in &faces_p {
        let (a, b, _) = f.pair();
        let slope = field_slope(grid, parts.omega(), u.u_row(a, b), rho, f.point[0]);
        gradient_sum += v * v * slope.abs() * std_pdf(f.point[0]);
    }
    let gradient_form = (1.0 - 1.0 / r.abs()) * gradient_sum + squared_term;
    Ok(TranslationSecondVariation { general: curvature + cross + squared_term, gradient_form, squared_term })
}

/// Largest `|S_ij(⟨v,N⟩) + ⟨v,N′_ij⟩ ρ⁻¹ ‖∇T_ρ(Σ_k u_ijk 1_{Ω_k})‖|` over `Σ′_ij`, together with
/// the primed analogue over `Σ_ij`.
///
/// Fails with [`Error::Precondition`] unless the partitions are a grid local minimum, meaning
/// no single-cell relabeling lowers the objective.
pub fn translation_eigen_identity_check(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective, v: f64) -> Result<f64> {
    eigen_check(parts, rho, obj, v, None)
}

/// As [`translation_eigen_identity_check`], with the precondition replaced by
/// `|field| ≤ tolerance` at every interface sample.
pub fn translation_eigen_identity_check_with_tolerance(
    parts: &PartitionGrid,
    rho: Correlation,
    obj: &QuadraticObjective,
    v: f64,
    tolerance: f64,
) -> Result<f64> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::param("tolerance", "must be nonnegative"));
    }
    eigen_check(parts, rho, obj, v, Some(tolerance))
}

fn eigen_check(parts: &PartitionGrid, rho: Correlation, obj: &QuadraticObjective, v: f64, tol: Option<f64>) -> Result<f64> {
    one_dimensional(parts, v)?;
    let r = rho.nonzero()?;
    let (_, u) = state(parts, rho, obj)?;
    if tol.is_none() && !is_local_minimum(parts, rho, obj)? {
        return Err(Error::Precondition("partitions are not a grid local minimum".into()));
    }
    let grid = parts.grid();
    let sigma2 = 1.0 - r * r;
    let norm = (2.0 * std::f64::consts::PI * sigma2).powf(-0.5);
    let mut worst = 0.0f64;
    for side in [Side::OmegaPrime, Side::Omega] {
        let (here, there) = match side {
            Side::OmegaPrime => (parts.faces(Side::OmegaPrime), parts.faces(Side::Omega)),
            Side::Omega => (parts.faces(Side::Omega), parts.faces(Side::OmegaPrime)),
        };
        let other_labels = match side {
            Side::OmegaPrime => parts.omega(),
            Side::Omega => parts.omega_prime(),
        };
        for f in &here {
            let (a, b, n_ab) = f.pair();
            let coeffs = match side {
                Side::OmegaPrime => u.u_row(a, b),
                Side::Omega => u.u_prime_row(a, b),
            };
            let x = f.point[0];
            if let Some(limit) = tol {
                let value = field(grid, other_labels, coeffs, rho, &f.point);
                if value.abs() > limit {
                    return Err(Error::Precondition(format!(
                        "interface field {value:.3e} at x = {x} for pair ({a}, {b}) exceeds the tolerance {limit:.3e}"
                    )));
                }
            }
            let mut left = 0.0;
            for p in &there {
                let y = p.point[0];
                let kernel = (-(y - r * x).powi(2) / (2.0 * sigma2)).exp();
                for (k, n) in sides(p) {
                    left += coeffs[k] * v * n * kernel;
                }
            }
            left *= norm;
            let right = -v * n_ab / r * field_slope(grid, other_labels, coeffs, rho, x).abs();
            worst = worst.max((left - right).abs());
        }
    }
    Ok(worst)
}
