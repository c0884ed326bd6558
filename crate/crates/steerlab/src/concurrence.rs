//! Wootters concurrence, the Bell-diagonal closed form and the
//! volume/obesity bounds it obeys.

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ellipsoid::{obesity, volume, FOUR_PI_OVER_3};
use crate::qstate::{
    as_m4, dm4, is_physical_oracle, min_eigenvalue, pauli_compose, pauli_decompose, pauli_kron,
    C64, HermitianOperator, Party, PauliForm,
};
use crate::{Error, Result, TOL_PSD};

/// Rank-deficient eigenvalues below this are numerical noise; dropping the
/// corresponding factor columns keeps the λᵢ exact for rank-deficient states
/// instead of polluting them with √noise.
const RANK_FLOOR: f64 = 1e-13;

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, the λᵢ being the square
/// roots of the eigenvalues of ρρ̂ in non-increasing order with
/// ρ̂ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).
///
/// Computed through a factorization ρ = FF† (negative rounding clamped to
/// zero, noise-level eigenvalues truncated): the λᵢ are then the singular
/// values of the complex symmetric matrix Fᵀ(σ_y⊗σ_y)F, which stays accurate
/// for the rank-2 boundary states where the eigendecomposition of ρρ̂ loses
/// half the digits.
pub fn concurrence(rho: &HermitianOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let lambda_min = min_eigenvalue(rho);
    if lambda_min < -TOL_PSD {
        return Err(Error::UnphysicalInput(lambda_min));
    }
    let m = as_m4(rho);
    let eig = dm4(&m).symmetric_eigen();
    let mut columns = Vec::with_capacity(4);
    for i in 0..4 {
        let l = eig.eigenvalues[i];
        if l > RANK_FLOOR {
            columns.push(eig.eigenvectors.column(i) * Complex::from(l.sqrt()));
        }
    }
    let f = DMatrix::<C64>::from_columns(&columns);
    let g = f.transpose() * dm4(&pauli_kron(2, 2)) * &f;
    let mut lambdas = [0.0; 4];
    for (i, s) in g.singular_values().iter().enumerate() {
        lambdas[i] = *s;
    }
    lambdas.sort_by(|x, y| y.total_cmp(x));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Bell-diagonal state τ = (1/4)(1⊗1 + Σ tᵢ σᵢ⊗σᵢ), specified by its
/// correlation eigenvalues. Optionally carries the simplex weights it was
/// built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalSpec {
    pub t: Vector3<f64>,
    pub weights: Option<[f64; 4]>,
}

impl BellDiagonalSpec {
    pub fn new(t: Vector3<f64>) -> Self {
        Self { t, weights: None }
    }

    pub fn compose(&self) -> HermitianOperator {
        pauli_compose(&PauliForm {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: nalgebra::Matrix3::from_diagonal(&self.t),
        })
    }

    /// Physicality of the composed operator, decided by the oracle.
    pub fn is_physical(&self) -> bool {
        is_physical_oracle(&self.compose())
    }
}

/// Closed-form concurrence of a Bell-diagonal state. With s the sorted
/// magnitudes |t| and the signs rearranged to the proof convention
/// t₁ ≥ t₂ ≥ |t₃| (allowed moves: permutations and double sign flips), this
/// is `max(0, ½(t₁ + t₂ − t₃ − 1))`. Agrees with [`concurrence`].
pub fn bell_diagonal_concurrence(spec: &BellDiagonalSpec) -> Result<f64> {
    let rho = spec.compose();
    let lambda_min = min_eigenvalue(&rho);
    if lambda_min < -TOL_PSD {
        return Err(Error::UnphysicalInput(lambda_min));
    }
    let mut s = [spec.t[0].abs(), spec.t[1].abs(), spec.t[2].abs()];
    s.sort_by(|x, y| y.total_cmp(x));
    let product = spec.t[0] * spec.t[1] * spec.t[2];
    let value = if product < 0.0 {
        // odd sign pattern: representative (s₁, s₂, −s₃)
        0.5 * (s[0] + s[1] + s[2] - 1.0)
    } else {
        // even or degenerate: representative (s₁, s₂, s₃)
        0.5 * (s[0] + s[1] - s[2] - 1.0)
    };
    Ok(value.max(0.0))
}

/// Decompose tetrahedron coordinates through the simplex with vertices
/// r₀=(1,1,1), r₁=(1,0,0), r₂=(0,1,0), r₃=(0,0,1): the weights give
/// s = (p₀+p₁, p₀+p₂, p₀+p₃), mapped to the entangled-sign convention
/// t = (s₁, s₂, −s₃). The resulting state has concurrence exactly p₀ and
/// obeys √(s₁s₂s₃) ≥ p₀.
pub fn simplex_to_bell_diagonal(p: [f64; 4]) -> Result<BellDiagonalSpec> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&w| w < -1e-12) || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights);
    }
    let s = Vector3::new(p[0] + p[1], p[0] + p[2], p[0] + p[3]);
    Ok(BellDiagonalSpec {
        t: Vector3::new(s[0], s[1], -s[2]),
        weights: Some(p),
    })
}

/// Concurrence bounds from the steering-ellipsoid volume and the obesity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceBounds {
    pub concurrence: f64,
    /// γ_b⁻¹ (3V/4π)^{1/4} with V the volume of Alice's ellipsoid.
    pub volume_bound: f64,
    /// Ω(ρ) = |det Θ|^{1/4} ≥ C(ρ), party-symmetric.
    pub obesity: f64,
    /// volume_bound − concurrence; never below −1e-9 for physical states.
    pub slack: f64,
    pub saturated: bool,
}

impl ConcurrenceBounds {
    pub fn schema(&self) -> ConcurrenceJson {
        ConcurrenceJson {
            concurrence: self.concurrence,
            volume_bound: self.volume_bound,
            obesity: self.obesity,
            saturated: self.saturated,
        }
    }
}

/// JSON form used in the CLI `analyze` report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcurrenceJson {
    pub concurrence: f64,
    pub volume_bound: f64,
    pub obesity: f64,
    pub saturated: bool,
}

/// Evaluate C(ρ) ≤ γ_b⁻¹(3V/4π)^{1/4} and C(ρ) ≤ Ω(ρ).
pub fn concurrence_volume_bound(rho: &HermitianOperator) -> Result<ConcurrenceBounds> {
    let pf = pauli_decompose(rho)?;
    let v = volume(&pf, Party::A)?;
    let c = concurrence(rho)?;
    let gamma_b_inv = (1.0 - pf.b.norm_squared()).max(0.0).sqrt();
    let bound = gamma_b_inv * (v / FOUR_PI_OVER_3).powf(0.25);
    let slack = bound - c;
    Ok(ConcurrenceBounds {
        concurrence: c,
        volume_bound: bound,
        obesity: obesity(&pf),
        slack,
        saturated: slack.abs() <= 1e-9,
    })
}

/// √(1−c): the largest concurrence any state with ellipsoid centre magnitude
/// c can have, attained by the canonical maximal-volume state.
pub fn max_concurrence_for_centre(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::BadRange {
            name: "c",
            value: c,
            range: "[0, 1]",
        });
    }
    Ok((1.0 - c).sqrt())
}
