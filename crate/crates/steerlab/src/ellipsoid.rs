//! Steering-ellipsoid construction and characterization.
//!
//! Alice's steering ellipsoid is the set of Bloch vectors she can be
//! collapsed to by measurements on Bob's qubit. It is described by its
//! centre `c = γ_b²(a − T b)`, the symmetric PSD matrix
//! `Q = γ_b²(T − a bᵀ)(1 + γ_b² b bᵀ)(Tᵀ − b aᵀ)` whose eigenvalues are the
//! squared semiaxes, and a chirality `χ = sign(det T̃)` inherited from the
//! canonical state. Bob's ellipsoid swaps `a ↔ b` and `T ↔ Tᵀ`.

use nalgebra::{Matrix2, Matrix3, Rotation3, UnitQuaternion, Vector3};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qstate::{
    as_m2, as_m4, dm4, partial_trace, pauli_decompose, C64, HermitianOperator, Party, PauliForm,
};
use crate::{Error, Result, TOL_DET};

/// Volume of the unit ball, 4π/3.
pub const FOUR_PI_OVER_3: f64 = 4.0 * std::f64::consts::PI / 3.0;

/// Reduced states with an eigenvalue at or below this cannot be inverted by
/// the canonical filter; regularizing instead would corrupt the invariance
/// tests, so we refuse.
pub(crate) const MARGINAL_FLOOR: f64 = 1e-12;

/// A steering ellipsoid: centre, shape matrix, chirality and the steered
/// party.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub centre: Vector3<f64>,
    pub q: Matrix3<f64>,
    pub chirality: i8,
    pub party: Party,
}

impl Ellipsoid {
    /// Validates that `q` is symmetric (within 1e-12) with eigenvalues
    /// ≥ -1e-12 and that `chirality` is one of -1, 0, +1.
    pub fn new(
        centre: Vector3<f64>,
        q: Matrix3<f64>,
        chirality: i8,
        party: Party,
    ) -> Result<Self> {
        let asym = (q - q.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::BadEllipsoid(format!("asymmetry {asym:.3e}")));
        }
        let lambda_min = q.symmetric_eigen().eigenvalues.min();
        if lambda_min < -1e-12 {
            return Err(Error::BadEllipsoid(format!(
                "negative eigenvalue {lambda_min:.3e}"
            )));
        }
        if !matches!(chirality, -1 | 0 | 1) {
            return Err(Error::BadEllipsoid(format!("chirality {chirality}")));
        }
        Ok(Self {
            centre,
            q,
            chirality,
            party,
        })
    }

    /// Semiaxes s_i = √(eigenvalue_i of Q), descending. Eigenvalues in
    /// [-1e-12, 0) are numerical noise and clamp to zero.
    pub fn semiaxes(&self) -> Vector3<f64> {
        let mut vals: Vec<f64> = self
            .q
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        vals.sort_by(|x, y| y.total_cmp(x));
        Vector3::new(vals[0], vals[1], vals[2])
    }

    /// Semiaxes (descending) together with the matching unit axis directions
    /// as matrix columns.
    pub fn axes(&self) -> (Vector3<f64>, Matrix3<f64>) {
        let eig = self.q.symmetric_eigen();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mut s = Vector3::zeros();
        let mut axes = Matrix3::zeros();
        for (k, &i) in order.iter().enumerate() {
            s[k] = eig.eigenvalues[i].max(0.0).sqrt();
            axes.set_column(k, &eig.eigenvectors.column(i).into_owned());
        }
        (s, axes)
    }

    /// V = (4π/3)·s₁s₂s₃ = (4π/3)·√(det Q).
    pub fn volume(&self) -> f64 {
        FOUR_PI_OVER_3 * self.q.determinant().max(0.0).sqrt()
    }

    /// Maximum of the support function h(n̂) = c·n̂ + √(n̂ᵀQn̂) over the unit
    /// sphere, which equals the farthest distance from the origin to the
    /// ellipsoid surface. The ellipsoid fits inside the Bloch sphere iff
    /// this is ≤ 1.
    ///
    /// Solved exactly: maximizing |c + √Q u| over |u| = 1 gives the secular
    /// equation Σ dᵢ²/(μ − λᵢ)² = 1 with dᵢ the components of √Q·c in the
    /// eigenbasis of Q, plus the standard degenerate branch when √Q·c has no
    /// component along the top eigenspace.
    pub fn support_max(&self) -> f64 {
        let eig = self.q.symmetric_eigen();
        let lambda = eig.eigenvalues.map(|l| l.max(0.0));
        let c_tilde = eig.eigenvectors.transpose() * self.centre;
        let d = Vector3::new(
            lambda[0].sqrt() * c_tilde[0],
            lambda[1].sqrt() * c_tilde[1],
            lambda[2].sqrt() * c_tilde[2],
        );
        let lambda_max = lambda.max();
        let norm_from = |u: &Vector3<f64>| {
            let mut total = 0.0;
            for i in 0..3 {
                let x = c_tilde[i] + lambda[i].sqrt() * u[i];
                total += x * x;
            }
            total.sqrt()
        };
        // φ(μ) = Σ dᵢ²/(μ − λᵢ)², decreasing on (λ_max, ∞).
        let phi = |mu: f64| -> f64 {
            let mut s = 0.0;
            for i in 0..3 {
                let den = mu - lambda[i];
                s += d[i] * d[i] / (den * den);
            }
            s
        };
        let top = |i: usize| lambda[i] >= lambda_max - 1e-14 * lambda_max.max(1.0);
        let d_top_sq: f64 = (0..3).filter(|&i| top(i)).map(|i| d[i] * d[i]).sum();
        if d_top_sq <= 1e-300 {
            // Degenerate branch: fill the unit budget with whatever the
            // non-top components need, put the rest on a top eigenvector.
            let mut u = Vector3::zeros();
            let mut used = 0.0;
            if lambda_max > 1e-300 {
                for i in 0..3 {
                    if !top(i) {
                        u[i] = d[i] / (lambda_max - lambda[i]);
                        used += u[i] * u[i];
                    }
                }
            }
            if used > 1.0 {
                // Interior-style fallback; only reachable with λ_max = 0.
                return self.centre.norm();
            }
            let slack = (1.0 - used).sqrt();
            let k = (0..3).find(|&i| top(i)).unwrap_or(2);
            u[k] = slack;
            let with_plus = norm_from(&u);
            u[k] = -slack;
            norm_from(&u).max(with_plus)
        } else {
            let mut lo = lambda_max;
            let mut hi = lambda_max + d.norm() + 1.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if phi(mid) > 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mu = 0.5 * (lo + hi);
            let mut u = Vector3::zeros();
            for i in 0..3 {
                u[i] = d[i] / (mu - lambda[i]);
            }
            if u.norm() > 1e-300 {
                u = u.normalize();
            }
            norm_from(&u)
        }
    }

    /// Serialization shape used by the CLI.
    pub fn schema(&self) -> EllipsoidJson {
        let s = self.semiaxes();
        let mut q = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                q[i][j] = self.q[(i, j)];
            }
        }
        EllipsoidJson {
            centre: [self.centre[0], self.centre[1], self.centre[2]],
            q,
            chirality: self.chirality,
            semiaxes: [s[0], s[1], s[2]],
            volume: self.volume(),
        }
    }
}

/// JSON form of an [`Ellipsoid`]:
/// `{"centre":[…],"Q":[[…]×3],"chirality":-1|0|1,"semiaxes":[…],"volume":v}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EllipsoidJson {
    pub centre: [f64; 3],
    #[serde(rename = "Q")]
    pub q: [[f64; 3]; 3],
    pub chirality: i8,
    pub semiaxes: [f64; 3],
    pub volume: f64,
}

/// Signed singular values of T̃, ordered |t₁| ≥ |t₂| ≥ |t₃| with t₁, t₂ ≥ 0
/// and sign(det T̃) carried by t₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedSemiaxes {
    pub t: Vector3<f64>,
}

impl SignedSemiaxes {
    /// |t_i| in the stored order.
    pub fn semiaxes(&self) -> Vector3<f64> {
        self.t.abs()
    }

    pub fn chirality(&self) -> i8 {
        let product = self.t[0] * self.t[1] * self.t[2];
        if product.abs() < TOL_DET {
            0
        } else if product > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Chirality χ = sign(det T̃) of a correlation matrix, with |det| < 1e-12
/// treated as degenerate (χ = 0).
pub fn chirality(t: &Matrix3<f64>) -> i8 {
    let det = t.determinant();
    if det.abs() < TOL_DET {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

/// Construct the steering ellipsoid of the given party. The chirality is
/// that of the canonical state, computed via det T̃ = γ⁴ det Θ.
pub fn steering_ellipsoid(pf: &PauliForm, steered: Party) -> Result<Ellipsoid> {
    let (a, b, t) = match steered {
        Party::A => (pf.a, pf.b, pf.t),
        Party::B => (pf.b, pf.a, pf.t.transpose()),
    };
    let b_sq = b.norm_squared();
    if 1.0 - b_sq <= MARGINAL_FLOOR {
        return Err(Error::SteererPure);
    }
    let gamma_sq = 1.0 / (1.0 - b_sq);
    let centre = gamma_sq * (a - t * b);
    let left = t - a * b.transpose();
    let middle = Matrix3::identity() + gamma_sq * b * b.transpose();
    let q_raw = gamma_sq * left * middle * left.transpose();
    let q = 0.5 * (q_raw + q_raw.transpose());
    let det_t_tilde = gamma_sq * gamma_sq * pf.theta().determinant();
    let chi = if det_t_tilde.abs() < TOL_DET {
        0
    } else if det_t_tilde > 0.0 {
        1
    } else {
        -1
    };
    Ellipsoid::new(centre, q, chi, steered)
}

/// √M for a 2×2 Hermitian PSD matrix (negative rounding clamped to zero).
pub(crate) fn sqrt_psd_2x2(m: &Matrix2<C64>) -> Matrix2<C64> {
    hermitian_2x2_map(m, |l| l.max(0.0).sqrt())
}

fn hermitian_2x2_map(m: &Matrix2<C64>, f: impl Fn(f64) -> f64) -> Matrix2<C64> {
    let eig = m.clone().symmetric_eigen();
    let v = eig.eigenvectors;
    let d = Matrix2::from_diagonal(&eig.eigenvalues.map(|l| Complex::from(f(l))));
    v * d * v.adjoint()
}

/// Bob's local filter `ρ̃ = (1 ⊗ (2ρ_B)^{-1/2}) ρ (1 ⊗ (2ρ_B)^{-1/2})`,
/// which sets b̃ = 0 and ã = c_A while leaving Alice's ellipsoid invariant.
pub fn canonicalize(rho: &HermitianOperator) -> Result<HermitianOperator> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let rho_b = as_m2(&partial_trace(rho, &[1])?);
    let eig = rho_b.symmetric_eigen();
    if eig.eigenvalues.min() <= MARGINAL_FLOOR {
        return Err(Error::SingularMarginal);
    }
    let x = hermitian_2x2_map(&rho_b, |l| 1.0 / (2.0 * l).sqrt());
    let filter = Matrix2::<C64>::identity().kronecker(&x);
    let mut out = filter * as_m4(rho) * filter.adjoint();
    // Unit trace holds analytically; renormalize away the conjugation
    // roundoff so near-singular marginals stay in contract.
    let tr = out.trace();
    out /= Complex::from(tr.re);
    Ok(HermitianOperator::from_validated(dm4(&out)))
}

/// Rotate a canonical state so T̃ becomes diag(t) via a signed singular value
/// decomposition with proper rotations on both sides. Returns the aligned
/// state and the signed semiaxes; the spectrum is untouched (the rotations
/// are local unitaries) and t₁t₂t₃ is preserved.
pub fn align(rho_canonical: &HermitianOperator) -> Result<(HermitianOperator, SignedSemiaxes)> {
    let pf = pauli_decompose(rho_canonical)?;
    let b_norm = pf.b.norm();
    if b_norm > 1e-8 {
        return Err(Error::NotCanonical(b_norm));
    }
    let svd = pf.t.svd(true, true);
    let u = svd.u.expect("3x3 SVD with vectors requested");
    let v = svd.v_t.expect("3x3 SVD with vectors requested").transpose();
    let du = u.determinant().signum();
    let dv = v.determinant().signum();
    let sv = svd.singular_values;
    let t = Vector3::new(sv[0], sv[1], sv[2] * du * dv);
    // O_A = (U D_U)ᵀ and O_B = (V D_V)ᵀ are proper and give O_A T O_Bᵀ = diag(t).
    let mut u_fix = u;
    u_fix.set_column(2, &(u.column(2) * du));
    let mut v_fix = v;
    v_fix.set_column(2, &(v.column(2) * dv));
    let o_a = u_fix.transpose();
    let o_b = v_fix.transpose();
    let rot = su2_from_so3(&o_a).kronecker(&su2_from_so3(&o_b));
    let aligned = rot * as_m4(rho_canonical) * rot.adjoint();
    Ok((
        HermitianOperator::from_validated(dm4(&aligned)),
        SignedSemiaxes { t },
    ))
}

/// SU(2) element inducing the given proper rotation on Bloch vectors:
/// U(v·σ)U† = (Rv)·σ.
pub(crate) fn su2_from_so3(r: &Matrix3<f64>) -> Matrix2<C64> {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    Matrix2::new(
        C64::new(w, -z),
        C64::new(-y, -x),
        C64::new(y, -x),
        C64::new(w, z),
    )
}

/// Ellipsoid volume straight from the Pauli data:
/// V = (4π/3)·γ⁴·|det Θ| with γ the steerer's Lorentz factor.
pub fn volume(pf: &PauliForm, steered: Party) -> Result<f64> {
    let b_sq = match steered {
        Party::A => pf.b.norm_squared(),
        Party::B => pf.a.norm_squared(),
    };
    if 1.0 - b_sq <= MARGINAL_FLOOR {
        return Err(Error::SteererPure);
    }
    let gamma_sq = 1.0 / (1.0 - b_sq);
    Ok(FOUR_PI_OVER_3 * gamma_sq * gamma_sq * pf.theta().determinant().abs())
}

/// Obesity Ω = |det Θ|^{1/4}. Swapping parties transposes Θ; evaluating the
/// determinant on both orientations and averaging makes the value exactly
/// party-symmetric in floating point.
pub fn obesity(pf: &PauliForm) -> f64 {
    let theta = pf.theta();
    let det = 0.5 * (theta.determinant() + theta.transpose().determinant());
    det.abs().powf(0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{pauli, pauli_compose, sample_state, split_seed, Sample, SampleKind};
    use nalgebra::Matrix4;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;

    fn werner_pf(p: f64) -> PauliForm {
        PauliForm {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: -Matrix3::identity() * p,
        }
    }

    fn max_volume_pf(c: f64) -> PauliForm {
        let s = (1.0 - c).sqrt();
        PauliForm {
            a: Vector3::new(0.0, 0.0, c),
            b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(s, s, c - 1.0)),
        }
    }

    fn random_mixed(seed: u64) -> HermitianOperator {
        match sample_state(seed, SampleKind::Mixed4 { rank: 4 }).unwrap() {
            Sample::Operator(op) => op,
            _ => unreachable!(),
        }
    }

    #[test]
    fn werner_sphere() {
        for p in [0.0, 0.4, 1.0] {
            let e = steering_ellipsoid(&werner_pf(p), Party::A).unwrap();
            assert!(e.centre.norm() < 1e-14);
            assert_abs_diff_eq!(e.q, Matrix3::identity() * p * p, epsilon = 1e-14);
            assert_eq!(e.chirality, if p == 0.0 { 0 } else { -1 });
        }
    }

    #[test]
    fn product_state_is_a_point() {
        let a = Vector3::new(0.3, -0.1, 0.5);
        let b = Vector3::new(-0.2, 0.4, 0.1);
        let pf = PauliForm {
            a,
            b,
            t: a * b.transpose(),
        };
        for party in [Party::A, Party::B] {
            let e = steering_ellipsoid(&pf, party).unwrap();
            let expect = match party {
                Party::A => a,
                Party::B => b,
            };
            assert_abs_diff_eq!(e.centre, expect, epsilon = 1e-12);
            assert!(e.q.abs().max() < 1e-12);
            assert_eq!(e.chirality, 0);
            assert_abs_diff_eq!(e.volume(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn steerer_pure_is_rejected() {
        let pf = PauliForm {
            a: Vector3::zeros(),
            b: Vector3::new(0.0, 0.0, 1.0),
            t: Matrix3::zeros(),
        };
        assert!(matches!(
            steering_ellipsoid(&pf, Party::A),
            Err(Error::SteererPure)
        ));
        // Bob's ellipsoid only needs |a| < 1.
        assert!(steering_ellipsoid(&pf, Party::B).is_ok());
    }

    #[test]
    fn canonical_input_is_a_fixed_point() {
        let rho = pauli_compose(&max_volume_pf(0.4));
        let tilde = canonicalize(&rho).unwrap();
        assert!(tilde.max_abs_diff(&rho) < 1e-12);
    }

    #[test]
    fn canonicalize_rejects_pure_marginal() {
        // |0⟩⟨0| ⊗ |0⟩⟨0|
        let mut m = Matrix4::<C64>::zeros();
        m[(0, 0)] = C64::from(1.0);
        let rho = HermitianOperator::new(dm4(&m)).unwrap();
        assert!(matches!(canonicalize(&rho), Err(Error::SingularMarginal)));
    }

    #[test]
    fn canonicalize_sets_b_to_zero_and_a_to_centre() {
        for i in 0..50 {
            let rho = random_mixed(split_seed(11, i));
            let e = steering_ellipsoid(&pauli_decompose(&rho).unwrap(), Party::A).unwrap();
            let tilde = canonicalize(&rho).unwrap();
            let pf = pauli_decompose(&tilde).unwrap();
            assert!(pf.b.norm() < 1e-10);
            assert!((pf.a - e.centre).norm() < 1e-10);
        }
    }

    #[test]
    fn ellipsoid_invariant_under_canonical_filter() {
        for i in 0..50 {
            let rho = random_mixed(split_seed(12, i));
            let before = steering_ellipsoid(&pauli_decompose(&rho).unwrap(), Party::A).unwrap();
            let tilde = canonicalize(&rho).unwrap();
            let after = steering_ellipsoid(&pauli_decompose(&tilde).unwrap(), Party::A).unwrap();
            assert!((before.centre - after.centre).norm() < 1e-10);
            assert!((before.q - after.q).abs().max() < 1e-10);
            assert_eq!(before.chirality, after.chirality);
        }
    }

    #[test]
    fn su2_convention_matches_rotation_action() {
        let r = Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vector3::new(1.0, -2.0, 0.5)),
            0.83,
        );
        let u = su2_from_so3(r.matrix());
        // U σ_j U† = Σ_i R_ij σ_i
        for j in 0..3 {
            let lhs = u * pauli(j + 1) * u.adjoint();
            let mut rhs = Matrix2::<C64>::zeros();
            for i in 0..3 {
                rhs += pauli(i + 1) * C64::from(r.matrix()[(i, j)]);
            }
            assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn align_already_aligned_max_volume_state() {
        for c in [0.0_f64, 0.25, 0.75] {
            let rho = pauli_compose(&max_volume_pf(c));
            let (aligned, t) = align(&rho).unwrap();
            let s = (1.0 - c).sqrt();
            assert_abs_diff_eq!(t.t, Vector3::new(s, s, -(1.0 - c)), epsilon = 1e-12);
            assert_eq!(t.chirality(), -1);
            // spectrum untouched
            let ev0 = rho.eigenvalues();
            let ev1 = aligned.eigenvalues();
            for (x, y) in ev0.iter().zip(ev1.iter()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn align_rotated_werner() {
        let p = 0.6;
        let rho = pauli_compose(&werner_pf(p));
        let r = Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vector3::new(0.3, 1.0, -0.7)),
            1.234,
        );
        let u = su2_from_so3(r.matrix()).kronecker(&Matrix2::identity());
        let rotated = HermitianOperator::new(dm4(&(u * as_m4(&rho) * u.adjoint()))).unwrap();
        let (aligned, t) = align(&rotated).unwrap();
        assert_abs_diff_eq!(t.t, Vector3::new(p, p, -p), epsilon = 1e-12);
        let pf = pauli_decompose(&aligned).unwrap();
        let expect = Matrix3::from_diagonal(&Vector3::new(p, p, -p));
        assert_abs_diff_eq!(pf.t, expect, epsilon = 1e-10);
    }

    #[test]
    fn align_zero_correlations() {
        let pf = PauliForm {
            a: Vector3::new(0.1, 0.0, 0.2),
            b: Vector3::zeros(),
            t: Matrix3::zeros(),
        };
        let (_, t) = align(&pauli_compose(&pf)).unwrap();
        assert_abs_diff_eq!(t.t, Vector3::zeros(), epsilon = 1e-14);
        assert_eq!(t.chirality(), 0);
    }

    #[test]
    fn align_requires_canonical_input() {
        let pf = PauliForm {
            a: Vector3::zeros(),
            b: Vector3::new(0.0, 0.0, 0.4),
            t: Matrix3::zeros(),
        };
        assert!(matches!(
            align(&pauli_compose(&pf)),
            Err(Error::NotCanonical(_))
        ));
    }

    #[test]
    fn align_diagonalizes_random_canonical_states() {
        for i in 0..50 {
            let tilde = canonicalize(&random_mixed(split_seed(13, i))).unwrap();
            let (aligned, t) = align(&tilde).unwrap();
            let pf = pauli_decompose(&aligned).unwrap();
            let mut off = 0.0_f64;
            for r in 0..3 {
                for c in 0..3 {
                    if r != c {
                        off = off.max(pf.t[(r, c)].abs());
                    }
                }
            }
            assert!(off < 1e-9, "off-diagonal {off:.2e}");
            for k in 0..3 {
                assert_abs_diff_eq!(pf.t[(k, k)], t.t[k], epsilon = 1e-9);
            }
            assert!(t.t[0] >= t.t[1].abs() && t.t[1] >= t.t[2].abs() - 1e-12);
            // product preserved vs the unaligned correlation matrix
            let before = pauli_decompose(&tilde).unwrap().t.determinant();
            assert_abs_diff_eq!(t.t[0] * t.t[1] * t.t[2], before, epsilon = 1e-12);
        }
    }

    #[test]
    fn chirality_examples() {
        for c in [0.0, 0.5, 0.99] {
            let s = (1.0_f64 - c).sqrt();
            let t = Matrix3::from_diagonal(&Vector3::new(s, s, c - 1.0));
            assert_eq!(chirality(&t), -1);
        }
        assert_eq!(chirality(&(Matrix3::identity() * 0.4)), 1);
        assert_eq!(
            chirality(&Matrix3::from_diagonal(&Vector3::new(0.7, 0.3, 0.0))),
            0
        );
    }

    #[test]
    fn volume_examples() {
        for p in [0.2, 0.8] {
            let v = volume(&werner_pf(p), Party::A).unwrap();
            assert_abs_diff_eq!(v, FOUR_PI_OVER_3 * p.powi(3), epsilon = 1e-12);
        }
        for c in [0.0, 0.5, 1.0] {
            let v = volume(&max_volume_pf(c), Party::A).unwrap();
            assert_abs_diff_eq!(v, FOUR_PI_OVER_3 * (1.0 - c) * (1.0 - c), epsilon = 1e-12);
        }
        let a = Vector3::new(0.3, -0.1, 0.5);
        let b = Vector3::new(-0.2, 0.4, 0.1);
        let product = PauliForm {
            a,
            b,
            t: a * b.transpose(),
        };
        assert_abs_diff_eq!(volume(&product, Party::A).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn volume_routes_agree_and_party_relation_holds() {
        for i in 0..50 {
            let pf = pauli_decompose(&random_mixed(split_seed(14, i))).unwrap();
            let va = volume(&pf, Party::A).unwrap();
            let vb = volume(&pf, Party::B).unwrap();
            let ea = steering_ellipsoid(&pf, Party::A).unwrap();
            let eb = steering_ellipsoid(&pf, Party::B).unwrap();
            assert!((va - ea.volume()).abs() <= 1e-9 * va.max(1.0));
            assert!((vb - eb.volume()).abs() <= 1e-9 * vb.max(1.0));
            let ga = pf.gamma_a().powi(4);
            let gb = pf.gamma_b().powi(4);
            assert!((gb * vb - ga * va).abs() <= 1e-9 * (ga * va).max(1.0));
        }
    }

    #[test]
    fn obesity_examples_and_party_symmetry() {
        for c in [0.0, 0.3, 0.9] {
            assert_abs_diff_eq!(
                obesity(&max_volume_pf(c)),
                (1.0 - c).sqrt(),
                epsilon = 1e-12
            );
        }
        for p in [0.1, 0.7] {
            assert_abs_diff_eq!(obesity(&werner_pf(p)), p.powf(0.75), epsilon = 1e-12);
        }
        let a = Vector3::new(0.3, -0.1, 0.5);
        let b = Vector3::new(-0.2, 0.4, 0.1);
        let product = PauliForm {
            a,
            b,
            t: a * b.transpose(),
        };
        assert_abs_diff_eq!(obesity(&product), 0.0, epsilon = 1e-12);

        for i in 0..20 {
            let pf = pauli_decompose(&random_mixed(split_seed(15, i))).unwrap();
            let swapped = PauliForm {
                a: pf.b,
                b: pf.a,
                t: pf.t.transpose(),
            };
            assert_eq!(obesity(&pf), obesity(&swapped));
        }
    }

    #[test]
    fn containment_in_bloch_sphere() {
        for i in 0..200 {
            let pf = pauli_decompose(&random_mixed(split_seed(16, i))).unwrap();
            let e = steering_ellipsoid(&pf, Party::A).unwrap();
            assert!(e.support_max() <= 1.0 + 1e-9);
        }
        // A pure Bell state's ellipsoid is the whole Bloch sphere.
        let bell = PauliForm {
            a: Vector3::zeros(),
            b: Vector3::zeros(),
            t: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)),
        };
        let e = steering_ellipsoid(&bell, Party::A).unwrap();
        assert_abs_diff_eq!(e.support_max(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn semiaxes_of_physical_states_are_in_range() {
        for i in 0..100 {
            let pf = pauli_decompose(&random_mixed(split_seed(17, i))).unwrap();
            let e = steering_ellipsoid(&pf, Party::A).unwrap();
            let s = e.semiaxes();
            assert!(s[0] >= s[1] && s[1] >= s[2]);
            assert!(s[0] <= 1.0 + 1e-12 && s[2] >= 0.0);
        }
    }

    #[test]
    fn schema_round_trip() {
        let e = steering_ellipsoid(&max_volume_pf(0.5), Party::A).unwrap();
        let js = e.schema();
        let text = serde_json::to_string(&js).unwrap();
        assert!(text.contains("\"Q\""));
        let back: EllipsoidJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.chirality, -1);
        assert_abs_diff_eq!(back.volume, e.volume(), epsilon = 1e-15);
    }
}
