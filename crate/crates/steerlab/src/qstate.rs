//! Core state representation, Pauli-basis algebra and ground-truth
//! linear-algebra oracles.
//!
//! Operators live in the computational basis |00⟩, |01⟩, |10⟩, |11⟩ (first
//! qubit most significant); three-qubit kets |abc⟩ sit at index `4a + 2b + c`
//! with qubit order (A, B, C). Only Hermiticity and unit trace are enforced
//! at construction: unphysical candidates are first-class values, since
//! classifying them is the whole point.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, SVector, Vector3};
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, TOL_HERM, TOL_PSD};

pub type C64 = Complex<f64>;

/// Which tensor factor of a two-qubit operator a party label refers to.
/// `A` is the first (most significant) qubit, `B` the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

/// Pauli matrix σ_i for i = 0 (identity), 1, 2, 3.
pub fn pauli(i: usize) -> Matrix2<C64> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match i {
        0 => Matrix2::new(one, z, z, one),
        1 => Matrix2::new(z, one, one, z),
        2 => Matrix2::new(z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z),
        3 => Matrix2::new(one, z, z, -one),
        _ => panic!("Pauli index out of range: {i}"),
    }
}

/// σ_i ⊗ σ_j as a fixed-size 4×4 matrix.
pub fn pauli_kron(i: usize, j: usize) -> Matrix4<C64> {
    pauli(i).kronecker(&pauli(j))
}

/// Copy a fixed-size 4×4 into dynamic storage.
pub(crate) fn dm4(m: &Matrix4<C64>) -> DMatrix<C64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}


/// View a dimension-4 operator as a fixed-size 4×4 matrix.
pub(crate) fn as_m4(op: &HermitianOperator) -> Matrix4<C64> {
    debug_assert_eq!(op.dim(), 4);
    Matrix4::from_iterator(op.matrix().iter().cloned())
}

/// View a dimension-2 operator as a fixed-size 2×2 matrix.
pub(crate) fn as_m2(op: &HermitianOperator) -> Matrix2<C64> {
    debug_assert_eq!(op.dim(), 2);
    Matrix2::from_iterator(op.matrix().iter().cloned())
}

/// Dense Hermitian operator with unit trace. Dimension 4 holds two-qubit
/// candidates (possibly unphysical); dimension 8 holds three-qubit pure-state
/// projectors; dimension 2 holds reduced single-qubit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

impl HermitianOperator {
    /// Validates dimension (2, 4 or 8), Hermiticity and unit trace.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let (n, m) = mat.shape();
        if n != m || !matches!(n, 2 | 4 | 8) {
            return Err(Error::BadDimension(n.max(m)));
        }
        let asym = hermitian_defect(&mat);
        if asym > TOL_HERM {
            return Err(Error::NonHermitian(asym));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_HERM || tr.im.abs() > TOL_HERM {
            return Err(Error::BadTrace(tr.re));
        }
        Ok(Self { mat })
    }

    /// Constructor for operators that are Hermitian with unit trace by
    /// construction; checked only in debug builds.
    pub(crate) fn from_validated(mat: DMatrix<C64>) -> Self {
        debug_assert!(hermitian_defect(&mat) <= TOL_HERM);
        debug_assert!((mat.trace().re - 1.0).abs() <= TOL_HERM);
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Largest entrywise absolute difference from `other`.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }
}

fn hermitian_defect(mat: &DMatrix<C64>) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Bloch vectors and correlation matrix of a two-qubit operator:
/// `a_i = tr(ρ σ_i⊗1)`, `b_j = tr(ρ 1⊗σ_j)`, `T_ij = tr(ρ σ_i⊗σ_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliForm {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl PauliForm {
    /// The 4×4 Pauli expansion matrix Θ with Θ₀₀ = 1, Θ_i0 = a_i,
    /// Θ_0j = b_j and Θ_ij = T_ij.
    pub fn theta(&self) -> Matrix4<f64> {
        let mut th = Matrix4::zeros();
        th[(0, 0)] = 1.0;
        for i in 0..3 {
            th[(i + 1, 0)] = self.a[i];
            th[(0, i + 1)] = self.b[i];
            for j in 0..3 {
                th[(i + 1, j + 1)] = self.t[(i, j)];
            }
        }
        th
    }

    /// Lorentz factor γ_a = 1/√(1−a²). Infinite for |a| ≥ 1.
    pub fn gamma_a(&self) -> f64 {
        lorentz_gamma(self.a.norm())
    }

    /// Lorentz factor γ_b = 1/√(1−b²). Infinite for |b| ≥ 1.
    pub fn gamma_b(&self) -> f64 {
        lorentz_gamma(self.b.norm())
    }

    /// Bloch norm of the steerer when `steered` is the steered party.
    pub fn steerer_norm(&self, steered: Party) -> f64 {
        match steered {
            Party::A => self.b.norm(),
            Party::B => self.a.norm(),
        }
    }
}

fn lorentz_gamma(n: f64) -> f64 {
    let one_minus = 1.0 - n * n;
    if one_minus <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / one_minus.sqrt()
    }
}

/// Pure three-qubit state: 8 amplitudes over |abc⟩, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitPure {
    amp: SVector<C64, 8>,
}

impl ThreeQubitPure {
    pub fn new(amplitudes: [C64; 8]) -> Result<Self> {
        let amp = SVector::<C64, 8>::from(amplitudes);
        let norm = amp.norm();
        if (norm - 1.0).abs() > TOL_HERM {
            return Err(Error::BadNorm(norm));
        }
        Ok(Self { amp })
    }

    pub fn amplitudes(&self) -> &SVector<C64, 8> {
        &self.amp
    }

    /// Projector |ψ⟩⟨ψ| as a dimension-8 operator.
    pub fn projector(&self) -> HermitianOperator {
        let mut mat = DMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                mat[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        HermitianOperator::from_validated(mat)
    }

    /// Same state with parties A and C relabelled (index bits swapped).
    pub fn swap_ac(&self) -> ThreeQubitPure {
        let mut amp = SVector::<C64, 8>::zeros();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    amp[4 * c + 2 * b + a] = self.amp[4 * a + 2 * b + c];
                }
            }
        }
        Self { amp }
    }
}

/// Expand a two-qubit operator in the Pauli basis.
pub fn pauli_decompose(rho: &HermitianOperator) -> Result<PauliForm> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let m = rho.matrix();
    let mut a = Vector3::zeros();
    let mut b = Vector3::zeros();
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        let si = pauli(i + 1);
        a[i] = pauli_trace(m, &si, &pauli(0));
        b[i] = pauli_trace(m, &pauli(0), &si);
        for j in 0..3 {
            t[(i, j)] = pauli_trace(m, &si, &pauli(j + 1));
        }
    }
    Ok(PauliForm { a, b, t })
}

/// Re(tr(ρ (p ⊗ q))); the imaginary part vanishes for Hermitian inputs.
fn pauli_trace(rho: &DMatrix<C64>, p: &Matrix2<C64>, q: &Matrix2<C64>) -> f64 {
    let mut tr = C64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    tr += rho[(2 * a + b, 2 * ap + bp)] * p[(ap, a)] * q[(bp, b)];
                }
            }
        }
    }
    debug_assert!(tr.im.abs() < TOL_HERM);
    tr.re
}

/// Rebuild the operator `(1/4)(1⊗1 + a·σ⊗1 + 1⊗b·σ + Σ T_ij σ_i⊗σ_j)`.
/// Hermitian with unit trace by construction; positivity is not enforced.
pub fn pauli_compose(pf: &PauliForm) -> HermitianOperator {
    let mut m = Matrix4::<C64>::identity();
    for i in 0..3 {
        m += pauli_kron(i + 1, 0) * C64::from(pf.a[i]);
        m += pauli_kron(0, i + 1) * C64::from(pf.b[i]);
        for j in 0..3 {
            m += pauli_kron(i + 1, j + 1) * C64::from(pf.t[(i, j)]);
        }
    }
    HermitianOperator::from_validated(dm4(&(m * C64::from(0.25))))
}

/// Transpose one tensor factor of a two-qubit operator. Applying it twice is
/// the identity; in the Pauli picture transposing party B flips the sign of
/// the σ_y column of T (and of b_y).
pub fn partial_transpose(rho: &HermitianOperator, party: Party) -> Result<HermitianOperator> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let m = rho.matrix();
    let mut out = DMatrix::<C64>::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    let (row, col) = match party {
                        Party::A => (2 * ap + b, 2 * a + bp),
                        Party::B => (2 * a + bp, 2 * ap + b),
                    };
                    out[(row, col)] = m[(2 * a + b, 2 * ap + bp)];
                }
            }
        }
    }
    Ok(HermitianOperator::from_validated(out))
}

/// Trace out all qubits not listed in `keep` (0-based, 0 = most significant).
/// Trace is preserved.
pub fn partial_trace(op: &HermitianOperator, keep: &[usize]) -> Result<HermitianOperator> {
    let n = op.qubits();
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.is_empty() || kept.iter().any(|&q| q >= n) {
        return Err(Error::BadPartition(format!(
            "keep = {keep:?} for a {n}-qubit operator"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    // Bit q of an n-qubit index has weight 2^(n-1-q).
    let weight = |q: usize| 1usize << (n - 1 - q);
    let build = |bits_kept: usize, bits_traced: usize| -> usize {
        let mut idx = 0;
        for (pos, &q) in kept.iter().enumerate() {
            if bits_kept >> (kept.len() - 1 - pos) & 1 == 1 {
                idx += weight(q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if bits_traced >> (traced.len() - 1 - pos) & 1 == 1 {
                idx += weight(q);
            }
        }
        idx
    };
    let m = op.matrix();
    let mut out = DMatrix::<C64>::zeros(kd, kd);
    for i in 0..kd {
        for j in 0..kd {
            let mut sum = C64::new(0.0, 0.0);
            for e in 0..td {
                sum += m[(build(i, e), build(j, e))];
            }
            out[(i, j)] = sum;
        }
    }
    Ok(HermitianOperator::from_validated(out))
}

/// Smallest eigenvalue; the ground-truth positivity oracle is
/// `min_eigenvalue(ρ) ≥ -TOL_PSD`.
pub fn min_eigenvalue(op: &HermitianOperator) -> f64 {
    op.eigenvalues()[0]
}

/// Ground-truth physicality: ρ ≥ 0 up to the PSD slack.
pub fn is_physical_oracle(op: &HermitianOperator) -> bool {
    min_eigenvalue(op) >= -TOL_PSD
}

/// Peres–Horodecki criterion, exact for two qubits: entangled iff the
/// partial transpose has a negative eigenvalue.
pub fn is_entangled_ppt(rho: &HermitianOperator) -> Result<bool> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let lambda_min = min_eigenvalue(rho);
    if lambda_min < -TOL_PSD {
        return Err(Error::UnphysicalInput(lambda_min));
    }
    let pt = partial_transpose(rho, Party::B)?;
    Ok(min_eigenvalue(&pt) < -TOL_PSD)
}

/// What [`sample_state`] should produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// GG†-normalized mixed two-qubit state of the given rank (1..=4).
    Mixed4 { rank: u8 },
    /// Haar-uniform pure two-qubit state.
    Pure4,
    /// Haar-uniform pure three-qubit state.
    Pure8,
}

#[derive(Debug, Clone)]
pub enum Sample {
    Operator(HermitianOperator),
    Pure(ThreeQubitPure),
}

/// Deterministic per seed: the same seed always yields the same state,
/// bitwise. Mixed states normalize G·G† with a complex-Gaussian G of the
/// requested rank; pure states are normalized complex-Gaussian vectors.
pub fn sample_state(seed: u64, kind: SampleKind) -> Result<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SampleKind::Mixed4 { rank } => Ok(Sample::Operator(sample_mixed4(&mut rng, rank)?)),
        SampleKind::Pure4 => Ok(Sample::Operator(sample_pure4(&mut rng))),
        SampleKind::Pure8 => Ok(Sample::Pure(sample_pure8(&mut rng))),
    }
}

fn gaussian_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre-induced mixed state ρ = GG†/tr(GG†) with G complex-Gaussian 4×rank.
pub fn sample_mixed4<R: Rng>(rng: &mut R, rank: u8) -> Result<HermitianOperator> {
    if !(1..=4).contains(&rank) {
        return Err(Error::BadRank(rank));
    }
    let g = DMatrix::from_fn(4, rank as usize, |_, _| gaussian_c64(rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= C64::from(tr);
    Ok(HermitianOperator::from_validated(rho))
}

/// Haar-uniform pure two-qubit state as a projector.
pub fn sample_pure4<R: Rng>(rng: &mut R) -> HermitianOperator {
    let mut v = SVector::<C64, 4>::from_fn(|_, _| gaussian_c64(rng));
    v /= C64::from(v.norm());
    let mut mat = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            mat[(i, j)] = v[i] * v[j].conj();
        }
    }
    HermitianOperator::from_validated(mat)
}

/// Haar-uniform pure three-qubit state.
pub fn sample_pure8<R: Rng>(rng: &mut R) -> ThreeQubitPure {
    let mut v = SVector::<C64, 8>::from_fn(|_, _| gaussian_c64(rng));
    v /= C64::from(v.norm());
    ThreeQubitPure { amp: v }
}

/// Projector |ψ⟩⟨ψ| onto a two-qubit ket; errors if the ket is not normalized.
pub fn pure_projector4(amps: &[C64; 4]) -> Result<HermitianOperator> {
    let mut mat = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            mat[(i, j)] = amps[i] * amps[j].conj();
        }
    }
    HermitianOperator::new(mat)
}

/// Splittable per-task seed derivation (splitmix64), so parallel Monte Carlo
/// shards are deterministic given the root seed.
pub fn split_seed(root: u64, index: u64) -> u64 {
    let mut z = root.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// JSON state format shared by the CLI and the family generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StateJson {
    #[serde(rename = "dense4")]
    Dense4 { matrix: [[[f64; 2]; 4]; 4] },
    #[serde(rename = "pauli")]
    Pauli {
        a: [f64; 3],
        b: [f64; 3],
        #[serde(rename = "T")]
        t: [[f64; 3]; 3],
    },
    #[serde(rename = "pure8")]
    Pure8 { amplitudes: [[f64; 2]; 8] },
}

/// A decoded [`StateJson`].
#[derive(Debug, Clone)]
pub enum DecodedState {
    Operator(HermitianOperator),
    Pure(ThreeQubitPure),
}

impl StateJson {
    pub fn from_operator(op: &HermitianOperator) -> Result<Self> {
        if op.dim() != 4 {
            return Err(Error::BadDimension(op.dim()));
        }
        let m = op.matrix();
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                matrix[i][j] = [m[(i, j)].re, m[(i, j)].im];
            }
        }
        Ok(StateJson::Dense4 { matrix })
    }

    pub fn from_pauli(pf: &PauliForm) -> Self {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = pf.t[(i, j)];
            }
        }
        StateJson::Pauli {
            a: [pf.a[0], pf.a[1], pf.a[2]],
            b: [pf.b[0], pf.b[1], pf.b[2]],
            t,
        }
    }

    pub fn from_pure(psi: &ThreeQubitPure) -> Self {
        let mut amplitudes = [[0.0; 2]; 8];
        for i in 0..8 {
            amplitudes[i] = [psi.amp[i].re, psi.amp[i].im];
        }
        StateJson::Pure8 { amplitudes }
    }

    pub fn decode(&self) -> Result<DecodedState> {
        match self {
            StateJson::Dense4 { matrix } => {
                let mut m = DMatrix::<C64>::zeros(4, 4);
                for i in 0..4 {
                    for j in 0..4 {
                        m[(i, j)] = C64::new(matrix[i][j][0], matrix[i][j][1]);
                    }
                }
                Ok(DecodedState::Operator(HermitianOperator::new(m)?))
            }
            StateJson::Pauli { a, b, t } => {
                let pf = PauliForm {
                    a: Vector3::from(*a),
                    b: Vector3::from(*b),
                    t: Matrix3::from_fn(|i, j| t[i][j]),
                };
                Ok(DecodedState::Operator(pauli_compose(&pf)))
            }
            StateJson::Pure8 { amplitudes } => {
                let mut amp = [C64::new(0.0, 0.0); 8];
                for i in 0..8 {
                    amp[i] = C64::new(amplitudes[i][0], amplitudes[i][1]);
                }
                Ok(DecodedState::Pure(ThreeQubitPure::new(amp)?))
            }
        }
    }
}
