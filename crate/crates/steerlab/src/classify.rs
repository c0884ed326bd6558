//! Physicality and separability from the geometric data, cross-checked
//! against the eigenvalue oracles.
//!
//! A canonical state with ellipsoid (c, Q, χ) is positive semidefinite iff
//! `g1 = c⁴ − 2uc² + q ≥ 0` and `g2 = 1 − tr Q − 2χ√(det Q) − c² ≥ 0`, where
//! `u = 1 − tr Q + 2ĉᵀQĉ` and
//! `q = 1 + 2tr(Q²) − 2tr Q − (tr Q)² − 8χ√(det Q)`.
//! The third condition `c² + tr Q ≤ 3` is redundant for ellipsoids inside
//! the Bloch sphere but is still asserted. All quantities are rotation
//! invariants, so the verdict applies to any canonical state, aligned or not.

use serde::{Deserialize, Serialize};

use crate::ellipsoid::{canonicalize, steering_ellipsoid, Ellipsoid, FOUR_PI_OVER_3};
use crate::qstate::{
    is_entangled_ppt, is_physical_oracle, pauli_decompose, HermitianOperator, Party,
};
use crate::{Error, Result, TOL_BOUNDARY_BAND};

/// Slack for the geometric sign tests, matching the oracle slack in spirit.
const TOL_GEO: f64 = 1e-10;

/// The Theorem-1 invariants of an ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValues {
    pub u: f64,
    pub q: f64,
    pub g1: f64,
    pub g2: f64,
}

/// Evaluate u, q, g1, g2 for an ellipsoid. The skew term ĉᵀQĉ is defined as
/// 0 when c < 1e-12; it is multiplied by c² in g1, so the value is unaffected.
pub fn physicality_invariants(e: &Ellipsoid) -> GValues {
    let c = e.centre.norm();
    let skew = if c < 1e-12 {
        0.0
    } else {
        let chat = e.centre / c;
        (chat.transpose() * e.q * chat)[(0, 0)]
    };
    let tr_q = e.q.trace();
    let tr_q2 = (e.q * e.q).trace();
    let sqrt_det = e.q.determinant().max(0.0).sqrt();
    let chi = f64::from(e.chirality);
    let u = 1.0 - tr_q + 2.0 * skew;
    let q = 1.0 + 2.0 * tr_q2 - 2.0 * tr_q - tr_q * tr_q - 8.0 * chi * sqrt_det;
    let c2 = c * c;
    GValues {
        u,
        q,
        g1: c2 * c2 - 2.0 * u * c2 + q,
        g2: 1.0 - tr_q - 2.0 * chi * sqrt_det - c2,
    }
}

/// Theorem-1 verdict: the geometric data describe a physical state iff
/// g1 ≥ 0 and g2 ≥ 0 (within slack). `c² + tr Q ≤ 3` is asserted as well.
pub fn is_physical_geometric(e: &Ellipsoid) -> bool {
    let g = physicality_invariants(e);
    let in_sphere = e.centre.norm_squared() + e.q.trace() <= 3.0 + TOL_GEO;
    g.g1 >= -TOL_GEO && g.g2 >= -TOL_GEO && in_sphere
}

/// Combined geometric + oracle verdict for one candidate operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalityReport {
    pub u: f64,
    pub q: f64,
    pub g1: f64,
    pub g2: f64,
    /// Theorem-1 verdict; mirrors the oracle when the geometric route was
    /// skipped (see `oracle_only`).
    pub geometric_physical: bool,
    /// Ground-truth verdict: smallest eigenvalue ≥ −tol.
    pub oracle_physical: bool,
    /// PPT verdict; `None` for unphysical candidates.
    pub entangled: Option<bool>,
    pub chirality: i8,
    /// |g1| or |g2| within the boundary band: eigensolvers genuinely dither
    /// here, so differential tests exclude it.
    pub boundary: bool,
    /// Set when the canonical filter was unavailable (singular marginal) and
    /// only the oracle route ran.
    pub oracle_only: bool,
}

impl PhysicalityReport {
    pub fn schema(&self) -> ReportJson {
        let wrap = |x: f64| if x.is_finite() { Some(x) } else { None };
        ReportJson {
            u: wrap(self.u),
            q: wrap(self.q),
            g1: wrap(self.g1),
            g2: wrap(self.g2),
            physical: self.oracle_physical,
            entangled: self.entangled,
            chirality: self.chirality,
            boundary: self.boundary,
        }
    }
}

/// JSON form of a [`PhysicalityReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportJson {
    pub u: Option<f64>,
    pub q: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub physical: bool,
    pub entangled: Option<bool>,
    pub chirality: i8,
    pub boundary: bool,
}

/// Canonicalize, build Alice's ellipsoid and fill the full report. When the
/// marginal is singular the geometric route is skipped and the oracle verdict
/// is reported alone.
pub fn classify_state(rho: &HermitianOperator) -> Result<PhysicalityReport> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension(rho.dim()));
    }
    let oracle_physical = is_physical_oracle(rho);
    let entangled = if oracle_physical {
        Some(is_entangled_ppt(rho)?)
    } else {
        None
    };
    match canonicalize(rho) {
        Ok(tilde) => {
            let e = steering_ellipsoid(&pauli_decompose(&tilde)?, Party::A)?;
            let g = physicality_invariants(&e);
            let boundary =
                g.g1.abs() <= TOL_BOUNDARY_BAND || g.g2.abs() <= TOL_BOUNDARY_BAND;
            // Entangled states are left-handed (partial transposition flips
            // t₂, and det ρ̃^T_B < 0 forces χ = −1).
            debug_assert!(entangled != Some(true) || boundary || e.chirality == -1);
            Ok(PhysicalityReport {
                u: g.u,
                q: g.q,
                g1: g.g1,
                g2: g.g2,
                geometric_physical: is_physical_geometric(&e),
                oracle_physical,
                entangled,
                chirality: e.chirality,
                boundary,
                oracle_only: false,
            })
        }
        Err(Error::SingularMarginal) => Ok(PhysicalityReport {
            u: f64::NAN,
            q: f64::NAN,
            g1: f64::NAN,
            g2: f64::NAN,
            geometric_physical: oracle_physical,
            oracle_physical,
            entangled,
            chirality: 0,
            boundary: false,
            oracle_only: true,
        }),
        Err(e) => Err(e),
    }
}

/// What a steering-ellipsoid volume alone says about a state with centre
/// magnitude c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeVerdict {
    /// V exceeds V_c^max: no such state exists.
    Unphysical,
    /// V exceeds V_c^sep: any physical state with this volume is entangled.
    EntangledIfPhysical,
    /// Below both bounds: the volume alone decides nothing.
    Indeterminate,
}

/// Theorem-3 classification by volume:
/// `V_c^sep = (2π/81)(1 − 9c² + (1+3c²)^{3/2})`, `V_c^max = (4π/3)(1−c)²`.
pub fn volume_classify(v: f64, c: f64) -> Result<VolumeVerdict> {
    if v < 0.0 {
        return Err(Error::BadRange {
            name: "V",
            value: v,
            range: "[0, ∞)",
        });
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::BadRange {
            name: "c",
            value: c,
            range: "[0, 1]",
        });
    }
    let v_sep =
        2.0 * std::f64::consts::PI / 81.0 * (1.0 - 9.0 * c * c + (1.0 + 3.0 * c * c).powf(1.5));
    let v_max = FOUR_PI_OVER_3 * (1.0 - c) * (1.0 - c);
    if v > v_max {
        Ok(VolumeVerdict::Unphysical)
    } else if v > v_sep {
        Ok(VolumeVerdict::EntangledIfPhysical)
    } else {
        Ok(VolumeVerdict::Indeterminate)
    }
}
