//! Named state families and the closed-form extremal-boundary profiles,
//! plus the nested-polytope predicates of classical Euclidean geometry.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex;

use crate::ellipsoid::{sqrt_psd_2x2, Ellipsoid, FOUR_PI_OVER_3};
use crate::qstate::{as_m4, dm4, pauli, pure_projector4, C64, HermitianOperator, Party};
use crate::{Error, Result};

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::BadRange {
            name,
            value,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Werner state `p|ψ⁻⟩⟨ψ⁻| + (1−p)/4·1`; its ellipsoid is a sphere of
/// radius p centred on the origin.
pub fn werner(p: f64) -> Result<HermitianOperator> {
    check_unit("p", p)?;
    let r = 1.0 / 2.0_f64.sqrt();
    let psi_minus = [
        C64::from(0.0),
        C64::from(r),
        C64::from(-r),
        C64::from(0.0),
    ];
    let proj = as_m4(&pure_projector4(&psi_minus)?);
    let m = proj * Complex::from(p) + Matrix4::identity() * Complex::from((1.0 - p) / 4.0);
    Ok(HermitianOperator::from_validated(dm4(&m)))
}

/// Inept state `r|φ_ε⟩⟨φ_ε| + (1−r)ρ'⊗ρ'` with `φ_ε = √ε|00⟩ + √(1−ε)|11⟩`
/// and ρ' its single-qubit marginal. The ellipsoid is a sphere of radius r
/// centred at (0, 0, (2ε−1)(1−r)).
pub fn inept(r: f64, eps: f64) -> Result<HermitianOperator> {
    check_unit("r", r)?;
    check_unit("eps", eps)?;
    let phi = [
        C64::from(eps.sqrt()),
        C64::from(0.0),
        C64::from(0.0),
        C64::from((1.0 - eps).sqrt()),
    ];
    let proj = as_m4(&pure_projector4(&phi)?);
    let marginal = Matrix2::new(
        C64::from(eps),
        C64::from(0.0),
        C64::from(0.0),
        C64::from(1.0 - eps),
    );
    let product = marginal.kronecker(&marginal);
    let m = proj * Complex::from(r) + product * Complex::from(1.0 - r);
    Ok(HermitianOperator::from_validated(dm4(&m)))
}

/// The canonical maximal-volume state for centre magnitude c:
/// `(1−c/2)|ψ_c⟩⟨ψ_c| + (c/2)|00⟩⟨00|` with
/// `ψ_c = (|01⟩ + √(1−c)|10⟩)/√(2−c)`. Rank 2, b = 0, a = (0, 0, c); its
/// ellipsoid is the oblate-phys profile at c.
pub fn max_volume_canonical(c: f64) -> Result<HermitianOperator> {
    check_unit("c", c)?;
    let norm = (2.0 - c).sqrt();
    let psi = [
        C64::from(0.0),
        C64::from(1.0 / norm),
        C64::from((1.0 - c).sqrt() / norm),
        C64::from(0.0),
    ];
    let mut m = as_m4(&pure_projector4(&psi)?) * Complex::from(1.0 - c / 2.0);
    m[(0, 0)] += Complex::from(c / 2.0);
    Ok(HermitianOperator::from_validated(dm4(&m)))
}

/// Boosted maximal-volume state `(1⊗√(2ρ_B)) ρ̃_c^max (1⊗√(2ρ_B))` with
/// `ρ_B = (1 + b·σ)/2`. Alice's ellipsoid is unchanged by the boost.
pub fn max_volume_general(c: f64, b: &Vector3<f64>) -> Result<HermitianOperator> {
    check_unit("c", c)?;
    let b_norm = b.norm();
    if !(0.0..1.0).contains(&b_norm) {
        return Err(Error::BadRange {
            name: "|b|",
            value: b_norm,
            range: "[0, 1)",
        });
    }
    let tilde = max_volume_canonical(c)?;
    let mut two_rho_b = Matrix2::<C64>::identity();
    for i in 0..3 {
        two_rho_b += pauli(i + 1) * Complex::from(b[i]);
    }
    let boost = Matrix2::<C64>::identity().kronecker(&sqrt_psd_2x2(&two_rho_b));
    let mut out = boost * as_m4(&tilde) * boost.adjoint();
    let tr = out.trace();
    out /= Complex::from(tr.re);
    Ok(HermitianOperator::from_validated(dm4(&out)))
}

/// Choi state of the amplitude-damping channel with decay probability c:
/// `(Φ_AD ⊗ 1)(|ψ⁺⟩⟨ψ⁺|)` from the Kraus pair `E₀ = diag(1, √(1−c))`,
/// `E₁ = √c|0⟩⟨1|`. Equals [`max_volume_canonical`]`(c)` entrywise.
pub fn amplitude_damping_choi(c: f64) -> Result<HermitianOperator> {
    check_unit("c", c)?;
    let r = 1.0 / 2.0_f64.sqrt();
    let psi_plus = [C64::from(0.0), C64::from(r), C64::from(r), C64::from(0.0)];
    let bell = as_m4(&pure_projector4(&psi_plus)?);
    let e0 = Matrix2::new(
        C64::from(1.0),
        C64::from(0.0),
        C64::from(0.0),
        C64::from((1.0 - c).sqrt()),
    );
    let e1 = Matrix2::new(
        C64::from(0.0),
        C64::from(c.sqrt()),
        C64::from(0.0),
        C64::from(0.0),
    );
    let id = Matrix2::<C64>::identity();
    let k0 = e0.kronecker(&id);
    let k1 = e1.kronecker(&id);
    let m = k0 * bell * k0.adjoint() + k1 * bell * k1.adjoint();
    Ok(HermitianOperator::from_validated(dm4(&m)))
}

/// The closed-form extremal families of the physical/separable boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalKind {
    /// Largest physical circle in the equatorial plane.
    CirclePhys,
    /// Largest-area physical ellipse in the equatorial plane.
    EllipsePhys,
    /// Largest separable sphere.
    SphereSep,
    /// Largest physical sphere.
    SpherePhys,
    /// Largest-volume separable oblate spheroid.
    OblateSep,
    /// Largest-volume physical oblate spheroid.
    OblatePhys,
}

impl ExtremalKind {
    pub const ALL: [ExtremalKind; 6] = [
        ExtremalKind::CirclePhys,
        ExtremalKind::EllipsePhys,
        ExtremalKind::SphereSep,
        ExtremalKind::SpherePhys,
        ExtremalKind::OblateSep,
        ExtremalKind::OblatePhys,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExtremalKind::CirclePhys => "circle-phys",
            ExtremalKind::EllipsePhys => "ellipse-phys",
            ExtremalKind::SphereSep => "sphere-sep",
            ExtremalKind::SpherePhys => "sphere-phys",
            ExtremalKind::OblateSep => "oblate-sep",
            ExtremalKind::OblatePhys => "oblate-phys",
        }
    }

    /// Planar kinds are degenerate (χ = 0); separable boundaries are probed
    /// right-handed, physical boundaries left-handed.
    pub fn chirality(&self) -> i8 {
        match self {
            ExtremalKind::CirclePhys | ExtremalKind::EllipsePhys => 0,
            ExtremalKind::SphereSep | ExtremalKind::OblateSep => 1,
            ExtremalKind::SpherePhys | ExtremalKind::OblatePhys => -1,
        }
    }

    pub fn is_planar(&self) -> bool {
        matches!(self, ExtremalKind::CirclePhys | ExtremalKind::EllipsePhys)
    }
}

impl std::str::FromStr for ExtremalKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ExtremalKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown extremal kind `{s}`"))
    }
}

impl std::fmt::Display for ExtremalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed-form semiaxes of the extremal ellipsoid with centre magnitude c.
/// Planar kinds return [s₁, s₂, 0].
pub fn extremal_profile(kind: ExtremalKind, c: f64) -> Result<Vector3<f64>> {
    check_unit("c", c)?;
    let s = match kind {
        ExtremalKind::CirclePhys => {
            let r = 0.5 * (1.0 - c * c);
            Vector3::new(r, r, 0.0)
        }
        ExtremalKind::EllipsePhys => {
            let k = (1.0 + 8.0 * c * c).sqrt();
            let s1 = 0.25 * (3.0 - k);
            let s2 = ((1.0 - 4.0 * c * c + k) / 8.0).sqrt();
            Vector3::new(s1, s2, 0.0)
        }
        ExtremalKind::SphereSep => {
            let r = ((4.0 - 3.0 * c * c).sqrt() - 1.0) / 3.0;
            Vector3::new(r, r, r)
        }
        ExtremalKind::SpherePhys => {
            let r = 1.0 - c;
            Vector3::new(r, r, r)
        }
        ExtremalKind::OblateSep => {
            let k = (1.0 + 3.0 * c * c).sqrt();
            let s12 = ((1.0 - 3.0 * c * c + k) / 18.0).sqrt();
            let s3 = (2.0 - k) / 3.0;
            Vector3::new(s12, s12, s3)
        }
        ExtremalKind::OblatePhys => Vector3::new((1.0 - c).sqrt(), (1.0 - c).sqrt(), 1.0 - c),
    };
    Ok(s)
}

/// The extremal profile as an [`Ellipsoid`]. Planar profiles put the centre
/// along x, solid profiles along z (minor axis radial).
pub fn profile_ellipsoid(kind: ExtremalKind, c: f64) -> Result<Ellipsoid> {
    let s = extremal_profile(kind, c)?;
    let centre = if kind.is_planar() {
        Vector3::new(c, 0.0, 0.0)
    } else {
        Vector3::new(0.0, 0.0, c)
    };
    let q = Matrix3::from_diagonal(&Vector3::new(s[0] * s[0], s[1] * s[1], s[2] * s[2]));
    Ellipsoid::new(centre, q, kind.chirality(), Party::A)
}

/// The volume boundaries for centre magnitude c:
/// `V_sep = (2π/81)(1 − 9c² + (1+3c²)^{3/2})` and `V_max = (4π/3)(1−c)²`.
pub fn boundary_volumes(c: f64) -> Result<(f64, f64)> {
    check_unit("c", c)?;
    let v_sep =
        2.0 * std::f64::consts::PI / 81.0 * (1.0 - 9.0 * c * c + (1.0 + 3.0 * c * c).powf(1.5));
    let v_max = FOUR_PI_OVER_3 * (1.0 - c) * (1.0 - c);
    Ok((v_sep, v_max))
}

/// Danielsson's condition: a tetrahedron inscribed in a sphere of radius R
/// and circumscribed about a sphere of radius r, centres c apart, exists iff
/// `c² ≤ (R + r)(R − 3r)`.
pub fn nested_tetrahedron_spheres(big_r: f64, r: f64, c: f64) -> Result<bool> {
    if big_r <= 0.0 {
        return Err(Error::BadRange {
            name: "R",
            value: big_r,
            range: "(0, ∞)",
        });
    }
    if !(0.0..=big_r).contains(&r) {
        return Err(Error::BadRange {
            name: "r",
            value: r,
            range: "[0, R]",
        });
    }
    if c < 0.0 {
        return Err(Error::BadRange {
            name: "c",
            value: c,
            range: "[0, ∞)",
        });
    }
    Ok(c * c <= (big_r + r) * (big_r - 3.0 * r))
}

/// Euler-type condition for a triangle inscribed in the unit circle and
/// circumscribed about a circle of radius r whose centre is c away:
/// exists iff `r ≤ (1 − c²)/2`. At c = 0 this is Euler's r ≤ R/2.
pub fn nested_triangle_circles(r: f64, c: f64) -> Result<bool> {
    check_unit("r", r)?;
    if c < 0.0 {
        return Err(Error::BadRange {
            name: "c",
            value: c,
            range: "[0, ∞)",
        });
    }
    Ok(r <= 0.5 * (1.0 - c * c))
}
