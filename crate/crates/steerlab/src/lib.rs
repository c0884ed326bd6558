//! Steering-ellipsoid toolkit for two-qubit states.
//!
//! A two-qubit state is represented geometrically by the ellipsoid of Bloch
//! vectors that one party can be steered to by measurements on the other,
//! together with the two local Bloch vectors. This crate constructs that
//! geometric data, decides physicality and separability from it, generates
//! the extremal state families living on those boundaries, and verifies the
//! concurrence and steering-monogamy bounds they support.
//!
//! Modules follow the pipeline:
//!
//! * [`qstate`] — dense Hermitian operators, Pauli-basis algebra and the
//!   ground-truth linear-algebra oracles (eigenvalues, PPT).
//! * [`ellipsoid`] — steering-ellipsoid construction, canonical filtering,
//!   alignment, chirality, volume and obesity.
//! * [`classify`] — geometric physicality/separability verdicts cross-checked
//!   against the oracles.
//! * [`families`] — named state families and closed-form extremal profiles.
//! * [`concurrence`] — Wootters concurrence and its volume/obesity bounds.
//! * [`monogamy`] — three-qubit steering scenarios, CKW and the tangle.
//! * [`kkt`] — numerical constrained maximization reproducing the closed-form
//!   extremal profiles independently.
//! * [`suites`] — seeded Monte-Carlo verification sweeps used by the CLI.

pub mod classify;
pub mod concurrence;
pub mod ellipsoid;
pub mod families;
pub mod kkt;
pub mod monogamy;
pub mod qstate;
pub mod suites;

/// Hermiticity / unit-trace / unit-norm validation tolerance.
pub const TOL_HERM: f64 = 1e-9;
/// Slack allowed by the positive-semidefiniteness oracle: an operator is
/// physical when its smallest eigenvalue is at least `-TOL_PSD`.
pub const TOL_PSD: f64 = 1e-10;
/// Below this |det T̃| an ellipsoid is treated as degenerate (chirality 0).
pub const TOL_DET: f64 = 1e-12;
/// |g1| or |g2| at or below this is reported as a boundary state; the
/// differential physicality tests exclude this band.
pub const TOL_BOUNDARY_BAND: f64 = 1e-8;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {0:.3e} exceeds {TOL_HERM:.0e}")]
    NonHermitian(f64),
    #[error("operator trace must be 1 within {TOL_HERM:.0e}: got {0}")]
    BadTrace(f64),
    #[error("unsupported operator dimension {0}")]
    BadDimension(usize),
    #[error("invalid subsystem partition: {0}")]
    BadPartition(String),
    #[error("sample rank must lie in 1..=4, got {0}")]
    BadRank(u8),
    #[error("state vector norm must be 1 within {TOL_HERM:.0e}: got {0}")]
    BadNorm(f64),
    #[error("operator is not a physical state (min eigenvalue {0:.3e})")]
    UnphysicalInput(f64),
    #[error("steerer marginal is pure: steering is undefined")]
    SteererPure,
    #[error("reduced state is singular: canonical filter undefined")]
    SingularMarginal,
    #[error("state is not canonical: |b| = {0:.3e}")]
    NotCanonical(f64),
    #[error("{name} = {value} outside {range}")]
    BadRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("simplex weights must be non-negative and sum to 1")]
    BadWeights,
    #[error("ellipse axes must be nonzero")]
    DegenerateAxes,
    #[error("no strictly feasible seed found for the constrained maximization")]
    Infeasible,
    #[error("invalid ellipsoid data: {0}")]
    BadEllipsoid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
