//! Seeded Monte-Carlo verification sweeps.
//!
//! Each suite draws its candidates from a splittable seed, checks one family
//! of invariants, and reports counts only — the output is byte-identical
//! across runs with the same configuration. The CLI `verify` subcommand is a
//! thin wrapper around [`run_suite`]; the acceptance tests run the same
//! sweeps at their contractual sample sizes.

use nalgebra::Vector3;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::classify_state;
use crate::concurrence::{
    bell_diagonal_concurrence, concurrence, concurrence_volume_bound, max_concurrence_for_centre,
    simplex_to_bell_diagonal,
};
use crate::ellipsoid::{canonicalize, FOUR_PI_OVER_3};
use crate::families::{extremal_profile, max_volume_canonical, max_volume_general, ExtremalKind};
use crate::kkt::{ellipse_kkt_residuals, solve_extremal, verify_spheroid_symmetry, KktProblem, Reduction};
use crate::monogamy::{monogamy_report, w_family};
use crate::qstate::{
    is_entangled_ppt, is_physical_oracle, min_eigenvalue, pauli_decompose, sample_mixed4,
    sample_pure8, split_seed, C64, HermitianOperator,
};
use crate::{Result, TOL_BOUNDARY_BAND, TOL_PSD};

/// Configuration shared by all suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: u64,
    /// Oracle slack override; [`crate::TOL_PSD`] by default.
    pub tol_psd: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0xC0FFEE,
            samples: 10_000,
            tol_psd: TOL_PSD,
        }
    }
}

/// Outcome of one suite; `passed` iff no violations.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub samples: u64,
    pub checks: u64,
    pub violations: u64,
    /// Comparisons skipped because the invariants sat inside the numerical
    /// boundary band (oracle-equivalence only).
    pub boundary_excluded: u64,
    /// Candidates where a route was unavailable (singular marginals).
    pub skipped: u64,
    /// Deterministic diagnostics: first few violations, plus logged
    /// saturation candidates in the monogamy suite.
    pub notes: Vec<String>,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            samples: 0,
            checks: 0,
            violations: 0,
            boundary_excluded: 0,
            skipped: 0,
            notes: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.notes.len() < 8 {
                self.notes.push(note());
            }
        }
    }

    fn finish(mut self) -> Self {
        self.passed = self.violations == 0;
        self
    }

    /// One deterministic summary line for the CLI.
    pub fn summary_line(&self) -> String {
        format!(
            "suite {:<18} samples={} checks={} violations={} boundary_excluded={} skipped={} {}",
            self.name,
            self.samples,
            self.checks,
            self.violations,
            self.boundary_excluded,
            self.skipped,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// The verification suites exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    OracleEquivalence,
    Chirality,
    Bounds,
    Monogamy,
    Kkt,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::OracleEquivalence,
        SuiteKind::Chirality,
        SuiteKind::Bounds,
        SuiteKind::Monogamy,
        SuiteKind::Kkt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::OracleEquivalence => "oracle-equivalence",
            SuiteKind::Chirality => "chirality",
            SuiteKind::Bounds => "bounds",
            SuiteKind::Monogamy => "monogamy",
            SuiteKind::Kkt => "kkt",
        }
    }
}

impl std::str::FromStr for SuiteKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

pub fn run_suite(kind: SuiteKind, config: &SuiteConfig) -> Result<SuiteOutcome> {
    match kind {
        SuiteKind::OracleEquivalence => oracle_equivalence(config),
        SuiteKind::Chirality => chirality_suite(config),
        SuiteKind::Bounds => bounds_suite(config),
        SuiteKind::Monogamy => monogamy_suite(config),
        SuiteKind::Kkt => kkt_suite(config),
    }
}

pub fn run_all(config: &SuiteConfig) -> Result<Vec<SuiteOutcome>> {
    SuiteKind::ALL
        .into_iter()
        .map(|k| run_suite(k, config))
        .collect()
}

fn rng_for(config: &SuiteConfig, salt: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split_seed(config.seed ^ salt, index))
}

/// A physical sample pushed outside the PSD cone: the smallest eigenvalue is
/// driven to −δ (before renormalization) by subtracting along its projector,
/// then the trace is renormalized. Small δ exercises near-boundary behavior.
fn perturbed_unphysical(rho: &HermitianOperator, delta: f64) -> HermitianOperator {
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut argmin = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[argmin] {
            argmin = i;
        }
    }
    let shift = eig.eigenvalues[argmin] + delta;
    let v = eig.eigenvectors.column(argmin);
    let mut m = rho.matrix().clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= Complex::from(shift) * v[i] * v[j].conj();
        }
    }
    m /= C64::from(1.0 - shift);
    HermitianOperator::new(m).expect("perturbation preserves Hermiticity and trace")
}

/// Theorem-1 equivalence: geometric verdict == eigenvalue verdict on a mix
/// of physical and perturbed-unphysical candidates, outside the |g| ≤ 1e-8
/// band.
fn oracle_equivalence(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("oracle-equivalence");
    for i in 0..config.samples {
        let mut rng = rng_for(config, 0x0AC1E, i);
        let rank = (i / 2 % 4 + 1) as u8;
        let base = sample_mixed4(&mut rng, rank)?;
        let candidate = if i % 2 == 0 {
            base
        } else {
            let exponent = -6.0 + 5.0 * rng.random::<f64>();
            perturbed_unphysical(&base, 10f64.powf(exponent))
        };
        out.samples += 1;
        let report = classify_state(&candidate)?;
        if report.oracle_only {
            out.skipped += 1;
            continue;
        }
        if report.g1.abs() <= TOL_BOUNDARY_BAND || report.g2.abs() <= TOL_BOUNDARY_BAND {
            out.boundary_excluded += 1;
            continue;
        }
        let oracle = min_eigenvalue(&candidate) >= -config.tol_psd;
        out.check(report.geometric_physical == oracle, || {
            format!(
                "sample {i}: geometric={} oracle={} g1={:.6e} g2={:.6e}",
                report.geometric_physical, oracle, report.g1, report.g2
            )
        });
    }
    Ok(out.finish())
}

/// Theorem-2 sweep: entangled ⇒ left-handed, and partial transposition of a
/// separable state stays physical and separable.
fn chirality_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("chirality");
    for i in 0..config.samples {
        let mut rng = rng_for(config, 0xC41A, i);
        let rho = sample_mixed4(&mut rng, (i % 4 + 1) as u8)?;
        out.samples += 1;
        let report = classify_state(&rho)?;
        if report.oracle_only {
            out.skipped += 1;
            continue;
        }
        if report.entangled == Some(true) {
            out.check(report.chirality == -1, || {
                format!("sample {i}: entangled with chirality {}", report.chirality)
            });
        }
    }
    // Separable part: flip chirality by partial transposition.
    let sep_target = (config.samples / 10).max(1);
    let mut found = 0u64;
    let mut attempt = 0u64;
    while found < sep_target && attempt < sep_target * 60 {
        let mut rng = rng_for(config, 0x5E9A, attempt);
        attempt += 1;
        let rho = sample_mixed4(&mut rng, 4)?;
        if is_entangled_ppt(&rho)? {
            continue;
        }
        found += 1;
        out.samples += 1;
        let flipped = crate::qstate::partial_transpose(&rho, crate::qstate::Party::B)?;
        out.check(is_physical_oracle(&flipped), || {
            format!("separable sample {attempt}: partial transpose not physical")
        });
        out.check(!is_entangled_ppt(&flipped)?, || {
            format!("separable sample {attempt}: partial transpose not separable")
        });
    }
    Ok(out.finish())
}

/// Lemma-1 and Theorem-4/5 bounds: Bell-diagonal concurrence against
/// √|t₁t₂t₃| with edge saturation, the volume and obesity bounds on random
/// states, and the maximal-family saturations.
fn bounds_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("bounds");
    for i in 0..config.samples {
        let mut rng = rng_for(config, 0xB0A2D, i);
        let rho = sample_mixed4(&mut rng, (i % 4 + 1) as u8)?;
        out.samples += 1;
        let bounds = concurrence_volume_bound(&rho)?;
        out.check(bounds.slack >= -1e-9, || {
            format!("sample {i}: volume-bound slack {:.3e}", bounds.slack)
        });
        out.check(bounds.concurrence <= bounds.obesity + 1e-9, || {
            format!(
                "sample {i}: C={:.12} > obesity={:.12}",
                bounds.concurrence, bounds.obesity
            )
        });
        match canonicalize(&rho) {
            Ok(tilde) => {
                let centre = pauli_decompose(&tilde)?.a.norm().min(1.0);
                let cap = max_concurrence_for_centre(centre)?;
                out.check(bounds.concurrence <= cap + 1e-9, || {
                    format!(
                        "sample {i}: C={:.12} exceeds √(1-c)={:.12}",
                        bounds.concurrence, cap
                    )
                });
            }
            Err(_) => out.skipped += 1,
        }
    }
    // Bell-diagonal simplex sweep.
    let bell_samples = (config.samples / 10).max(10);
    for i in 0..bell_samples {
        let mut rng = rng_for(config, 0xBE11, i);
        let mut p = [0.0; 4];
        let mut sum = 0.0;
        for w in &mut p {
            *w = -(1.0 - rng.random::<f64>()).ln();
            sum += *w;
        }
        for w in &mut p {
            *w /= sum;
        }
        let spec = simplex_to_bell_diagonal(p)?;
        out.samples += 1;
        let s = spec.t.abs();
        let cap = (s[0] * s[1] * s[2]).sqrt();
        let closed = bell_diagonal_concurrence(&spec)?;
        out.check(closed <= cap + 1e-12, || {
            format!("bell sample {i}: C={closed:.12} > √|t1t2t3|={cap:.12}")
        });
        let full = concurrence(&spec.compose())?;
        out.check((closed - full).abs() <= 1e-10, || {
            format!("bell sample {i}: closed {closed:.12} vs wootters {full:.12}")
        });
    }
    // Edge family saturates the Lemma-1 bound for every concurrence value.
    for k in 0..=100 {
        let p0 = k as f64 / 100.0;
        let spec = simplex_to_bell_diagonal([p0, 1.0 - p0, 0.0, 0.0])?;
        let s = spec.t.abs();
        let cap = (s[0] * s[1] * s[2]).sqrt();
        let closed = bell_diagonal_concurrence(&spec)?;
        out.check((closed - cap).abs() <= 1e-10, || {
            format!("edge p0={p0}: C={closed:.12} bound={cap:.12}")
        });
    }
    // Maximal states saturate the volume bound for every boost.
    for k in 0..=20 {
        let c = k as f64 / 20.0;
        let canonical = max_volume_canonical(c)?;
        out.check(
            (concurrence(&canonical)? - (1.0 - c).sqrt()).abs() <= 1e-10,
            || format!("max-volume c={c}: concurrence off √(1-c)"),
        );
        for b in [0.0, 0.3, 0.6, 0.9] {
            let rho = max_volume_general(c, &Vector3::new(0.0, 0.0, b))?;
            let bounds = concurrence_volume_bound(&rho)?;
            out.check(bounds.slack.abs() <= 1e-9, || {
                format!("max-volume c={c} b={b}: slack {:.3e}", bounds.slack)
            });
        }
    }
    Ok(out.finish())
}

/// Theorem-6 monogamy, the volume–centre identity, CKW and the tangle on
/// Haar-random pure states, plus the saturating purified family.
fn monogamy_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("monogamy");
    let mut saturation_candidates = 0u64;
    for i in 0..config.samples {
        let mut rng = rng_for(config, 0x3CB17, i);
        let psi = sample_pure8(&mut rng);
        out.samples += 1;
        let report = monogamy_report(&psi)?;
        let violations = report.violations(1e-8);
        out.check(violations.is_empty(), || {
            format!("sample {i}: violated {violations:?}")
        });
        // Open question: saturation is asserted only for the maximal family;
        // log any sampled state that comes close, never assert about it.
        if (report.scenario_a_lhs - report.scenario_a_rhs).abs() <= 1e-6 {
            saturation_candidates += 1;
            if out.notes.len() < 8 {
                out.notes.push(format!(
                    "note: sample {i} saturates scenario (a) within 1e-6"
                ));
            }
        }
        if i % 10 == 0 {
            let swapped = monogamy_report(&psi.swap_ac())?;
            let consistent = (report.v_a_given_b - swapped.v_c_given_b).abs() <= 1e-9
                && (report.v_c_given_b - swapped.v_a_given_b).abs() <= 1e-9
                && (report.v_b_given_a - swapped.v_b_given_c).abs() <= 1e-9
                && (report.tangle - swapped.tangle).abs() <= 1e-9;
            out.check(consistent, || {
                format!("sample {i}: A↔C relabelling inconsistent")
            });
        }
    }
    // Saturating family across the centre grid, boosted and not.
    for k in 0..=20 {
        let c = k as f64 / 20.0;
        let psi = w_family(c)?;
        let report = monogamy_report(&psi)?;
        out.check(
            (report.scenario_a_lhs - report.scenario_a_rhs).abs() <= 1e-9,
            || format!("w-family c={c}: scenario (a) gap"),
        );
        out.check(
            (report.centre_sum - 1.0).abs() <= 1e-9,
            || format!("w-family c={c}: centre sum {:.12}", report.centre_sum),
        );
        out.check(report.tangle.abs() <= 1e-9, || {
            format!("w-family c={c}: tangle {:.3e}", report.tangle)
        });
        let boosted = crate::monogamy::boost_bob(&psi, &Vector3::new(0.1, 0.0, 0.4))?;
        let boosted_report = monogamy_report(&boosted)?;
        out.check(
            (boosted_report.scenario_b_lhs - boosted_report.scenario_b_rhs).abs() <= 1e-9,
            || format!("boosted w-family c={c}: scenario (b) gap"),
        );
    }
    if saturation_candidates > 0 {
        out.notes.push(format!(
            "note: {saturation_candidates} sampled states saturate scenario (a) within 1e-6"
        ));
    }
    Ok(out.finish())
}

/// Optimizer-versus-closed-form agreement on the extremal grid, boundary
/// residuals, multiplier sign conditions and the spheroid symmetry check.
fn kkt_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("kkt");
    let _ = config;
    for kind in ExtremalKind::ALL {
        let reduction = match kind {
            ExtremalKind::CirclePhys => Reduction::Circle,
            ExtremalKind::EllipsePhys => Reduction::Planar,
            ExtremalKind::SphereSep | ExtremalKind::SpherePhys => Reduction::Sphere,
            ExtremalKind::OblateSep | ExtremalKind::OblatePhys => Reduction::Spheroid,
        };
        for k in 0..20 {
            let c = k as f64 * 0.05;
            let problem = KktProblem::new(c, kind.chirality(), reduction)?;
            let sol = solve_extremal(&problem)?;
            out.samples += 1;
            let expect = extremal_profile(kind, c)?;
            let dev = (0..3)
                .map(|i| (sol.semiaxes[i] - expect[i]).abs())
                .fold(0.0, f64::max);
            out.check(dev <= 1e-6, || {
                format!("{kind} c={c:.2}: semiaxis deviation {dev:.3e}")
            });
            out.check(sol.g1.abs() <= 1e-8, || {
                format!("{kind} c={c:.2}: g1 {:.3e} at maximum", sol.g1)
            });
            if let Some((l1, l2)) = sol.multipliers {
                out.check(l1 >= -1e-8 && l2 >= -1e-8, || {
                    format!("{kind} c={c:.2}: negative multiplier ({l1:.3e}, {l2:.3e})")
                });
                out.check(
                    (l1 * sol.g1).abs() <= 1e-8 && (l2 * sol.g2).abs() <= 1e-8,
                    || format!("{kind} c={c:.2}: complementary slackness"),
                );
            }
            if kind == ExtremalKind::EllipsePhys {
                let res = ellipse_kkt_residuals(sol.semiaxes[0], sol.semiaxes[1], c)?;
                out.check(res.g1.abs() <= 1e-8 && res.lambda2.abs() <= 1e-8, || {
                    format!(
                        "{kind} c={c:.2}: residuals g1={:.3e} λ2={:.3e}",
                        res.g1, res.lambda2
                    )
                });
                out.check(res.lambda1 >= -1e-8, || {
                    format!("{kind} c={c:.2}: λ1 {:.3e}", res.lambda1)
                });
            }
        }
    }
    for (c, chi) in [(0.0, -1), (0.3, -1), (0.5, 1), (0.7, 1)] {
        out.samples += 1;
        out.check(verify_spheroid_symmetry(c, chi)?, || {
            format!("spheroid symmetry failed at c={c} chi={chi}")
        });
    }
    Ok(out.finish())
}

/// Deterministic physical + perturbed candidate stream used by the examples
/// and the acceptance tests; index parity selects physical vs perturbed.
pub fn oracle_candidate(config: &SuiteConfig, index: u64) -> Result<HermitianOperator> {
    let mut rng = rng_for(config, 0x0AC1E, index);
    let rank = (index / 2 % 4 + 1) as u8;
    let base = sample_mixed4(&mut rng, rank)?;
    if index % 2 == 0 {
        Ok(base)
    } else {
        let exponent = -6.0 + 5.0 * rng.random::<f64>();
        Ok(perturbed_unphysical(&base, 10f64.powf(exponent)))
    }
}

/// Eigen-projector perturbation exposed for the classifier fuzz tests.
pub fn make_unphysical(rho: &HermitianOperator, delta: f64) -> HermitianOperator {
    perturbed_unphysical(rho, delta)
}
