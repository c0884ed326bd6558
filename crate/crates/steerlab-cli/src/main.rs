//! Command-line front-end: analyze states, generate the named families,
//! tabulate boundary profiles, run the constrained maximizer and the
//! verification suites.
//!
//! Exit codes: 0 = ok / all checks pass, 1 = a property violation was found,
//! 2 = input error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;

use steerlab::classify::classify_state;
use steerlab::concurrence::concurrence_volume_bound;
use steerlab::ellipsoid::{steering_ellipsoid, EllipsoidJson};
use steerlab::families::{
    amplitude_damping_choi, boundary_volumes, extremal_profile, inept, max_volume_canonical,
    max_volume_general, werner, ExtremalKind,
};
use steerlab::kkt::{solve_extremal, KktProblem};
use steerlab::monogamy::{boost_bob, monogamy_report, w_family};
use steerlab::qstate::{pauli_decompose, DecodedState, Party, StateJson, ThreeQubitPure};
use steerlab::suites::{run_all, run_suite, SuiteConfig, SuiteKind, SuiteOutcome};

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser)]
#[command(
    name = "steerlab",
    about = "Steering-ellipsoid analysis of two-qubit states",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one two-qubit state: Pauli data, both steering
    /// ellipsoids, physicality/separability and concurrence bounds.
    Analyze {
        /// Input state JSON (kinds: dense4, pauli).
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit a named family state as state JSON.
    Family {
        /// werner | inept | max-canonical | max-general | ad-choi | w-family
        #[arg(long)]
        kind: String,
        /// Werner mixing parameter.
        #[arg(long)]
        p: Option<f64>,
        /// Inept delivery probability.
        #[arg(long)]
        r: Option<f64>,
        /// Inept pure-state weight.
        #[arg(long)]
        eps: Option<f64>,
        /// Centre magnitude for the maximal families / AD channel / purification.
        #[arg(long)]
        c: Option<f64>,
        /// Bob's Bloch vector: a single z value or "bx,by,bz".
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate an extremal boundary profile over a centre grid.
    Boundary {
        /// circle-phys | ellipse-phys | sphere-sep | sphere-phys | oblate-sep | oblate-phys
        #[arg(long)]
        kind: String,
        /// Grid as start:stop:step.
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerically maximize ellipsoid volume for a given centre and compare
    /// against the closed form.
    Kkt {
        #[arg(long)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        chi: i8,
        #[arg(long)]
        dim: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monogamy-of-steering report for a pure three-qubit state.
    Monogamy {
        /// Input pure8 state JSON.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Use the maximal purified family at this centre instead of a file.
        #[arg(long = "w-centre")]
        w_centre: Option<f64>,
        /// Boost Bob's Bloch vector: "bx,by,bz" or a single z value.
        #[arg(long)]
        boost: Option<String>,
        /// Violation tolerance for the exit code.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded verification suites.
    Verify {
        /// oracle-equivalence | chirality | bounds | monogamy | kkt | all
        #[arg(long)]
        suite: String,
        #[arg(long)]
        samples: Option<u64>,
        /// Root seed; defaults to STEERLAB_SEED or 0xC0FFEE.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the PSD oracle slack.
        #[arg(long = "tol-psd")]
        tol_psd: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

type CliResult<T> = Result<T, String>;

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Analyze { input, out } => cmd_analyze(&input, out.as_deref()),
        Command::Family {
            kind,
            p,
            r,
            eps,
            c,
            b,
            out,
        } => cmd_family(&kind, p, r, eps, c, b.as_deref(), out.as_deref()),
        Command::Boundary {
            kind,
            grid,
            format,
            out,
        } => cmd_boundary(&kind, &grid, format, out.as_deref()),
        Command::Kkt { c, chi, dim, out } => cmd_kkt(c, chi, dim, out.as_deref()),
        Command::Monogamy {
            input,
            w_centre,
            boost,
            tol,
            out,
        } => cmd_monogamy(input.as_deref(), w_centre, boost.as_deref(), tol, out.as_deref()),
        Command::Verify {
            suite,
            samples,
            seed,
            tol_psd,
        } => cmd_verify(&suite, samples, seed, tol_psd),
    }
}

/// JSON with every finite float printed to 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("JSON output is UTF-8")
}

fn emit(text: &str, out: Option<&std::path::Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_state(path: &std::path::Path) -> CliResult<DecodedState> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let json: StateJson =
        serde_json::from_str(&text).map_err(|e| format!("malformed state JSON: {e}"))?;
    json.decode().map_err(|e| format!("invalid state: {e}"))
}

fn parse_bloch(text: &str) -> CliResult<Vector3<f64>> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| -> CliResult<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| format!("cannot parse `{s}` as a number: {e}"))
    };
    match parts.len() {
        1 => Ok(Vector3::new(0.0, 0.0, parse(parts[0])?)),
        3 => Ok(Vector3::new(
            parse(parts[0])?,
            parse(parts[1])?,
            parse(parts[2])?,
        )),
        n => Err(format!("expected 1 or 3 comma-separated values, got {n}")),
    }
}

#[derive(Serialize)]
struct AnalyzeJson {
    pauli: StateJson,
    ellipsoid_a: Option<EllipsoidJson>,
    ellipsoid_b: Option<EllipsoidJson>,
    report: steerlab::classify::ReportJson,
    concurrence: Option<steerlab::concurrence::ConcurrenceJson>,
}

fn cmd_analyze(input: &std::path::Path, out: Option<&std::path::Path>) -> CliResult<ExitCode> {
    let rho = match read_state(input)? {
        DecodedState::Operator(op) if op.dim() == 4 => op,
        DecodedState::Operator(op) => {
            return Err(format!("analyze expects a two-qubit state, got dim {}", op.dim()))
        }
        DecodedState::Pure(_) => {
            return Err("analyze expects a two-qubit state; use `monogamy` for pure8".into())
        }
    };
    let pf = pauli_decompose(&rho).map_err(|e| e.to_string())?;
    let report = classify_state(&rho).map_err(|e| e.to_string())?;
    let ellipsoid_a = steering_ellipsoid(&pf, Party::A).ok().map(|e| e.schema());
    let ellipsoid_b = steering_ellipsoid(&pf, Party::B).ok().map(|e| e.schema());
    let concurrence = if report.oracle_physical {
        concurrence_volume_bound(&rho).ok().map(|b| b.schema())
    } else {
        None
    };
    let doc = AnalyzeJson {
        pauli: StateJson::from_pauli(&pf),
        ellipsoid_a,
        ellipsoid_b,
        report: report.schema(),
        concurrence,
    };
    emit(&to_json(&doc), out)?;
    Ok(ExitCode::SUCCESS)
}

fn require(name: &str, value: Option<f64>) -> CliResult<f64> {
    value.ok_or_else(|| format!("--{name} is required for this family"))
}

fn cmd_family(
    kind: &str,
    p: Option<f64>,
    r: Option<f64>,
    eps: Option<f64>,
    c: Option<f64>,
    b: Option<&str>,
    out: Option<&std::path::Path>,
) -> CliResult<ExitCode> {
    let err = |e: steerlab::Error| e.to_string();
    let json = match kind {
        "werner" => StateJson::from_operator(&werner(require("p", p)?).map_err(err)?),
        "inept" => StateJson::from_operator(
            &inept(require("r", r)?, require("eps", eps)?).map_err(err)?,
        ),
        "max-canonical" => {
            StateJson::from_operator(&max_volume_canonical(require("c", c)?).map_err(err)?)
        }
        "max-general" => {
            let bloch = parse_bloch(b.ok_or("--b is required for max-general")?)?;
            StateJson::from_operator(&max_volume_general(require("c", c)?, &bloch).map_err(err)?)
        }
        "ad-choi" => {
            StateJson::from_operator(&amplitude_damping_choi(require("c", c)?).map_err(err)?)
        }
        "w-family" => Ok(StateJson::from_pure(&w_family(require("c", c)?).map_err(err)?)),
        other => return Err(format!("unknown family kind `{other}`")),
    }
    .map_err(err)?;
    emit(&to_json(&json), out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BoundaryRow {
    c: f64,
    s1: f64,
    s2: f64,
    s3: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "V_sep")]
    v_sep: f64,
    #[serde(rename = "V_max")]
    v_max: f64,
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid must be start:stop:step, got `{text}`"));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| format!("cannot parse grid component `{part}`: {e}"))?;
    }
    let [start, stop, step] = nums;
    if step <= 0.0 || stop < start {
        return Err(format!("invalid grid {start}:{stop}:{step}: need step > 0 and stop ≥ start"));
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let value = start + step * k as f64;
        if value > stop + 1e-12 {
            break;
        }
        grid.push(value.min(stop));
        k += 1;
    }
    Ok(grid)
}

fn cmd_boundary(
    kind: &str,
    grid: &str,
    format: Format,
    out: Option<&std::path::Path>,
) -> CliResult<ExitCode> {
    let kind: ExtremalKind = kind.parse()?;
    let grid = parse_grid(grid)?;
    let mut rows = Vec::new();
    for c in grid {
        let s = extremal_profile(kind, c).map_err(|e| e.to_string())?;
        let (v_sep, v_max) = boundary_volumes(c).map_err(|e| e.to_string())?;
        rows.push(BoundaryRow {
            c,
            s1: s[0],
            s2: s[1],
            s3: s[2],
            v: steerlab::ellipsoid::FOUR_PI_OVER_3 * s[0] * s[1] * s[2],
            v_sep,
            v_max,
        });
    }
    let text = match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut lines = vec!["c,s1,s2,s3,V,V_sep,V_max".to_string()];
            for row in &rows {
                lines.push(format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    row.c, row.s1, row.s2, row.s3, row.v, row.v_sep, row.v_max
                ));
            }
            lines.join("\n")
        }
    };
    emit(&text, out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct KktJson {
    semiaxes: [f64; 3],
    #[serde(rename = "V")]
    v: f64,
    g1: f64,
    g2: f64,
    closed_form: [f64; 3],
    max_abs_diff: f64,
}

fn cmd_kkt(c: f64, chi: i8, dim: u8, out: Option<&std::path::Path>) -> CliResult<ExitCode> {
    let problem = KktProblem::from_dimension(c, chi, dim).map_err(|e| e.to_string())?;
    let solution = solve_extremal(&problem).map_err(|e| e.to_string())?;
    let kind = match (dim, chi) {
        (2, 0) => ExtremalKind::EllipsePhys,
        (3, -1) => ExtremalKind::OblatePhys,
        (3, 1) => ExtremalKind::OblateSep,
        _ => unreachable!("validated by KktProblem"),
    };
    let closed = extremal_profile(kind, c).map_err(|e| e.to_string())?;
    let max_abs_diff = (0..3)
        .map(|i| (solution.semiaxes[i] - closed[i]).abs())
        .fold(0.0f64, f64::max);
    let doc = KktJson {
        semiaxes: [
            solution.semiaxes[0],
            solution.semiaxes[1],
            solution.semiaxes[2],
        ],
        v: solution.objective,
        g1: solution.g1,
        g2: solution.g2,
        closed_form: [closed[0], closed[1], closed[2]],
        max_abs_diff,
    };
    emit(&to_json(&doc), out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_monogamy(
    input: Option<&std::path::Path>,
    w_centre: Option<f64>,
    boost: Option<&str>,
    tol: f64,
    out: Option<&std::path::Path>,
) -> CliResult<ExitCode> {
    let mut psi: ThreeQubitPure = match (input, w_centre) {
        (Some(path), None) => match read_state(path)? {
            DecodedState::Pure(psi) => psi,
            DecodedState::Operator(_) => {
                return Err("monogamy expects a pure8 state".into());
            }
        },
        (None, Some(c)) => w_family(c).map_err(|e| e.to_string())?,
        _ => return Err("provide exactly one of --in or --w-centre".into()),
    };
    if let Some(text) = boost {
        let b = parse_bloch(text)?;
        psi = boost_bob(&psi, &b).map_err(|e| e.to_string())?;
    }
    let report = monogamy_report(&psi).map_err(|e| e.to_string())?;
    emit(&to_json(&report), out)?;
    let violations = report.violations(tol);
    if violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("violated: {violations:?}");
        Ok(ExitCode::from(1))
    }
}

fn effective_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("STEERLAB_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(DEFAULT_SEED)
}

fn cmd_verify(
    suite: &str,
    samples: Option<u64>,
    seed: Option<u64>,
    tol_psd: Option<f64>,
) -> CliResult<ExitCode> {
    let config = SuiteConfig {
        seed: effective_seed(seed),
        samples: samples.unwrap_or(10_000),
        tol_psd: tol_psd.unwrap_or(steerlab::TOL_PSD),
    };
    let outcomes: Vec<SuiteOutcome> = if suite == "all" {
        run_all(&config).map_err(|e| e.to_string())?
    } else {
        let kind: SuiteKind = suite.parse()?;
        vec![run_suite(kind, &config).map_err(|e| e.to_string())?]
    };
    let mut stdout = std::io::stdout().lock();
    let mut all_passed = true;
    for outcome in &outcomes {
        writeln!(stdout, "{}", outcome.summary_line()).map_err(|e| e.to_string())?;
        for note in &outcome.notes {
            writeln!(stdout, "  {note}").map_err(|e| e.to_string())?;
        }
        all_passed &= outcome.passed;
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
