//! Command-line front end for the Möbius/anharmonic-ratio toolkit.
//!
//! Every subcommand reads JSON (inline argument, `--in FILE`, or stdin),
//! writes one JSON result to stdout (or `--out FILE`), and reports failures
//! as a JSON error object on stderr. Exit codes: 0 success, 1 domain error
//! (bad geometry, failed validation), 2 usage / input error. All floats are
//! printed with 17 significant digits, so identical inputs and seeds produce
//! byte-identical output.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moebius_kit::Complex64;
use serde::{Deserialize, Serialize};

use moebius_kit::{
    classify_with_mode, fit_circle, json::to_json_string, non_moebius_zoo, orbit,
    solve_fourth_point, Error, ExecMode, GeneralizedCircle, MoebiusMap, PhiTestConfig, SampledMap,
    SpherePoint, Tetrad, Verdict, DEFAULT_TOL,
};

/// Environment variable consulted when `--seed` is absent.
const SEED_ENV: &str = "MOEBIUS_KIT_SEED";

#[derive(Parser)]
#[command(
    name = "moebius-kit",
    version,
    about = "Anharmonic ratios, Möbius maps, circles, and a map classifier on the Riemann sphere",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Anharmonic (cross-)ratio of a tetrad of sphere points.
    Crossratio(DataArgs),
    /// Permutation orbit of a ratio value under the anharmonic group.
    Orbit(OrbitArgs),
    /// Fourth point completing three points to a tetrad of given ratio.
    Solve4(Solve4Args),
    /// Test a tetrad for the Apollonian (equal distance products) property.
    Apollonian(ApollonianArgs),
    /// Least-squares generalized circle through a point cloud.
    Fit(DataArgs),
    /// Apply a Möbius map to a list of points.
    Apply(DataArgs),
    /// Classify a sampled map: constant, moebius, phi_violating, or inconclusive.
    Classify(ClassifyArgs),
    /// Classify every map in the built-in non-Möbius zoo.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Inline JSON payload (otherwise --in FILE, otherwise stdin).
    data: Option<String>,
    /// Read the JSON payload from a file.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Write the JSON result to a file instead of stdout.
    #[arg(long = "out", value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    /// Ratio value, as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex)]
    alpha: Complex64,
    #[arg(long = "out", value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Solve4Args {
    #[command(flatten)]
    data: DataArgs,
    /// Target ratio, as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex)]
    alpha: Complex64,
}

#[derive(Args)]
struct ApollonianArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Chordal tolerance for the equal-products test.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Parallel,
    Sequential,
}

impl From<Mode> for ExecMode {
    fn from(m: Mode) -> ExecMode {
        match m {
            Mode::Parallel => ExecMode::Parallel,
            Mode::Sequential => ExecMode::Sequential,
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Ratio value to test preservation of, as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "2")]
    alpha: Complex64,
    /// Chordal tolerance (default: 1e-7 for analytic maps, 1e-4 for pairs).
    #[arg(long)]
    tol: Option<f64>,
    /// Number of test tetrads.
    #[arg(long = "n-tetrads", default_value_t = 500)]
    n_tetrads: usize,
    /// RNG seed (falls back to MOEBIUS_KIT_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation strategy; both give identical results.
    #[arg(long, value_enum, default_value_t = Mode::Parallel)]
    mode: Mode,
}

#[derive(Args)]
struct FuzzArgs {
    /// Ratio value, as `re` or `re,im`.
    #[arg(long, value_parser = parse_complex, default_value = "2")]
    alpha: Complex64,
    /// Chordal tolerance on image ratios.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Number of test tetrads per map.
    #[arg(long = "n-tetrads", default_value_t = 500)]
    n_tetrads: usize,
    /// RNG seed (falls back to MOEBIUS_KIT_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation strategy; both give identical results.
    #[arg(long, value_enum, default_value_t = Mode::Parallel)]
    mode: Mode,
    #[arg(long = "out", value_name = "FILE")]
    output: Option<PathBuf>,
}

/// `re` or `re,im` into a complex number.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',');
    let re = parts
        .next()
        .unwrap_or_default()
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad real part: {e}"))?;
    let im = match parts.next() {
        None => 0.0,
        Some(t) => t
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad imaginary part: {e}"))?,
    };
    if parts.next().is_some() {
        return Err("expected `re` or `re,im`".to_string());
    }
    if !(re.is_finite() && im.is_finite()) {
        return Err("components must be finite".to_string());
    }
    Ok(Complex64::new(re, im))
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message,
        }
    }

    fn io(message: String) -> Self {
        Failure {
            code: 2,
            kind: "io",
            message,
        }
    }

    fn json(message: String) -> Self {
        Failure {
            code: 2,
            kind: "json",
            message,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::IndeterminateForm(_) => "indeterminate_form",
            Error::InvalidTetrad(_) => "invalid_tetrad",
            Error::DegenerateAlpha => "degenerate_alpha",
            Error::CollidingBasePoints(_) => "colliding_base_points",
            Error::SingularMatrix { .. } => "singular_matrix",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::NormalizationFailure(_) => "normalization_failure",
            Error::InvalidConfig(_) => "invalid_config",
        };
        Failure {
            code: 1,
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: ErrorBody<'a>,
}

fn emit_error(kind: &str, message: &str) {
    let out = ErrorOut {
        error: ErrorBody { kind, message },
    };
    let text = to_json_string(&out)
        .unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{kind}\"}}}}"));
    eprintln!("{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            emit_error("usage", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            emit_error(f.kind, &f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_payload(data: &DataArgs) -> Result<String, Failure> {
    match (&data.data, &data.input) {
        (Some(_), Some(_)) => Err(Failure::usage(
            "provide inline JSON or --in FILE, not both".to_string(),
        )),
        (Some(inline), None) => Ok(inline.clone()),
        (None, Some(path)) => fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display()))),
        (None, None) => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::io(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn parse_payload<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::json(format!("invalid input JSON: {e}")))
}

/// Parses JSON whose schema embeds domain validation (sampled maps, Möbius
/// matrices): malformed JSON is a usage error (exit 2), while structurally
/// valid JSON describing an invalid object is a domain error (exit 1).
fn parse_domain<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::json(format!("invalid input JSON: {e}")))?;
    serde_json::from_value(value).map_err(|e| Failure {
        code: 1,
        kind: "invalid_input",
        message: e.to_string(),
    })
}

fn write_result<T: Serialize>(value: &T, output: &Option<PathBuf>) -> Result<(), Failure> {
    let mut text =
        to_json_string(value).map_err(|e| Failure::json(format!("cannot serialize: {e}")))?;
    text.push('\n');
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Err(_) => Ok(0),
        Ok(text) => text.trim().parse::<u64>().map_err(|e| {
            Failure::usage(format!("{SEED_ENV} must be an unsigned integer: {e}"))
        }),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Crossratio(args) => {
            let points: [SpherePoint; 4] = parse_payload(&read_payload(&args)?)?;
            let tetrad = Tetrad::new(points)?;
            let ratio = tetrad.cross_ratio();
            #[derive(Serialize)]
            struct Out {
                value: SpherePoint,
                singular: bool,
            }
            write_result(
                &Out {
                    value: ratio.value(),
                    singular: ratio.is_singular(),
                },
                &args.output,
            )
        }
        Cmd::Orbit(args) => {
            let values = orbit(args.alpha)?;
            #[derive(Serialize)]
            struct Out {
                alpha: SpherePoint,
                orbit: Vec<SpherePoint>,
                size: usize,
            }
            write_result(
                &Out {
                    alpha: SpherePoint::Finite(args.alpha),
                    size: values.len(),
                    orbit: values.into_iter().map(SpherePoint::Finite).collect(),
                },
                &args.output,
            )
        }
        Cmd::Solve4(args) => {
            let points: [SpherePoint; 3] = parse_payload(&read_payload(&args.data)?)?;
            let z4 = solve_fourth_point(points[0], points[1], points[2], args.alpha)?;
            #[derive(Serialize)]
            struct Out {
                z4: SpherePoint,
            }
            write_result(&Out { z4 }, &args.data.output)
        }
        Cmd::Apollonian(args) => {
            let points: [SpherePoint; 4] = parse_payload(&read_payload(&args.data)?)?;
            let tetrad = Tetrad::new(points)?;
            let apollonian = tetrad.is_apollonian(args.tol)?;
            #[derive(Serialize)]
            struct Out {
                apollonian: bool,
                ratio: SpherePoint,
                products: Option<[f64; 3]>,
            }
            write_result(
                &Out {
                    apollonian,
                    ratio: tetrad.cross_ratio().value(),
                    products: tetrad.distance_products(),
                },
                &args.data.output,
            )
        }
        Cmd::Fit(args) => {
            let points: Vec<SpherePoint> = parse_payload(&read_payload(&args)?)?;
            let (circle, residual) = fit_circle(&points)?;
            write_result(&fit_output(circle, residual), &args.output)
        }
        Cmd::Apply(args) => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct In {
                map: MoebiusMap,
                points: Vec<SpherePoint>,
            }
            let input: In = parse_domain(&read_payload(&args)?)?;
            #[derive(Serialize)]
            struct Out {
                images: Vec<SpherePoint>,
            }
            write_result(
                &Out {
                    images: input.points.iter().map(|&p| input.map.apply(p)).collect(),
                },
                &args.output,
            )
        }
        Cmd::Classify(args) => {
            let map: SampledMap = parse_domain(&read_payload(&args.data)?)?;
            let seed = resolve_seed(args.seed)?;
            let tol = args.tol.unwrap_or_else(|| map.default_phi_tol());
            let cfg = PhiTestConfig::new(args.alpha, args.n_tetrads, tol, seed)?;
            let report = classify_with_mode(&map, &cfg, args.mode.into())?;
            write_result(&report, &args.data.output)
        }
        Cmd::Fuzz(args) => {
            let seed = resolve_seed(args.seed)?;
            let cfg = PhiTestConfig::new(args.alpha, args.n_tetrads, args.tol, seed)?;
            #[derive(Serialize)]
            struct Entry {
                name: &'static str,
                verdict: Verdict,
                violations: usize,
                worst_gap: f64,
                witness_index: Option<usize>,
            }
            #[derive(Serialize)]
            struct Out {
                alpha: SpherePoint,
                tol: f64,
                n_tetrads: usize,
                seed: u64,
                results: Vec<Entry>,
                all_phi_violating: bool,
            }
            let mut results = Vec::new();
            for entry in non_moebius_zoo() {
                let report = classify_with_mode(&entry.map, &cfg, args.mode.into())?;
                let (violations, worst_gap) = report
                    .checks
                    .phi
                    .as_ref()
                    .map(|p| (p.violations, p.worst_gap))
                    .unwrap_or((0, 0.0));
                results.push(Entry {
                    name: entry.name,
                    verdict: report.verdict,
                    violations,
                    worst_gap,
                    witness_index: report.witness.as_ref().map(|w| w.index),
                });
            }
            let all = results.iter().all(|e| e.verdict == Verdict::PhiViolating);
            let escaped: Vec<&str> = results
                .iter()
                .filter(|e| e.verdict != Verdict::PhiViolating)
                .map(|e| e.name)
                .collect();
            write_result(
                &Out {
                    alpha: SpherePoint::Finite(args.alpha),
                    tol: args.tol,
                    n_tetrads: args.n_tetrads,
                    seed,
                    results,
                    all_phi_violating: all,
                },
                &args.output,
            )?;
            if !all {
                return Err(Failure {
                    code: 1,
                    kind: "assertion_failed",
                    message: format!(
                        "zoo maps escaped the phi test: {}",
                        escaped.join(", ")
                    ),
                });
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct FitOut {
    circle: GeneralizedCircle,
    residual: f64,
    kind: &'static str,
    center: Option<SpherePoint>,
    radius: Option<f64>,
}

fn fit_output(circle: GeneralizedCircle, residual: f64) -> FitOut {
    FitOut {
        kind: if circle.is_line() { "line" } else { "circle" },
        center: circle.center().map(SpherePoint::Finite),
        radius: circle.radius(),
        circle,
        residual,
    }
}
