//! Command-line front end: measure I/O, distances, potentials, deconvolution,
//! interpolation, bisector masses, and the verification driver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 schema/input violations,
//! 3 domain errors (with a structured JSON diagnostic on stderr).

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};
use wsphere::circle::{deconvolve_potential, CircleGrid};
use wsphere::io::{
    json_num, measure_from_json, measure_to_json, potential_from_csv, potential_to_csv,
    report_to_json_line, SCHEMA,
};
use wsphere::measures::{DiscreteMeasure, SpherePoint};
use wsphere::potential::PotentialSamples;
use wsphere::rigidity::{bisector_mass, verify_rigidity_battery, verify_translation_identity};
use wsphere::transport::wasserstein_distance;
use wsphere::{minimize_q, Error};

#[derive(Parser)]
#[command(
    name = "wsphere",
    version,
    about = "Exact discrete optimal transport on spheres with the chord metric",
    after_help = "All numeric output carries 17 significant digits; identical inputs \
produce byte-identical output. Measures are JSON documents \
{\"schema\":\"wsl-1\",\"dim\":n,\"points\":[[..]],\"weights\":[..]} with points in R^{n+1}. \
Potential CSVs store chord-metric values; the circle deconvolution rescales them \
internally to the |sin(theta/2)|^p kernel normalization."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// p-Wasserstein distance between two measures (chord metric).
    Distance {
        /// Measure JSON for mu.
        mu: PathBuf,
        /// Measure JSON for nu.
        nu: PathBuf,
        /// Order p >= 1 of the distance.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Output format (only json).
        #[arg(long, default_value = "json")]
        format: String,
        /// Write the result here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Chord-metric Wasserstein potential of a circle measure, as CSV.
    Potential {
        /// Measure JSON; must have dim 1 (points on the circle).
        mu: PathBuf,
        /// Evaluate on the full N-node grid theta_j = 2 pi j / N.
        #[arg(long)]
        grid: Option<usize>,
        /// Evaluate at an explicit comma-separated list of angles (radians).
        #[arg(long)]
        theta: Option<String>,
        /// Potential order p >= 1.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// On-sphere validation tolerance for the input measure.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Output format (only csv).
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recover a grid measure from a chord-potential CSV (needs p < 2).
    Deconvolve {
        /// Potential CSV with header theta,value on a full N-grid.
        potential: PathBuf,
        /// Order p the potential was computed with.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Minimize the alpha-weighted mean squared error between two measures.
    Interpolate {
        mu: PathBuf,
        nu: PathBuf,
        /// Interpolation weight alpha in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// On-sphere validation tolerance for the input measures.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Mass of the bisector B(x, -x) under a measure.
    BisectorMass {
        mu: PathBuf,
        /// The point x as comma-separated coordinates, e.g. "1,0".
        #[arg(long, conflicts_with = "theta")]
        x: Option<String>,
        /// The point x as an angle on the circle (radians); dim-1 measures only.
        #[arg(long)]
        theta: Option<f64>,
        /// On-sphere validation tolerance for x and the measure.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the verification batteries; exit 0 exactly when every report passes.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials for the translation-identity battery.
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli.command));
}

fn run(command: Command) -> i32 {
    match dispatch(command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", diagnostic(&err));
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_)
        | Error::InvalidMeasure(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch(..)
        | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Structured diagnostic for the error stream.
fn diagnostic(err: &Error) -> String {
    let mut doc = Map::new();
    let kind = match err {
        Error::DegenerateVector { .. } => "degenerate_vector",
        Error::NotTwoPoint(_) => "not_two_point",
        Error::DimensionMismatch(..) => "dimension_mismatch",
        Error::SolverStall(_) => "solver_stall",
        Error::NotOnSphere { .. } => "not_on_sphere",
        Error::TruncationTooSmall { .. } => "truncation_too_small",
        Error::SingularKernel { .. } => "singular_kernel",
        Error::AntipodalMass(_) => "antipodal_mass",
        Error::NotInUpperHemisphere(_) => "not_in_upper_hemisphere",
        Error::NegativeWeight { .. } => "negative_weight",
        Error::InvalidMeasure(_) => "invalid_measure",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Parse(_) => "parse_error",
        Error::Io(_) => "io_error",
    };
    doc.insert("error".into(), Value::String(kind.into()));
    doc.insert("message".into(), Value::String(err.to_string()));
    if let Error::SingularKernel {
        frequencies,
        rank,
        kernel_dim,
    } = err
    {
        doc.insert("rank".into(), Value::from(*rank));
        doc.insert("kernel_rank".into(), Value::from(*kernel_dim));
        doc.insert(
            "frequencies".into(),
            Value::Array(frequencies.iter().map(|&f| Value::from(f)).collect()),
        );
    }
    Value::Object(doc).to_string()
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Distance {
            mu,
            nu,
            p,
            format,
            output,
        } => {
            require_format(&format, "json")?;
            let mu = load_measure(&mu)?;
            let nu = load_measure(&nu)?;
            if p < 1.0 {
                return Err(Error::InvalidArgument(format!("--p {p} must be >= 1")));
            }
            let d = wasserstein_distance(&mu, &nu, p)?;
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::String(SCHEMA.into()));
            doc.insert("p".into(), json_num(p));
            doc.insert("distance".into(), json_num(d));
            emit(&output, &Value::Object(doc).to_string())
        }
        Command::Potential {
            mu,
            grid,
            theta,
            p,
            tol,
            format,
            output,
        } => {
            require_format(&format, "csv")?;
            let mu = load_measure(&mu)?;
            require_on_sphere(&mu, tol)?;
            if p < 1.0 {
                return Err(Error::InvalidArgument(format!("--p {p} must be >= 1")));
            }
            if mu.ambient_dim() != 2 {
                return Err(Error::InvalidArgument(
                    "potential CSV output needs a dim-1 (circle) measure".into(),
                ));
            }
            let sites: Vec<SpherePoint> = match (grid, theta) {
                (Some(n), None) => CircleGrid::new(n)?.points(),
                (None, Some(list)) => parse_theta_list(&list)?
                    .into_iter()
                    .map(|t| {
                        SpherePoint::new(vec![t.cos(), t.sin()])
                            .expect("angles map to unit vectors")
                    })
                    .collect(),
                _ => {
                    return Err(Error::InvalidArgument(
                        "pass exactly one of --grid N or --theta \"t1,t2,..\"".into(),
                    ))
                }
            };
            let samples = PotentialSamples::generate(&mu, sites, p);
            emit(&output, potential_to_csv(&samples).trim_end())
        }
        Command::Deconvolve {
            potential,
            p,
            format,
            output,
        } => {
            require_format(&format, "json")?;
            if !(1.0..=2.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "--p {p} must lie in [1, 2] for deconvolution"
                )));
            }
            let text = std::fs::read_to_string(&potential)?;
            let samples = potential_from_csv(&text, p)?;
            // The CSV stores chord-metric values; the circle machinery works in
            // the r = |(z - w)/2| normalization, a factor 2^p below.
            let scale = 2f64.powf(-p);
            let scaled: Vec<f64> = samples.values().iter().map(|v| v * scale).collect();
            let rescaled = PotentialSamples::ingest(samples.sites().to_vec(), scaled, p)?;
            let weights = deconvolve_potential(&rescaled, p)?;
            let grid = CircleGrid::new(weights.len())?;
            let points: Vec<Vec<f64>> =
                grid.points().iter().map(|q| q.coords().to_vec()).collect();
            let measure = DiscreteMeasure::normalized(points, weights)?;
            emit(&output, &measure_to_json(&measure))
        }
        Command::Interpolate {
            mu,
            nu,
            alpha,
            tol,
            format,
            output,
        } => {
            require_format(&format, "json")?;
            let mu = load_measure(&mu)?;
            let nu = load_measure(&nu)?;
            require_on_sphere(&mu, tol)?;
            require_on_sphere(&nu, tol)?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "--alpha {alpha} must lie in (0, 1)"
                )));
            }
            let result = minimize_q(&mu, &nu, alpha)?;
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::String(SCHEMA.into()));
            doc.insert("alpha".into(), json_num(alpha));
            doc.insert("q_value".into(), json_num(result.q_value));
            doc.insert("degenerate".into(), Value::Bool(result.degenerate));
            doc.insert("unique_hint".into(), Value::Bool(result.unique_hint));
            doc.insert(
                "measure".into(),
                match &result.measure {
                    Some(m) => serde_json::from_str(&measure_to_json(m))
                        .expect("measure document is valid JSON"),
                    None => Value::Null,
                },
            );
            emit(&output, &Value::Object(doc).to_string())
        }
        Command::BisectorMass {
            mu,
            x,
            theta,
            tol,
            format,
            output,
        } => {
            require_format(&format, "json")?;
            let mu = load_measure(&mu)?;
            require_on_sphere(&mu, tol)?;
            let coords = match (x, theta) {
                (Some(list), None) => parse_coord_list(&list)?,
                (None, Some(t)) => vec![t.cos(), t.sin()],
                _ => {
                    return Err(Error::InvalidArgument(
                        "pass exactly one of --x \"c1,c2,..\" or --theta T".into(),
                    ))
                }
            };
            if coords.len() != mu.ambient_dim() {
                return Err(Error::DimensionMismatch(coords.len(), mu.ambient_dim()));
            }
            let norm = wsphere::linalg::norm(&coords);
            if (norm - 1.0).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "--x has norm {norm:.17}; not on the sphere within {tol:e}"
                )));
            }
            let x = wsphere::project_to_sphere(&coords)?;
            let mass = bisector_mass(&mu, &x);
            let mut doc = Map::new();
            doc.insert("schema".into(), Value::String(SCHEMA.into()));
            doc.insert("mass".into(), json_num(mass));
            emit(&output, &Value::Object(doc).to_string())
        }
        Command::Verify {
            seed,
            trials,
            output,
        } => {
            if trials == 0 {
                return Err(Error::InvalidArgument("--trials must be >= 1".into()));
            }
            let mut reports = vec![verify_translation_identity(trials, seed)?];
            reports.extend(verify_rigidity_battery(seed)?);
            let lines: Vec<String> = reports.iter().map(report_to_json_line).collect();
            emit(&output, &lines.join("\n"))?;
            Ok(if reports.iter().all(|r| r.passed) { 0 } else { 1 })
        }
    }
}

fn require_format(got: &str, expected: &str) -> Result<(), Error> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "unsupported format {got:?}; this subcommand emits {expected}"
        )))
    }
}

fn load_measure(path: &Path) -> Result<DiscreteMeasure, Error> {
    let text = std::fs::read_to_string(path)?;
    measure_from_json(&text)
}

fn require_on_sphere(mu: &DiscreteMeasure, tol: f64) -> Result<(), Error> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("--tol must be positive".into()));
    }
    if !mu.is_supported_on_sphere(tol) {
        return Err(Error::InvalidArgument(format!(
            "measure is not supported on the unit sphere within --tol {tol:e}"
        )));
    }
    Ok(())
}

fn parse_theta_list(list: &str) -> Result<Vec<f64>, Error> {
    let angles: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("--theta entry {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if angles.is_empty() {
        return Err(Error::InvalidArgument("--theta list is empty".into()));
    }
    Ok(angles)
}

fn parse_coord_list(list: &str) -> Result<Vec<f64>, Error> {
    let coords: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("--x entry {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if coords.len() < 2 {
        return Err(Error::InvalidArgument(
            "--x needs at least two coordinates".into(),
        ));
    }
    Ok(coords)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<i32, Error> {
    match output {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))?;
        }
        None => println!("{text}"),
    }
    Ok(0)
}
