mod catalog;
mod experiments;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncgp::algebra::State;
use ncgp::distance::spectral_distance;
use ncgp::triple::SpectralTriple;
use ncgp::wasserstein::{k_lambda, w1, FiniteMetricSpace, Measure};
use serde::Deserialize;
use serde_json::json;

use catalog::Catalog;
use experiments::{Experiment, Params};
use report::{summary, write_json, ExperimentReport, Timer};

#[derive(Parser)]
#[command(name = "ncgp", version, about = "Spectral distance and K-homology experiments on finite spectral triples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, env = "NCGP_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Lattice size for lattice-based experiments.
    #[arg(long)]
    points: Option<usize>,
    /// Write the JSON output here as well as to stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Common {
    fn params(&self) -> Params {
        Params {
            lambda: self.lambda,
            mu: self.mu,
            seed: self.seed,
            trials: self.trials,
            tol: self.tol,
            points: self.points,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sweep {
    /// `(λ, W₁, W₂, W, ratio)` on the unit square.
    WassersteinRsquare,
    /// Per-instance brackets of the random product sweep.
    ProductBounds,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a named claim and report pass/fail.
    Check {
        experiment: Experiment,
        #[command(flatten)]
        common: Common,
    },
    /// Run a parameter sweep and write CSV.
    Sweep {
        sweep: Sweep,
        #[arg(long, default_value_t = 20)]
        lambda_steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral distance between two states, from a JSON file or a catalog triple.
    Distance {
        /// JSON with `triple`, `phi` and `psi`.
        input: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "input")]
        catalog: Option<Catalog>,
        /// Pure-state indices for catalog triples.
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long, default_value_t = 1)]
        to: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Wasserstein-1 distance, from a JSON file or the unit-square example.
    W1 {
        /// JSON with `space`, `mu` and `nu`.
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Pairing table of the ℂ² modules against `p₊`, `p₋`.
    Khomology {
        #[command(flatten)]
        common: Common,
    },
}

/// Bad input from the user rather than a failed computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| c.is::<Usage>() || is_input_error(c));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn is_input_error(e: &(dyn std::error::Error + 'static)) -> bool {
    use ncgp::Error::*;
    matches!(
        e.downcast_ref::<ncgp::Error>(),
        Some(InvalidInput(_) | InvalidParameter(_) | DimensionMismatch { .. } | AlgebraMismatch(_) | Unsupported(_))
    )
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Writes a line to stdout; a closed pipe (`ncgp … | head`) is not an error.
fn out_line(text: &str) -> Result<()> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit<T: serde::Serialize>(value: &T, json_path: Option<&Path>) -> Result<()> {
    out_line(&serde_json::to_string_pretty(value)?)?;
    if let Some(path) = json_path {
        write_json(path, value)?;
    }
    Ok(())
}

fn finish(reports: Vec<ExperimentReport>, common: &Common) -> Result<bool> {
    for r in &reports {
        eprintln!("{}", summary(r));
    }
    let pass = reports.iter().all(|r| r.pass);
    if reports.len() == 1 {
        emit(&reports[0], common.json.as_deref())?;
    } else {
        emit(&reports, common.json.as_deref())?;
    }
    Ok(pass)
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Check { experiment, common } => {
            let reports = experiments::run(experiment, &common.params()).map_err(as_usage)?;
            finish(reports, &common)
        }
        Command::Sweep { sweep, lambda_steps, common } => run_sweep(sweep, lambda_steps, &common),
        Command::Distance { input, catalog, from, to, common } => {
            let tol = common.tol.unwrap_or(ncgp::distance::DEFAULT_TOL);
            let (triple, phi, psi) = match (input, catalog) {
                (Some(path), _) => {
                    let req: DistanceRequest = read_json(&path)?;
                    (req.triple, req.phi, req.psi)
                }
                (None, Some(which)) => {
                    let lambda = common.lambda.unwrap_or(1.0);
                    let mu = common.mu.unwrap_or(1.0);
                    let t = catalog::triple(which, lambda, mu, common.points.unwrap_or(5)).map_err(as_usage)?;
                    let states = State::pure_states(t.algebra())?;
                    let pick = |k: usize| {
                        states.get(k).cloned().ok_or_else(|| usage(format!("state index {k} out of range")))
                    };
                    (t, pick(from)?, pick(to)?)
                }
                (None, None) => return Err(usage("give an input file or --catalog")),
            };
            let d = spectral_distance(&triple, &phi, &psi, tol)?;
            emit(&d, common.json.as_deref())?;
            Ok(true)
        }
        Command::W1 { input, common } => {
            let (space, mu, nu) = match input {
                Some(path) => {
                    let req: W1Request = read_json(&path)?;
                    (req.space, req.mu, req.nu)
                }
                None => {
                    let lambda = common.lambda.unwrap_or(0.5);
                    let seg = FiniteMetricSpace::line(&[0.0, 1.0])?;
                    let m = Measure::bernoulli(lambda)?;
                    let origin = Measure::dirac(2, 0)?;
                    (ncgp::wasserstein::product_space(&seg, &seg)?, m.product(&m), origin.product(&origin))
                }
            };
            let result = w1(&space, &mu, &nu)?;
            emit(&result, common.json.as_deref())?;
            Ok(true)
        }
        Command::Khomology { common } => {
            let table = experiments::pairing_table(common.lambda.unwrap_or(1.0), common.mu.unwrap_or(1.0))
                .map_err(as_usage)?;
            for row in &table {
                out_line(&serde_json::to_string(row)?)?;
            }
            if let Some(path) = &common.json {
                write_json(path, &table)?;
            }
            Ok(true)
        }
    }
}

/// Input validation errors from the library become usage errors.
fn as_usage(e: anyhow::Error) -> anyhow::Error {
    let input = e.chain().any(is_input_error) || e.to_string().contains("must be") || e.to_string().contains("stated for");
    if input {
        usage(format!("{e:#}"))
    } else {
        e
    }
}

#[derive(Deserialize)]
struct DistanceRequest {
    triple: SpectralTriple,
    phi: State,
    psi: State,
}

#[derive(Deserialize)]
struct W1Request {
    space: FiniteMetricSpace,
    mu: Measure,
    nu: Measure,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("parsing {}: {e}", path.display())))
}

fn run_sweep(sweep: Sweep, lambda_steps: usize, common: &Common) -> Result<bool> {
    let timer = Timer::start();
    let mut out: Box<dyn std::io::Write> = match &common.csv {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let report = match sweep {
        Sweep::WassersteinRsquare => {
            if lambda_steps == 0 {
                return Err(usage("--lambda-steps must be at least 1"));
            }
            let tol = common.tol.unwrap_or(1e-9);
            let mut csv = csv::Writer::from_writer(&mut out);
            let mut worst: f64 = 0.0;
            let mut monotone = true;
            let mut last = f64::INFINITY;
            for k in 1..=lambda_steps {
                let lambda = k as f64 / lambda_steps as f64;
                let row = experiments::square_row(lambda)?;
                worst = worst.max((row.ratio - k_lambda(lambda)).abs());
                monotone &= row.ratio < last + tol;
                last = row.ratio;
                csv.serialize(&row)?;
            }
            csv.flush()?;
            let pass = worst <= tol && monotone;
            timer.report(
                "sweep-wasserstein-rsquare",
                common.seed,
                json!({"lambda_steps": lambda_steps}),
                json!({"ratio": "lambda + sqrt(2) * (1 - lambda)", "monotone": true}),
                json!({"max_ratio_error": worst, "monotone": monotone}),
                pass,
                tol,
            )
        }
        Sweep::ProductBounds => {
            let tol = common.tol.unwrap_or(1e-4);
            let trials = common.trials.unwrap_or(50);
            let rows = experiments::product_bounds(common.seed, trials, tol)?;
            let mut csv = csv::Writer::from_writer(&mut out);
            csv.write_record(["trial", "d_lower", "d_upper", "d1_lower", "d1_upper", "d2_lower", "d2_upper", "ok"])?;
            for r in &rows {
                let f = |v: f64| v.to_string();
                csv.write_record([
                    r.trial.to_string(),
                    f(r.d.lower),
                    f(r.d.upper),
                    f(r.d1.lower),
                    f(r.d1.upper),
                    f(r.d2.lower),
                    f(r.d2.upper),
                    r.ok.to_string(),
                ])?;
            }
            csv.flush()?;
            let violations = rows.iter().filter(|r| !r.ok).count();
            timer.report(
                "sweep-product-bounds",
                common.seed,
                json!({"trials": trials}),
                json!({"violations": 0}),
                json!({"violations": violations}),
                violations == 0,
                tol,
            )
        }
    };
    drop(out);
    eprintln!("{}", summary(&report));
    if let Some(path) = &common.json {
        write_json(path, &report)?;
    }
    Ok(report.pass)
}
