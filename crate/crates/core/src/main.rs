#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use polysu11::coherent::{build_state, DEFAULT_TOL};
use polysu11::report::{run_verification, Tolerances, VerifyConfig, DEFAULT_GAMMA, DEFAULT_SEED};
use polysu11::susy::{grid_spectrum, Partner, DEFAULT_POINTS, DEFAULT_R_MAX};
use polysu11::unity::{weight_table, write_weight_csv};
use polysu11::{AlgebraSpec, Error, Family, OscillatorParams};

#[derive(Parser)]
#[command(name = "polysu11", version, about = "Deformed su(1,1) coherent states and the cubic radial oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Bg,
    P,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Bg => Family::Bg,
            FamilyArg::P => Family::P,
        }
    }
}

/// Algebra selection: explicit coefficients, or the cubic algebra of `--gamma`.
#[derive(clap::Args)]
struct SpecArgs {
    /// Degree of the structure function; must match the number of coefficients.
    #[arg(long)]
    p: Option<usize>,
    /// Comma-separated coefficients α_1..α_p.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Bargmann index.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite and write a JSON report.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Oscillator parameter for the spectrum, ladder and weight checks.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 32)]
        trunc: usize,
        #[arg(long)]
        json: PathBuf,
    },
    /// Tabulate weight densities of the cubic algebra for several γ.
    Weights {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        gamma: Vec<f64>,
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
        /// Grid points per γ, from t = 1e-3 to tmax.
        #[arg(long, default_value_t = 400)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump coherent-state coefficients as CSV.
    States {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Label as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        zeta: String,
        #[command(flatten)]
        spec: SpecArgs,
        /// Use the cubic algebra of this oscillator parameter instead of --alpha.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic and finite-difference spectra of both partners as JSON.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Defaults to the cubic point -γ-1/2.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = DEFAULT_R_MAX)]
        r_max: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_)
            | Error::Parameter(_)
            | Error::Domain { .. }
            | Error::OutsideDisk { .. }
            | Error::NonPositiveFactor { .. } => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(format!("i/o error: {e}"))
    }
}

fn resolve_spec(args: &SpecArgs, gamma: Option<f64>) -> Result<AlgebraSpec, Failure> {
    match (&args.alpha, args.k, gamma) {
        (Some(alpha), Some(k), _) => {
            if let Some(p) = args.p {
                if p != alpha.len() {
                    return Err(Failure::Usage(format!("--p {p} does not match {} coefficients", alpha.len())));
                }
            }
            Ok(AlgebraSpec::new(alpha.clone(), k)?)
        }
        (None, None, Some(g)) if args.p.is_none() => Ok(OscillatorParams::at_cubic_point(g)?.cubic_algebra_spec()?),
        _ => Err(Failure::Usage("give --alpha and --k, or --gamma alone".into())),
    }
}

fn parse_zeta(raw: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = raw.split(',').collect();
    let bad = || Failure::Usage(format!("--zeta expects re,im; got {raw:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let im: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

#[derive(Serialize)]
struct LevelRow {
    n: usize,
    analytic: f64,
    grid_plus: f64,
    grid_minus: f64,
}

#[derive(Serialize)]
struct SpectrumOut {
    gamma: f64,
    epsilon: f64,
    levels: Vec<LevelRow>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { spec, gamma, trunc, json } => {
            let spec = resolve_spec(&spec, if spec.alpha.is_none() { gamma } else { None })?;
            let cfg = VerifyConfig {
                spec,
                gamma: gamma.unwrap_or(DEFAULT_GAMMA),
                trunc,
                seed: DEFAULT_SEED,
                tolerances: Tolerances::from_env()?,
            };
            let report = run_verification(&cfg)?;
            let mut out = writer(Some(&json))?;
            serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Failure::Check(e.to_string()))?;
            writeln!(out)?;
            out.flush()?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            if !failed.is_empty() {
                return Err(Failure::Check(format!("failed checks: {}", failed.join(", "))));
            }
        }
        Command::Weights { family, gamma, tmax, steps, out } => {
            if steps < 2 || !(tmax > 1e-3) {
                return Err(Failure::Usage("need --steps >= 2 and --tmax > 1e-3".into()));
            }
            let grid: Vec<f64> = (0..steps)
                .map(|i| 1e-3 + (tmax - 1e-3) * i as f64 / (steps - 1) as f64)
                .collect();
            let rows = weight_table(&family.into(), &gamma, &grid)?;
            let mut w = writer(Some(&out))?;
            write_weight_csv(&rows, &mut w)?;
            w.flush()?;
            let negative = rows.iter().filter(|r| !(r.rho >= 0.0)).count();
            if negative > 0 {
                return Err(Failure::Check(format!("{negative} negative or undefined densities")));
            }
        }
        Command::States { family, zeta, spec, gamma, tol, out } => {
            let spec = resolve_spec(&spec, gamma)?;
            let state = build_state(&spec, family.into(), parse_zeta(&zeta)?, tol)?;
            let mut w = writer(out.as_deref())?;
            state.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Spectrum { gamma, epsilon, levels, r_max, points, out } => {
            let params = match epsilon {
                Some(e) => OscillatorParams::new(gamma, e)?,
                None => OscillatorParams::at_cubic_point(gamma)?,
            };
            let plus = grid_spectrum(&params, Partner::Plus, r_max, points, levels)?;
            let minus = grid_spectrum(&params, Partner::Minus, r_max, points, levels)?;
            for w in plus.warning.iter().chain(minus.warning.iter()) {
                eprintln!("warning: {w}");
            }
            let report = SpectrumOut {
                gamma,
                epsilon: params.epsilon,
                levels: (0..levels)
                    .map(|n| LevelRow {
                        n,
                        analytic: params.general_level(n),
                        grid_plus: plus.levels[n],
                        grid_minus: minus.levels[n],
                    })
                    .collect(),
            };
            let mut w = writer(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Check(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
