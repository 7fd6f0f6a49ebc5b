use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use horn_core::isometry::classify;
use horn_core::linalg::{matrix_json, GroupElement, HermitianForm, Tolerances};
use horn_core::oracle::{find_witness, verify_grid, OracleError, SamplerConfig};
use horn_core::parse::{parse_pair, parse_tau, ParseError};
use horn_core::polytopes::{cell_table, polytope_member};
use horn_core::slice::{render_slice, SliceSpec};
use horn_core::walls::{active_walls, default_wall_tol, wall_catalog};

#[derive(Parser)]
#[command(name = "horn", version, about = "Elliptic multiplicative Horn problem in PU(2,1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a matrix given as JSON (argument, @file, or stdin).
    Classify {
        input: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Membership report for a class triple.
    Member {
        #[arg(long)]
        tau: String,
        /// Closure tolerance on the linear forms.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Reducible walls through a triple, or the whole catalog without --tau.
    Walls {
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The 28 cells with their inequality systems.
    Cells,
    /// Render a slice as SVG.
    Slice {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for matrices realizing a triple.
    Construct {
        #[arg(long)]
        tau: String,
        #[command(flatten)]
        sampler: SamplerArgs,
        /// Class distance that triggers local polishing.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// Compare predicted membership with witness search on a grid over a slice.
    Verify {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value_t = 12)]
        grid: usize,
        #[command(flatten)]
        sampler: SamplerArgs,
        /// Minimum distance from walls and chamber faces.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SliceArgs {
    /// Symmetric slice: all three classes equal.
    #[arg(long, conflicts_with_all = ["beta", "gamma"])]
    sym: bool,
    #[arg(long, requires = "gamma")]
    beta: Option<String>,
    #[arg(long, requires = "beta")]
    gamma: Option<String>,
    #[arg(long, default_value_t = SliceSpec::DEFAULT_RESOLUTION as u64, value_parser = clap::value_parser!(u64).range(16..))]
    res: u64,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, env = "HORN_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
}

impl SamplerArgs {
    fn config(&self, tol: f64) -> SamplerConfig {
        SamplerConfig { seed: self.seed, budget: self.samples, tol, ..Default::default() }
    }
}

enum Failure {
    Parse(String),
    Domain(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e.to_string())
    }
}

fn slice_spec(a: &SliceArgs) -> Result<SliceSpec, Failure> {
    let spec = match (&a.beta, &a.gamma) {
        (Some(b), Some(g)) => SliceSpec::fixed(parse_pair(b)?, parse_pair(g)?),
        _ if a.sym => SliceSpec::symmetric(),
        _ => return Err(Failure::Parse("choose --sym or both --beta and --gamma".into())),
    };
    Ok(spec.with_resolution(a.res as usize))
}

fn read_input(input: Option<String>) -> Result<String, Failure> {
    match input.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Parse(e.to_string()))?;
            Ok(s)
        }
        Some(path) if path.starts_with('@') => {
            std::fs::read_to_string(&path[1..]).map_err(|e| Failure::Parse(format!("{}: {e}", &path[1..])))
        }
        Some(text) => Ok(text.to_string()),
    }
}

/// Accepts a bare row-major matrix or `{"matrix": .., "form": ..}`.
fn parse_element(text: &str) -> Result<GroupElement, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::Parse(e.to_string()))?;
    let bad = |e: serde_json::Error| Failure::Parse(e.to_string());
    let (m, form) = match v.get("matrix") {
        Some(m) => (m.clone(), v.get("form").cloned()),
        None => (v, None),
    };
    let m = matrix_json::from_value(&m).map_err(bad)?;
    let form = match form {
        None => HermitianForm::standard(),
        Some(f) => HermitianForm::new(matrix_json::from_value(&f).map_err(bad)?, 1e-9)
            .map_err(|e| Failure::Domain(e.to_string()))?,
    };
    Ok(GroupElement::from_parts(m, form))
}

fn emit(v: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
        None => write_stdout(&(text + "\n")),
    }
}

/// A closed pipe (`horn walls | head`) is not an error.
fn write_stdout(text: &str) -> Result<(), Failure> {
    match std::io::stdout().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Domain(e.to_string())),
        _ => Ok(()),
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify { input, tol } => {
            let g = parse_element(&read_input(input)?)?;
            let tols = Tolerances { unitary: tol, ..Default::default() };
            let cls = classify(&g, &tols).map_err(|e| Failure::Domain(e.to_string()))?;
            emit(&to_json(&cls), None)
        }
        Command::Member { tau, tol } => {
            let t = parse_tau(&tau)?;
            emit(&to_json(&polytope_member(&t, tol)), None)
        }
        Command::Walls { tau: None, .. } => {
            let rows: Vec<Value> = wall_catalog().iter().map(|w| json!({"name": w.name(), "wall": w})).collect();
            emit(&Value::Array(rows), None)
        }
        Command::Walls { tau: Some(tau), tol } => {
            let t = parse_tau(&tau)?;
            let tol = tol.unwrap_or_else(|| default_wall_tol(&t));
            let rows: Vec<Value> = active_walls(&t, tol)
                .into_iter()
                .map(|(w, r)| json!({"name": w.name(), "residual": r, "wall": w}))
                .collect();
            emit(&Value::Array(rows), None)
        }
        Command::Cells => emit(&to_json(&cell_table()), None),
        Command::Slice { slice, out } => {
            let svg = render_slice(&slice_spec(&slice)?);
            match out {
                Some(p) => std::fs::write(&p, svg).map_err(|e| Failure::Domain(format!("{}: {e}", p.display()))),
                None => write_stdout(&svg),
            }
        }
        Command::Construct { tau, sampler, tol } => {
            let t = parse_tau(&tau)?;
            match find_witness(&t, &sampler.config(tol)) {
                Ok(w) => emit(&to_json(&w), None),
                Err(e) => {
                    let body = match &e {
                        OracleError::NotFound { samples, best_distance } => {
                            json!({"not_found": {"samples": samples, "best_distance": best_distance}})
                        }
                        OracleError::Degenerate(n) => json!({"degenerate": n}),
                    };
                    emit(&body, None)?;
                    Err(Failure::Domain(e.to_string()))
                }
            }
        }
        Command::Verify { slice, grid, sampler, tol, out } => {
            let spec = slice_spec(&slice)?;
            let report = verify_grid(&spec, grid, &sampler.config(SamplerConfig::default().tol), tol);
            emit(&to_json(&report), out.as_ref())?;
            if report.is_consistent() {
                Ok(())
            } else {
                Err(Failure::Domain("grid verification found inconsistencies".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("horn: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("horn: {msg}");
            ExitCode::from(2)
        }
    }
}
