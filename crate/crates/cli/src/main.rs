//! `regsing`: command-line front end. Every command prints one JSON document.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use regsing_core::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "regsing", version, about = "Exact analysis of differential operators with regular singularities along walls")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Truncation order in the wall variables t.
    #[arg(long, global = true, default_value_t = 10)]
    pub trunc_t: u32,
    /// Truncation degree in the edge variables x.
    #[arg(long, global = true, default_value_t = 6)]
    pub trunc_x: i64,
    /// Truncation order in the parameter z (family).
    #[arg(long, global = true, default_value_t = 4)]
    pub z_order: i64,
    /// Output layout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the document to a file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Compact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Logs {
    Auto,
    Off,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Order, principal symbol, σ_* and the D_* test of an operator.
    Symbol {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Pairwise commutators of two or more operators.
    Commute {
        #[arg(num_args = 2.., required = true)]
        exprs: Vec<String>,
    },
    /// Indicial matrices, exponent candidates and resonances.
    Exponents {
        #[arg(required = true)]
        exprs: Vec<String>,
        /// Exponent vector, e.g. "1/3, 8/15".
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Largest |γ| searched for resonances.
        #[arg(long, default_value_t = 10)]
        bound: u32,
        /// Point x° for x-dependent indicial matrices.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
    },
    /// Series solutions at an exponent; the first operator drives the recursion.
    Solve {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long, required = true, allow_hyphen_values = true)]
        lambda: String,
        /// Whether to construct logarithmic solutions.
        #[arg(long, value_enum, default_value_t = Logs::Auto)]
        logs: Logs,
        /// Explicit boundary value, one x-polynomial per component.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// Solve, then check every operator of the system against each solution.
    Verify {
        #[arg(required = true)]
        exprs: Vec<String>,
        #[arg(long, required = true, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = Logs::Auto)]
        logs: Logs,
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// One-parameter family: per-exponent solutions, pole removal, z = 0 limits.
    Family {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// z-dependent exponent; repeat once per member.
        #[arg(long = "lambda", required = true, allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// Seed vector per member (default all ones).
        #[arg(long = "seed", allow_hyphen_values = true)]
        seeds: Vec<String>,
    },
    /// Splitting directions of a symbol and membership of a potential.
    Split {
        /// Coefficients c_0..c_m of Σ c_i ξ^{m-i} τ^i.
        #[arg(long, allow_hyphen_values = true)]
        symbol: String,
        /// Potential as a polynomial in x1, x2.
        #[arg(long, conflicts_with = "spec", allow_hyphen_values = true)]
        potential: Option<String>,
        /// Catalog potential, e.g. "trig_bc(C1=1/2)", Taylor expanded at --point.
        #[arg(long)]
        spec: Option<String>,
        /// Expansion point given by e^{x°_k}.
        #[arg(long, default_value = "2, 3", allow_hyphen_values = true)]
        point: String,
        /// Total degree of the membership test.
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// List catalog entries, or build one.
    Catalog { entry: Option<String> },
    /// Constant-coefficient module of the indicial system.
    Module {
        #[arg(required = true)]
        exprs: Vec<String>,
        /// Exponent at which to list the solution basis.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Starting degree bound for polynomial solutions.
        #[arg(long, default_value_t = 4)]
        degree: u32,
    },
}

/// Failure of a command: usage (exit 2) or mathematical (exit 1).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::VarMismatch(_) | Error::SizeMismatch(_) => Failure::Usage(e.to_string()),
            other => Failure::Math(other),
        }
    }
}

/// Result fields plus the pass flag that decides the exit code.
pub struct Outcome {
    pub fields: Map<String, Value>,
    pub pass: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("REGSING_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("REGSING_THREADS must be a positive integer, got '{}'", v))?;
    if n == 0 {
        return Err("REGSING_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn verb(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Symbol { .. } => "symbol",
        Cmd::Commute { .. } => "commute",
        Cmd::Exponents { .. } => "exponents",
        Cmd::Solve { .. } => "solve",
        Cmd::Verify { .. } => "verify",
        Cmd::Family { .. } => "family",
        Cmd::Split { .. } => "split",
        Cmd::Catalog { .. } => "catalog",
        Cmd::Module { .. } => "module",
    }
}

fn error_value(f: &Failure) -> Value {
    match f {
        Failure::Usage(msg) => json!({ "kind": "usage", "message": msg }),
        Failure::Math(Error::Resonance(r)) => json!({ "kind": "resonance", "message": Error::Resonance(r.clone()).to_string(), "report": r }),
        Failure::Math(e) => json!({ "kind": "math", "message": e.to_string() }),
    }
}

fn emit(cli: &Cli, doc: &Value) -> std::io::Result<()> {
    let mut text = match cli.format {
        Format::Json => serde_json::to_string_pretty(doc).expect("JSON values serialize"),
        Format::Compact => serde_json::to_string(doc).expect("JSON values serialize"),
    };
    text.push('\n');
    match &cli.output {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("regsing: {}", msg);
        return ExitCode::from(2);
    }
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(verb(&cli.cmd)));
    doc.insert("truncation".into(), json!({ "t": cli.trunc_t, "x": cli.trunc_x, "z": cli.z_order }));
    let code = match commands::run(&cli) {
        Ok(out) => {
            doc.extend(out.fields);
            doc.insert("pass".into(), json!(out.pass));
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(f) => {
            doc.insert("pass".into(), json!(false));
            doc.insert("error".into(), error_value(&f));
            match f {
                Failure::Usage(_) => 2,
                Failure::Math(_) => 1,
            }
        }
    };
    if let Err(e) = emit(&cli, &Value::Object(doc)) {
        eprintln!("regsing: cannot write output: {}", e);
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
