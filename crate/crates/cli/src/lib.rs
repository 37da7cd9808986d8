//! Command-line front end: catalog building, per-type reports, table reproduction and the
//! general-position search.
//!
//! Exit codes are 0 on success, 1 on any error, and 2 when a search exhausts without a witness.
//! Errors go to stderr as a single JSON object.

pub mod config;
pub mod reports;
pub mod store;
pub mod table;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use delpezzo::genpos::{self, BlowupProfile, SearchOutcome};
use delpezzo::lattice::{self, BasisKind};
use delpezzo::matrix::IntMatrix;
use delpezzo::weyl;
use reports::Context;
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use table::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("catalog not found: {0}")]
    MissingCatalog(String),
    #[error("{0}")]
    BadCatalog(String),
    #[error("{0}")]
    BadMatrix(String),
    #[error("type {0} is not determined by the catalog anchors")]
    Unanchored(u32),
    #[error("{0}")]
    Module(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::MissingCatalog(_) => "missing_catalog",
            CliError::BadCatalog(_) => "bad_catalog",
            CliError::BadMatrix(_) => "bad_matrix",
            CliError::Unanchored(_) => "unanchored_type",
            CliError::Module(_) => "module",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "delpezzo", version, about = "Frobenius types of degree-1 del Pezzo surfaces over finite fields")]
pub struct Cli {
    /// Plain key=value file; keys are long flag names. Flags given here win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discover, anchor and save the 112 classes.
    Catalog {
        #[arg(long, default_value_t = store::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = store::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Signature report for a matrix or a type number.
    Classify {
        #[arg(long, value_name = "FILE", conflicts_with = "type_number", required_unless_present = "type_number")]
        matrix: Option<PathBuf>,
        #[arg(long = "type", value_name = "T")]
        type_number: Option<u32>,
        #[command(flatten)]
        catalog: CatalogArg,
    },
    /// Report for a minimal conic-bundle type.
    Conic {
        #[arg(long = "type", value_name = "T")]
        conic_type: u8,
    },
    /// Bertini twist pairing.
    Twist {
        #[command(flatten)]
        catalog: CatalogArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Transition thresholds of the conic types, or degree-2 existence scans.
    Thresholds {
        #[arg(long)]
        deg2_all: bool,
        #[command(flatten)]
        catalog: CatalogArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search for closed points in general position.
    Genpos {
        #[arg(long)]
        q: u64,
        /// Degrees of the closed points, comma separated, summing to 8.
        #[arg(long, value_delimiter = ',', required = true)]
        profile: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the outcome to this file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Reproduce a table.
    Tables {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        catalog: CatalogArg,
    },
}

#[derive(Debug, Args)]
pub struct CatalogArg {
    /// Catalog file written by `catalog`. Without it the default catalog is built in memory.
    #[arg(long = "catalog", value_name = "PATH")]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Orders,
    Types,
    Twists,
    Dp2,
    Existence,
    Blowup,
    Thresholds,
}

/// Parses `args` (without the program name), runs the command and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let result = with_config(args).and_then(|argv| {
        match Cli::try_parse_from(std::iter::once("delpezzo".to_string()).chain(argv)) {
            Ok(cli) => execute(cli, out, err),
            Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
                let _ = write!(out, "{e}");
                Ok(EXIT_OK)
            }
            Err(e) => Err(CliError::Usage(e.render().to_string().trim().to_string())),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", json!({ "error": e.kind(), "message": e.to_string() }));
            EXIT_ERROR
        }
    }
}

/// Folds the config file, if any, into the argument list.
fn with_config(mut args: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = Some(args.get(i + 1).ok_or_else(|| CliError::Usage("--config needs a path".into()))?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let entries = config::read(Path::new(&path))?;
    let cmd = Cli::command();
    let Some(sub) = args.iter().find_map(|a| cmd.find_subcommand(a)) else { return Ok(args) };
    let known: Vec<(String, bool)> = sub
        .get_arguments()
        .filter_map(|a| a.get_long().map(|l| (l.to_string(), a.get_action().takes_values())))
        .collect();
    config::merge(&mut args, &entries, &known)?;
    Ok(args)
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

fn emit_text(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

fn context(arg: &CatalogArg, err: &mut dyn Write) -> Result<Context, CliError> {
    let file = match &arg.path {
        Some(p) => {
            let (file, rebuilt) = store::load(p)?;
            if rebuilt {
                let _ = writeln!(err, "{}", json!({ "warning": "stale catalog rebuilt", "path": p.display().to_string() }));
            }
            file
        }
        None => store::build(store::DEFAULT_SEED, store::DEFAULT_BUDGET)?,
    };
    Context::new(&file)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Rows(Vec<Vec<i64>>),
    Tagged { basis: Basis, rows: Vec<Vec<i64>> },
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum Basis {
    Standard,
    Conic,
}

fn read_matrix(path: &Path) -> Result<weyl::LatticeAut, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let input: MatrixInput = serde_json::from_str(&text).map_err(|e| CliError::BadMatrix(e.to_string()))?;
    let (basis, rows) = match input {
        MatrixInput::Rows(r) => (Basis::Standard, r),
        MatrixInput::Tagged { basis, rows } => (basis, rows),
    };
    if rows.len() != 9 || rows.iter().any(|r| r.len() != 9) {
        return Err(CliError::BadMatrix("expected a 9x9 matrix".into()));
    }
    let ctx = match basis {
        Basis::Standard => lattice::standard(1),
        Basis::Conic => lattice::conic(),
    };
    let a = weyl::validate_aut(&ctx, IntMatrix::from_rows(&rows)).map_err(|e| CliError::BadMatrix(e.to_string()))?;
    Ok(a.in_basis(BasisKind::Standard))
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Catalog { seed, budget, out: path } => {
            let file = store::build(seed, budget)?;
            store::write(&file, &path)?;
            emit(out, &reports::catalog_summary(&file, &path.display().to_string(), false))?;
        }
        Command::Classify { matrix, type_number, catalog } => {
            let ctx = context(&catalog, err)?;
            let a = match (matrix, type_number) {
                (Some(p), _) => read_matrix(&p)?,
                (None, Some(t)) => ctx.representative(t)?,
                (None, None) => return Err(CliError::Usage("give --matrix or --type".into())),
            };
            emit(out, &reports::classify(&a, Some(&ctx)))?;
        }
        Command::Conic { conic_type } => emit(out, &reports::conic(conic_type)?)?,
        Command::Twist { catalog, format } => {
            let ctx = context(&catalog, err)?;
            emit_text(out, &reports::twists(&ctx).render(format))?;
        }
        Command::Thresholds { deg2_all, catalog, format } => {
            if deg2_all {
                let ctx = context(&catalog, err)?;
                emit(out, &reports::deg2_all(&ctx))?;
            } else {
                emit_text(out, &reports::thresholds().render(format))?;
            }
        }
        Command::Genpos { q, profile, seed, out: path } => {
            let p = BlowupProfile::new(&profile).map_err(|e| CliError::Usage(e.to_string()))?;
            let outcome = genpos::search_profile(q, &p, seed).map_err(|e| CliError::Module(e.to_string()))?;
            let (value, code) = match &outcome {
                SearchOutcome::Witness(w) => {
                    let check = genpos::blowup_point_count_check(w).map_err(|e| CliError::Module(e.to_string()))?;
                    (json!({ "outcome": "witness", "seed": seed, "witness": w, "point_count": check }), EXIT_OK)
                }
                SearchOutcome::Exhausted { nodes } => (
                    json!({ "outcome": "exhausted", "q": q, "profile": p.degrees, "seed": seed, "nodes": nodes }),
                    EXIT_EXHAUSTED,
                ),
            };
            if let Some(path) = path {
                let text = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
                std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            emit(out, &value)?;
            return Ok(code);
        }
        Command::Tables { which, format, catalog } => {
            let t = match which {
                Which::Orders => reports::orders(),
                Which::Types => reports::conic_types(),
                Which::Blowup => reports::blowups(),
                Which::Thresholds => reports::thresholds(),
                Which::Twists => reports::twists(&context(&catalog, err)?),
                Which::Dp2 => reports::degree_two(&context(&catalog, err)?),
                Which::Existence => reports::existence(&context(&catalog, err)?),
            };
            emit_text(out, &t.render(format))?;
        }
    }
    Ok(EXIT_OK)
}
