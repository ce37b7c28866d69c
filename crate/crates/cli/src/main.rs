//! `phodge`: JSON front end for the phodge library.
//!
//! Every command reads JSON documents given with `-i` and writes one JSON
//! document to `-o` (standard output by default). Exit status is 0 on
//! success, 1 when a verification property fails or the library reports
//! an internal inconsistency, 2 on bad input.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use phodge::cartier::{cartier_op, hp, kernel_unit, solve_hp};
use phodge::connection::{dlog, pcurv};
use phodge::harmonic::{cinv, cmap, inverse, solve_harmonic};
use phodge::hitchin::{char_invariants, phitchin};
use phodge::json;
use phodge::verify::{self, Params, Suite};
use phodge::{Error, FieldSpec};

#[derive(Parser)]
#[command(name = "phodge", version, about = "Exact p-curvature, p-Hitchin map, Cartier descent and the Higgs/de Rham correspondence on a formal disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input document; repeat for commands taking several inputs.
    #[arg(short = 'i', long = "input", global = true)]
    inputs: Vec<PathBuf>,

    /// Output file, `-` for standard output.
    #[arg(short = 'o', long = "output", global = true, default_value = "-")]
    output: String,

    /// Characteristic. For `verify` a comma-separated list; elsewhere the
    /// default field for inputs without a header.
    #[arg(long = "p", global = true)]
    p: Option<String>,

    /// Comma-separated ranks for `verify`.
    #[arg(long, global = true)]
    rank: Option<String>,

    /// Precision for `verify` (default depends on the suite and p).
    #[arg(long, global = true)]
    precision: Option<usize>,

    /// Trials per (p, rank) for `verify`.
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,

    /// Seed for `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Suite for `verify`.
    #[arg(long, global = true, default_value = "all")]
    suite: String,

    /// JSON output (the only mode; accepted for compatibility).
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// p-curvature of a connection.
    Pcurv,
    /// Characteristic invariants of a matrix.
    Invariants,
    /// p-Hitchin image of a connection.
    Phitchin,
    /// Cartier operator on a one-form.
    Cartier,
    /// h_p on a one-form.
    Hp,
    /// Canonical preimage under h_p of a twisted one-form.
    SolveHp,
    /// Logarithmic derivative of a unit series; given a one-form instead,
    /// the unit whose logarithmic derivative it is.
    Dlog,
    /// Frobenius descent of a p-th power series.
    Descend,
    /// Harmonic datum, Higgs field and gauge for a connection.
    SolveHarmonic,
    /// Connection attached to a harmonic datum and a Higgs field.
    Cmap,
    /// Higgs field attached to a connection and a harmonic datum.
    Cinv,
    /// Randomized verification suites.
    Verify,
}

enum Failure {
    Lib(Error),
    Io { path: String, message: String },
    Usage(String),
    PropertyFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_internal() => 1,
            Failure::PropertyFailed(_) => 1,
            _ => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (code, message, details) = match self {
            Failure::Lib(e) => (e.code().to_string(), e.to_string(), e.details()),
            Failure::Io { path, message } => ("IoError".into(), format!("{path}: {message}"), json!({"path": path})),
            Failure::Usage(m) => ("UsageError".into(), m.clone(), json!({})),
            Failure::PropertyFailed(m) => ("PropertyFailed".into(), m.clone(), json!({})),
        };
        json!({"error": {"code": code, "message": message, "details": details}})
    }
}

fn read_inputs(cli: &Cli, min: usize, max: usize) -> Result<Vec<String>, Failure> {
    let n = cli.inputs.len();
    if n < min || n > max {
        let want = if min == max { format!("{min}") } else { format!("{min} to {max}") };
        return Err(Failure::Usage(format!("expected {want} input file(s) via -i, got {n}")));
    }
    cli.inputs
        .iter()
        .map(|p| {
            fs::read_to_string(p).map_err(|e| Failure::Io { path: p.display().to_string(), message: e.to_string() })
        })
        .collect()
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| Failure::Usage(format!("bad {what} value {s:?}"))))
        .collect()
}

fn default_field(cli: &Cli) -> Result<Option<FieldSpec>, Failure> {
    match &cli.p {
        None => Ok(None),
        Some(text) => match list::<u64>(text, "--p")?.as_slice() {
            [p] => Ok(Some(FieldSpec::prime(*p)?)),
            _ => Err(Failure::Usage("--p takes a single prime outside verify".into())),
        },
    }
}

fn warn_small_p(p: u32, rank: usize) {
    if (p as usize) <= rank {
        eprintln!("warning: p = {p} does not exceed the rank {rank}; results are exact but outside the range p > n");
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let field = if matches!(cli.command, Command::Verify) { None } else { default_field(cli)? };
    match cli.command {
        Command::Pcurv => {
            let nabla = json::decode_connection(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_fhiggs(&pcurv(&nabla)?))
        }
        Command::Invariants => {
            let (m, w) = json::decode_weighted_matrix(&read_inputs(cli, 1, 1)?[0], field)?;
            warn_small_p(m.field().p(), m.rank());
            Ok(json::encode_invariant_tuple(&char_invariants(&m)?.with_twist_weight(w)))
        }
        Command::Phitchin => {
            let nabla = json::decode_connection(&read_inputs(cli, 1, 1)?[0], field)?;
            warn_small_p(nabla.p(), nabla.rank());
            Ok(json::encode_invariant_tuple(&phitchin(&nabla)?))
        }
        Command::Cartier => {
            let w = json::decode_one_form(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_twist_form(&cartier_op(&w)))
        }
        Command::Hp => {
            let w = json::decode_one_form(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_twist_form(&hp(&w)?))
        }
        Command::SolveHp => {
            let eta = json::decode_twist_form(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_one_form(&solve_hp(&eta)?))
        }
        Command::Dlog => {
            // a series document is a unit to differentiate; a one-form
            // document asks for the unit whose dlog it is
            let text = &read_inputs(cli, 1, 1)?[0];
            let is_form = serde_json::from_str::<Value>(text).ok().is_some_and(|v| v.get("coefficient").is_some());
            if is_form {
                let w = json::decode_one_form(text, field)?;
                Ok(json::encode_series(&kernel_unit(&w)?))
            } else {
                let g = json::decode_series_doc(text, field)?;
                Ok(json::encode_one_form(&phodge::cartier::OneForm::new(dlog(&g)?)?))
            }
        }
        Command::Descend => {
            let s = json::decode_series_doc(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_series(&s.descend_pth_power()?))
        }
        Command::SolveHarmonic => {
            let nabla = json::decode_connection(&read_inputs(cli, 1, 1)?[0], field)?;
            Ok(json::encode_package(&solve_harmonic(&nabla)?))
        }
        Command::Cmap => {
            let inputs = read_inputs(cli, 1, 2)?;
            let (h, higgs) = if inputs.len() == 1 {
                let pkg = json::decode_package(&inputs[0], field)?;
                (pkg.harmonic, pkg.higgs)
            } else {
                (json::decode_harmonic_datum(&inputs[0], field)?, json::decode_higgs_side(&inputs[1], field)?)
            };
            Ok(json::encode_connection(&cmap(&h, &higgs)?))
        }
        Command::Cinv => {
            let inputs = read_inputs(cli, 1, 2)?;
            let (nabla, h) = if inputs.len() == 1 {
                let pkg = json::decode_package(&inputs[0], field)?;
                (pkg.connection, pkg.harmonic)
            } else {
                (json::decode_connection(&inputs[0], field)?, json::decode_harmonic_datum(&inputs[1], field)?)
            };
            let h = if h.is_inverse() { h } else { inverse(&h) };
            Ok(json::encode_cinv(&cinv(&nabla, &h)?))
        }
        Command::Verify => {
            read_inputs(cli, 0, 0)?;
            let suite = Suite::parse(&cli.suite).ok_or_else(|| Failure::Usage(format!("unknown suite {:?}", cli.suite)))?;
            let params = Params {
                p: list(cli.p.as_deref().unwrap_or("2,3,5"), "--p")?,
                rank: list(cli.rank.as_deref().unwrap_or("1,2"), "--rank")?,
                precision: cli.precision,
                trials: cli.trials,
                seed: cli.seed,
            };
            let report = verify::run(suite, &params)?;
            if report.passed() {
                Ok(report.to_json())
            } else {
                Err(Failure::PropertyFailed(report.to_json()))
            }
        }
    }
}

fn emit(target: &str, text: &str) -> Result<(), Failure> {
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush())
    } else {
        fs::write(target, text)
    }
    .map_err(|e| Failure::Io { path: target.to_string(), message: e.to_string() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match execute(&cli) {
        Ok(text) => (text, 0),
        // a failing report is still the command's output
        Err(Failure::PropertyFailed(report)) => (report, 1),
        Err(f) => {
            let mut s = serde_json::to_string_pretty(&f.to_json()).expect("error documents serialize");
            s.push('\n');
            (s, f.exit_code())
        }
    };
    match emit(&cli.output, &text) {
        Ok(()) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(2)
        }
    }
}
