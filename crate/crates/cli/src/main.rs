use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ncdx_core::exact::parse_rat;
use ncdx_core::job::{run_job, JobOptions, Mode};
use ncdx_core::Error;
use serde_json::json;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Rank1,
    Airy,
    Jordan,
    Quasidet,
    Verify,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Rank1 => Mode::Rank1,
            ModeArg::Airy => Mode::Airy,
            ModeArg::Jordan => Mode::Jordan,
            ModeArg::Quasidet => Mode::Quasidet,
            ModeArg::Verify => Mode::Verify,
        }
    }
}

/// Construct and verify matrix bispectral Darboux transformations exactly.
///
/// Exit status: 0 when every check has zero residual, 1 when a check fails,
/// 2 for malformed input, 3 when a mathematical precondition is violated.
#[derive(Debug, Parser)]
#[command(name = "ncdx", version)]
struct Args {
    /// Job type.
    #[arg(value_enum)]
    mode: ModeArg,
    /// JSON job document.
    #[arg(long)]
    input: PathBuf,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a LaTeX rendering.
    #[arg(long)]
    latex: Option<PathBuf>,
    /// Override alpha_0 of the Airy operator, e.g. "-1" or "2/3".
    #[arg(long, allow_hyphen_values = true)]
    alpha0: Option<String>,
    /// Emit only the verification report.
    #[arg(long)]
    check_only: bool,
}

fn diagnose(kind: &str, message: &str, code: u8) -> ExitCode {
    let d = json!({ "error": kind, "message": message, "exit_code": code });
    eprintln!("{d}");
    ExitCode::from(code)
}

fn write_or_fail(path: &PathBuf, text: &str) -> Result<(), ExitCode> {
    fs::write(path, text).map_err(|e| diagnose("Io", &format!("cannot write {}: {e}", path.display()), 2))
}

fn run(args: Args) -> Result<ExitCode, ExitCode> {
    let input = fs::read_to_string(&args.input)
        .map_err(|e| diagnose("Io", &format!("cannot read {}: {e}", args.input.display()), 2))?;
    let alpha0 = args
        .alpha0
        .as_deref()
        .map(parse_rat)
        .transpose()
        .map_err(|e| diagnose(e.kind(), &e.to_string(), 2))?;
    let opts = JobOptions {
        alpha0,
        check_only: args.check_only,
    };
    let out = run_job(args.mode.into(), &input, &opts).map_err(|e: Error| {
        diagnose(e.kind(), &e.to_string(), e.exit_code() as u8)
    })?;
    let doc = out.render();
    match &args.output {
        Some(p) => write_or_fail(p, &doc)?,
        None => print!("{doc}"),
    }
    if let Some(p) = &args.latex {
        write_or_fail(p, &out.latex)?;
    }
    if out.all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Err(diagnose("VerificationFailed", "a verification check has a nonzero residual", 1))
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(c) | Err(c) => c,
    }
}
