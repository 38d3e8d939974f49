use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuplength::cupalg::THREADS_ENV;
use cuplength_cli::{run, Command, Format, JobConfig};

/// Persistent cup-length invariants of filtered simplicial complexes.
///
/// Complex inputs are a filtration file (`grade v0 v1 …` per line), a
/// distance matrix `.csv` (built into a Vietoris-Rips filtration) or
/// `fixture:<name>`. Function inputs to `erosion` may also be a JSON
/// function or diagram, or `preset:vr-torus[:N]`, `preset:vr-circle[:N]`,
/// `preset:vr-wedge-lower`.
#[derive(Parser, Debug)]
#[command(name = "cuplength", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Vietoris-Rips filtration of a distance matrix, as JSON.
    Vr(One),
    /// Barcode with representative cocycles.
    Barcode(One),
    /// Persistent cup-length diagram.
    CupDiagram(One),
    /// Persistent cup-length function.
    CupFunction(One),
    /// Erosion distance between two cup-length functions.
    Erosion(Two),
    /// Compare the pipeline with the brute-force oracle; exits 1 on mismatch.
    OracleCheck(One),
    /// SVG of the diagram and function above the diagonal.
    Plot(One),
}

#[derive(Args, Debug)]
struct One {
    input: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Two {
    first: String,
    second: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Largest cohomological degree k.
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Vietoris-Rips scale cap for distance-matrix inputs.
    #[arg(long, default_value_t = f64::INFINITY)]
    max_scale: f64,
    /// Drop bars shorter than this before forming products.
    #[arg(long = "trim", default_value_t = 0.0)]
    trim_eps: f64,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Svg,
}

fn config(cmd: Cmd) -> JobConfig {
    let (command, inputs, common) = match cmd {
        Cmd::Vr(a) => (Command::Vr, vec![a.input], a.common),
        Cmd::Barcode(a) => (Command::Barcode, vec![a.input], a.common),
        Cmd::CupDiagram(a) => (Command::CupDiagram, vec![a.input], a.common),
        Cmd::CupFunction(a) => (Command::CupFunction, vec![a.input], a.common),
        Cmd::Erosion(a) => (Command::Erosion, vec![a.first, a.second], a.common),
        Cmd::OracleCheck(a) => (Command::OracleCheck, vec![a.input], a.common),
        Cmd::Plot(a) => (Command::Plot, vec![a.input], a.common),
    };
    JobConfig {
        command,
        inputs,
        max_dim: common.max_dim,
        max_scale: common.max_scale,
        trim_eps: common.trim_eps,
        format: common.format.map(|f| match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
        }),
        output: common.output,
        threads: std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n: &usize| n > 0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&config(cli.command)) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                if !msg.contains(&s.to_string()) {
                    msg.push_str(&format!(": {s}"));
                }
                source = s.source();
            }
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
