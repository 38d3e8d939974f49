use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use cuplength::cohomology::zero_dim_bars;
use cuplength::invariants::{analytic_vr_circle, analytic_vr_torus, analytic_vr_wedge_lower};
use cuplength::{
    build_vietoris_rips, erosion_distance, fixtures, oracle, reconstruct, run_pipeline, ComplexError, CupDiagram,
    CupDiagramOptions, CupFunction, FilteredComplex, Interval,
};
use thiserror::Error;

use crate::io::{load_distance_csv, load_filtered_complex, LoadError};
use crate::json::{self, BarcodeJson, ComplexJson, ErosionJson, JsonError};
use crate::plot::render_svg;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Vr,
    Barcode,
    CupDiagram,
    CupFunction,
    Erosion,
    OracleCheck,
    Plot,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Vr => "vr",
            Command::Barcode => "barcode",
            Command::CupDiagram => "cup-diagram",
            Command::CupFunction => "cup-function",
            Command::Erosion => "erosion",
            Command::OracleCheck => "oracle-check",
            Command::Plot => "plot",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    /// Input paths, or `fixture:<name>` / `preset:<name>` sources.
    pub inputs: Vec<String>,
    pub max_dim: usize,
    pub max_scale: f64,
    pub trim_eps: f64,
    /// `None` picks the command's natural output.
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    /// Worker thread cap for the product search; `Some(1)` runs serially.
    pub threads: Option<usize>,
}

impl JobConfig {
    pub fn new(command: Command, inputs: Vec<String>) -> Self {
        JobConfig {
            command,
            inputs,
            max_dim: 2,
            max_scale: f64::INFINITY,
            trim_eps: 0.0,
            format: None,
            output: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<(), JobError> {
        if self.max_dim < 1 {
            return Err(JobError::InvalidConfig("--max-dim must be at least 1".into()));
        }
        if !self.trim_eps.is_finite() || self.trim_eps < 0.0 {
            return Err(JobError::InvalidConfig("--trim must be a finite number ≥ 0".into()));
        }
        if self.max_scale.is_nan() || self.max_scale < 0.0 {
            return Err(JobError::InvalidConfig("--max-scale must be ≥ 0".into()));
        }
        let expected = if self.command == Command::Erosion { 2 } else { 1 };
        if self.inputs.len() != expected {
            return Err(JobError::InvalidConfig(format!(
                "{} takes {expected} input(s), got {}",
                self.command,
                self.inputs.len()
            )));
        }
        Ok(())
    }

    pub fn options(&self) -> CupDiagramOptions {
        CupDiagramOptions {
            trim_eps: self.trim_eps,
            parallel: self.threads != Some(1),
            threads: self.threads,
        }
    }
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{command} cannot write {format} output")]
    UnsupportedFormat { command: Command, format: Format },
    #[error("{input}: {source}")]
    Load {
        input: String,
        #[source]
        source: LoadError,
    },
    #[error("{input}: {source}")]
    Json {
        input: String,
        #[source]
        source: JsonError,
    },
    #[error("{input}: {source}")]
    Complex {
        input: String,
        #[source]
        source: ComplexError,
    },
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// What a job produced: the text to emit and whether its check passed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub success: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, success: true }
    }
}

/// Names accepted after `fixture:`.
pub const FIXTURES: [&str; 7] = [
    "hollow-triangle",
    "filled-triangle",
    "two-disks",
    "square",
    "rp2",
    "torus7",
    "klein",
];

fn fixture(name: &str, k: usize) -> Option<FilteredComplex> {
    Some(match name {
        "hollow-triangle" => fixtures::hollow_triangle(),
        "filled-triangle" => fixtures::filled_triangle(),
        "two-disks" => fixtures::two_disks(),
        "square" => fixtures::square_vr(k),
        "rp2" => fixtures::rp2(),
        "torus7" => fixtures::torus7(),
        "klein" => fixtures::klein(),
        _ => return None,
    })
}

fn is_csv(input: &str) -> bool {
    Path::new(input).extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn is_json(input: &str) -> bool {
    Path::new(input).extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load_error(input: &str) -> impl FnOnce(LoadError) -> JobError + '_ {
    move |source| JobError::Load {
        input: input.to_string(),
        source,
    }
}

fn vietoris_rips(input: &str, cfg: &JobConfig) -> Result<FilteredComplex, JobError> {
    let d = load_distance_csv(input).map_err(load_error(input))?;
    build_vietoris_rips(&d, cfg.max_dim + 1, cfg.max_scale).map_err(|source| JobError::Complex {
        input: input.to_string(),
        source,
    })
}

/// Resolves a complex source: a fixture name, a distance CSV (built into a
/// Vietoris-Rips filtration) or a filtration file.
pub fn load_complex(input: &str, cfg: &JobConfig) -> Result<FilteredComplex, JobError> {
    if let Some(name) = input.strip_prefix("fixture:") {
        return fixture(name, cfg.max_dim).ok_or_else(|| JobError::UnknownSource(input.to_string()));
    }
    if is_csv(input) {
        return vietoris_rips(input, cfg);
    }
    load_filtered_complex(input).map_err(load_error(input))
}

fn preset(source: &str) -> Option<CupFunction> {
    let (name, count) = match source.split_once(':') {
        Some((name, count)) => (name, count.parse().ok()?),
        None => (source, 8),
    };
    match name {
        "vr-circle" => Some(analytic_vr_circle(count)),
        "vr-torus" => Some(analytic_vr_torus(count)),
        "vr-wedge-lower" => Some(analytic_vr_wedge_lower()),
        _ => None,
    }
}

fn read_json(input: &str) -> Result<String, JobError> {
    fs::read_to_string(input).map_err(|source| JobError::Load {
        input: input.to_string(),
        source: LoadError::Io {
            path: input.into(),
            source,
        },
    })
}

fn json_error(input: &str) -> impl FnOnce(JsonError) -> JobError + '_ {
    move |source| JobError::Json {
        input: input.to_string(),
        source,
    }
}

/// Resolves a function source: `preset:<name>[:<count>]`, a JSON function or
/// diagram, or any complex source run through the pipeline.
pub fn load_function(input: &str, cfg: &JobConfig) -> Result<CupFunction, JobError> {
    if let Some(name) = input.strip_prefix("preset:") {
        return preset(name).ok_or_else(|| JobError::UnknownSource(input.to_string()));
    }
    if is_json(input) {
        return json::function_or_diagram_from_str(&read_json(input)?).map_err(json_error(input));
    }
    let c = load_complex(input, cfg)?;
    let (_, _, d, _) = run_pipeline(&c, cfg.max_dim, cfg.options());
    Ok(reconstruct(&d))
}

/// Intervals `[c_i, c_j]` and `[c_i, ∞)` over the critical values of `c`
/// on which `f` and `g` differ, with both values.
pub fn grid_mismatches(c: &FilteredComplex, f: &CupFunction, g: &CupFunction) -> (usize, Vec<(Interval, u32, u32)>) {
    let cv = c.critical_values();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (i, &a) in cv.iter().enumerate() {
        let queries = cv[i..].iter().map(|&b| Interval::closed(a, b)).chain([Interval::closed_open(a, f64::INFINITY)]);
        for q in queries {
            checked += 1;
            let (x, y) = (f.evaluate(&q), g.evaluate(&q));
            if x != y {
                bad.push((q, x, y));
            }
        }
    }
    (checked, bad)
}

fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
}

fn death_field(d: f64) -> String {
    if d.is_finite() {
        json::Number(d).to_string()
    } else {
        "inf".to_string()
    }
}

fn diagram_csv(d: &CupDiagram) -> String {
    let header = ["birth", "death", "value"].map(String::from).to_vec();
    csv_text(std::iter::once(header).chain(
        d.iter()
            .map(|(i, v)| vec![json::Number(i.left()).to_string(), death_field(i.right()), v.to_string()]),
    ))
}

fn unsupported(cfg: &JobConfig, format: Format) -> JobError {
    JobError::UnsupportedFormat {
        command: cfg.command,
        format,
    }
}

fn title(cfg: &JobConfig) -> String {
    format!("{} of {}", cfg.command, cfg.inputs.join(", "))
}

/// Runs a job and returns its output without writing it anywhere.
pub fn execute(cfg: &JobConfig) -> Result<Report, JobError> {
    cfg.validate()?;
    let input = cfg.inputs[0].as_str();
    match cfg.command {
        Command::Vr => {
            let c = match input.strip_prefix("fixture:") {
                Some(_) => load_complex(input, cfg)?,
                None => vietoris_rips(input, cfg)?,
            };
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => Ok(Report::ok(serde_json::to_string(&ComplexJson::from_complex(&c)).unwrap())),
                f => Err(unsupported(cfg, f)),
            }
        }
        Command::Barcode => {
            let c = load_complex(input, cfg)?;
            let (c, b, _, _) = run_pipeline(&c, cfg.max_dim, CupDiagramOptions::serial());
            let zero = zero_dim_bars(&c);
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => Ok(Report::ok(
                    serde_json::to_string(&BarcodeJson::from_barcode(&b, &zero)).unwrap(),
                )),
                Format::Csv => {
                    let header = ["dim", "birth", "death"].map(String::from).to_vec();
                    let rows = zero
                        .iter()
                        .map(|&(birth, death)| (0, birth, death))
                        .chain(b.bars().iter().map(|bar| (bar.dim, bar.birth, bar.death)))
                        .map(|(dim, birth, death)| {
                            vec![
                                dim.to_string(),
                                json::Number(birth).to_string(),
                                death_field(death.to_extended()),
                            ]
                        });
                    Ok(Report::ok(csv_text(std::iter::once(header).chain(rows))))
                }
                f => Err(unsupported(cfg, f)),
            }
        }
        Command::CupDiagram | Command::Plot => {
            let (d, f) = if is_json(input) {
                let text = read_json(input)?;
                match json::diagram_from_str(&text) {
                    Ok(d) => {
                        let f = reconstruct(&d);
                        (d, f)
                    }
                    Err(_) => (CupDiagram::new(), json::function_from_str(&text).map_err(json_error(input))?),
                }
            } else {
                let c = load_complex(input, cfg)?;
                let (_, _, d, _) = run_pipeline(&c, cfg.max_dim, cfg.options());
                let f = reconstruct(&d);
                (d, f)
            };
            let default = if cfg.command == Command::Plot { Format::Svg } else { Format::Json };
            match cfg.format.unwrap_or(default) {
                Format::Json => Ok(Report::ok(json::diagram_to_string(&d))),
                Format::Csv => Ok(Report::ok(diagram_csv(&d))),
                Format::Svg => Ok(Report::ok(render_svg(&d, &f, &title(cfg)))),
            }
        }
        Command::CupFunction => {
            let f = load_function(input, cfg)?;
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => Ok(Report::ok(json::function_to_string(&f))),
                Format::Svg => Ok(Report::ok(render_svg(&CupDiagram::new(), &f, &title(cfg)))),
                Format::Csv => Err(unsupported(cfg, Format::Csv)),
            }
        }
        Command::Erosion => {
            let f = load_function(input, cfg)?;
            let g = load_function(&cfg.inputs[1], cfg)?;
            let d = erosion_distance(&f, &g);
            match cfg.format {
                None => Ok(Report::ok(if d.is_finite() { format!("{d}") } else { "inf".into() })),
                Some(Format::Json) => Ok(Report::ok(serde_json::to_string(&ErosionJson::new(d)).unwrap())),
                Some(f) => Err(unsupported(cfg, f)),
            }
        }
        Command::OracleCheck => {
            if let Some(f) = cfg.format {
                return Err(unsupported(cfg, f));
            }
            let c = load_complex(input, cfg)?;
            let (c, _, d, _) = run_pipeline(&c, cfg.max_dim, cfg.options());
            let f = reconstruct(&d);
            let g = oracle::oracle_cup_function(&c, cfg.max_dim);
            let (checked, bad) = grid_mismatches(&c, &f, &g);
            let mut text = String::new();
            for (q, x, y) in &bad {
                writeln!(text, "mismatch on {q}: pipeline {x}, oracle {y}").unwrap();
            }
            if bad.is_empty() {
                write!(text, "ok: {checked} intervals agree").unwrap();
            } else {
                write!(text, "FAILED: {} of {checked} intervals disagree", bad.len()).unwrap();
            }
            Ok(Report {
                text,
                success: bad.is_empty(),
            })
        }
    }
}

/// Runs a job, writes its output to the configured path or stdout and
/// returns the process exit code.
pub fn run(cfg: &JobConfig) -> Result<i32, JobError> {
    let report = execute(cfg)?;
    let mut text = report.text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cfg.output {
        Some(path) => fs::write(path, text).map_err(|source| JobError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(if report.success { 0 } else { 1 })
}
