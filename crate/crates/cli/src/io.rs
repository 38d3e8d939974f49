//! Text input formats: distance matrices as CSV and filtrations as
//! whitespace-separated simplex lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cuplength::complex::check_distance_matrix;
use cuplength::{ComplexError, FilteredComplex};
use thiserror::Error;

use crate::json;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

impl LoadError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        LoadError::Parse {
            line,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a square symmetric matrix of reals, one row per record.
pub fn parse_distance_csv(text: &str) -> Result<Vec<Vec<f64>>, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            LoadError::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| LoadError::parse(line, format!("`{field}` is not a number")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(LoadError::parse(1, "no rows"));
    }
    check_distance_matrix(&rows)?;
    Ok(rows)
}

pub fn load_distance_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>, LoadError> {
    parse_distance_csv(&read(path.as_ref())?)
}

/// Parses lines `grade v0 v1 … vp`. Blank lines and `#` comments are skipped.
pub fn parse_filtered_complex(text: &str) -> Result<FilteredComplex, LoadError> {
    let mut entries: Vec<(Vec<u32>, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        let Some(grade) = fields.next() else { continue };
        let grade: f64 = grade
            .parse()
            .map_err(|_| LoadError::parse(line, format!("`{grade}` is not a grade")))?;
        let mut vertices = fields
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|_| LoadError::parse(line, format!("`{v}` is not a vertex index")))
            })
            .collect::<Result<Vec<u32>, _>>()?;
        if vertices.is_empty() {
            return Err(LoadError::parse(line, "simplex has no vertices"));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(LoadError::parse(line, "simplex repeats a vertex"));
        }
        entries.push((vertices, grade));
    }
    Ok(FilteredComplex::from_simplex_list(entries)?)
}

/// Loads a filtration from the line format, or from the JSON that the `vr`
/// command writes.
pub fn load_filtered_complex(path: impl AsRef<Path>) -> Result<FilteredComplex, LoadError> {
    let text = read(path.as_ref())?;
    if text.trim_start().starts_with('{') {
        let parsed: json::ComplexJson =
            serde_json::from_str(&text).map_err(|e| LoadError::parse(e.line(), e.to_string()))?;
        return Ok(parsed.to_complex()?);
    }
    parse_filtered_complex(&text)
}

/// Writes `c` in the line format read by [`parse_filtered_complex`].
pub fn format_filtered_complex(c: &FilteredComplex) -> String {
    let mut out = String::new();
    for (s, g) in c.simplices().iter().zip(c.grades()) {
        write!(out, "{}", json::Number(*g)).unwrap();
        for v in s.vertices() {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}
