//! JSON interchange for complexes, barcodes, diagrams and functions.
//!
//! Reals with an integral value are written without a fractional part. An
//! infinite right end is written as `"inf": true` with the finite end field
//! omitted.

use std::fmt;

use cuplength::invariants::IntervalError;
use cuplength::{AnnotatedBarcode, ComplexError, CupDiagram, CupFunction, Death, FilteredComplex, Interval};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("entry {index}: {message}")]
    Inconsistent { index: usize, message: &'static str },
}

/// A real that serializes as an integer when it is one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Number(pub f64);

const EXACT_INTEGER: f64 = 9_007_199_254_740_992.0;

impl Number {
    fn as_integer(self) -> Option<i64> {
        (self.0.fract() == 0.0 && self.0.abs() < EXACT_INTEGER).then_some(self.0 as i64)
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.as_integer() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_f64(self.0),
        }
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(Number)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(i) => write!(f, "{i}"),
            None => write!(f, "{}", self.0),
        }
    }
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn yes() -> bool {
    true
}

fn right_end(x: f64) -> (Option<Number>, bool) {
    if x.is_finite() {
        (Some(Number(x)), false)
    } else {
        (None, true)
    }
}

fn read_right_end(index: usize, end: Option<Number>, inf: bool) -> Result<f64, JsonError> {
    match (end, inf) {
        (Some(x), false) => Ok(x.0),
        (None, true) => Ok(f64::INFINITY),
        (Some(_), true) => Err(JsonError::Inconsistent {
            index,
            message: "an infinite entry cannot carry a finite right end",
        }),
        (None, false) => Err(JsonError::Inconsistent {
            index,
            message: "a finite entry needs a right end",
        }),
    }
}

/// A diagram point. Points are `[birth, death)` unless the closedness flags
/// say otherwise; the flags are only written when they differ from that.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub birth: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death: Option<Number>,
    pub inf: bool,
    pub value: u32,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub left_closed: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub right_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub points: Vec<PointJson>,
}

impl DiagramJson {
    pub fn from_diagram(d: &CupDiagram) -> Self {
        let points = d
            .iter()
            .map(|(i, &value)| {
                let (death, inf) = right_end(i.right());
                PointJson {
                    birth: Number(i.left()),
                    death,
                    inf,
                    value,
                    left_closed: i.left_closed(),
                    right_closed: i.right_closed(),
                }
            })
            .collect();
        DiagramJson { points }
    }

    pub fn to_diagram(&self) -> Result<CupDiagram, JsonError> {
        let mut points = Vec::with_capacity(self.points.len());
        for (index, p) in self.points.iter().enumerate() {
            let right = read_right_end(index, p.death, p.inf)?;
            points.push((Interval::new(p.birth.0, right, p.left_closed, p.right_closed)?, p.value));
        }
        Ok(CupDiagram::from_points(points))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub left: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Number>,
    pub left_closed: bool,
    pub right_closed: bool,
    pub inf: bool,
    pub value: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub generators: Vec<GeneratorJson>,
}

impl FunctionJson {
    pub fn from_function(f: &CupFunction) -> Self {
        let generators = f
            .generators()
            .iter()
            .map(|&(i, value)| {
                let (right, inf) = right_end(i.right());
                GeneratorJson {
                    left: Number(i.left()),
                    right,
                    left_closed: i.left_closed(),
                    right_closed: i.right_closed(),
                    inf,
                    value,
                }
            })
            .collect();
        FunctionJson { generators }
    }

    pub fn to_function(&self) -> Result<CupFunction, JsonError> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for (index, g) in self.generators.iter().enumerate() {
            let right = read_right_end(index, g.right, g.inf)?;
            gens.push((Interval::new(g.left.0, right, g.left_closed, g.right_closed)?, g.value));
        }
        Ok(CupFunction::new(gens))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarJson {
    pub dim: usize,
    pub birth: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death: Option<Number>,
    pub inf: bool,
    pub representative: Vec<Vec<u32>>,
}

/// A degree-zero bar, which carries no representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub birth: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death: Option<Number>,
    pub inf: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarcodeJson {
    pub max_dim: usize,
    pub degree_zero: Vec<ComponentJson>,
    pub bars: Vec<BarJson>,
}

fn death_fields(d: Death) -> (Option<Number>, bool) {
    match d {
        Death::Finite(x) => (Some(Number(x)), false),
        Death::Infinite => (None, true),
    }
}

impl BarcodeJson {
    pub fn from_barcode(b: &AnnotatedBarcode, degree_zero: &[(f64, Death)]) -> Self {
        let degree_zero = degree_zero
            .iter()
            .map(|&(birth, d)| {
                let (death, inf) = death_fields(d);
                ComponentJson {
                    birth: Number(birth),
                    death,
                    inf,
                }
            })
            .collect();
        let bars = b
            .bars()
            .iter()
            .map(|bar| {
                let (death, inf) = death_fields(bar.death);
                BarJson {
                    dim: bar.dim,
                    birth: Number(bar.birth),
                    death,
                    inf,
                    representative: bar
                        .representative
                        .summands()
                        .iter()
                        .map(|s| s.vertices().to_vec())
                        .collect(),
                }
            })
            .collect();
        BarcodeJson {
            max_dim: b.max_dim(),
            degree_zero,
            bars,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexJson {
    pub grade: Number,
    pub vertices: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub simplices: Vec<SimplexJson>,
}

impl ComplexJson {
    pub fn from_complex(c: &FilteredComplex) -> Self {
        let simplices = c
            .simplices()
            .iter()
            .zip(c.grades())
            .map(|(s, &g)| SimplexJson {
                grade: Number(g),
                vertices: s.vertices().to_vec(),
            })
            .collect();
        ComplexJson { simplices }
    }

    pub fn to_complex(&self) -> Result<FilteredComplex, ComplexError> {
        FilteredComplex::from_simplex_list(self.simplices.iter().map(|s| (s.vertices.iter().copied(), s.grade.0)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErosionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<Number>,
    pub inf: bool,
}

impl ErosionJson {
    pub fn new(distance: f64) -> Self {
        let (distance, inf) = right_end(distance);
        ErosionJson { distance, inf }
    }
}

pub fn diagram_to_string(d: &CupDiagram) -> String {
    serde_json::to_string(&DiagramJson::from_diagram(d)).expect("diagram serializes")
}

pub fn diagram_from_str(s: &str) -> Result<CupDiagram, JsonError> {
    serde_json::from_str::<DiagramJson>(s)?.to_diagram()
}

pub fn function_to_string(f: &CupFunction) -> String {
    serde_json::to_string(&FunctionJson::from_function(f)).expect("function serializes")
}

pub fn function_from_str(s: &str) -> Result<CupFunction, JsonError> {
    serde_json::from_str::<FunctionJson>(s)?.to_function()
}

/// Reads a function, or a diagram that is then reconstructed into one.
pub fn function_or_diagram_from_str(s: &str) -> Result<CupFunction, JsonError> {
    let value: serde_json::Value = serde_json::from_str(s)?;
    if value.get("points").is_some() {
        Ok(cuplength::reconstruct(&serde_json::from_value::<DiagramJson>(value)?.to_diagram()?))
    } else {
        serde_json::from_value::<FunctionJson>(value)?.to_function()
    }
}
