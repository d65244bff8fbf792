//! State-space files.
//!
//! ```json
//! {"name": "square", "dimension": 3, "arithmetic": "exact",
//!  "unit": ["0", "0", "1"],
//!  "vertices": [["1", "1", "1"], ["-1", "-1", "1"], ["1", "-1", "1"], ["-1", "1", "1"]]}
//! ```
//!
//! Exact files hold `"p/q"` strings, float files hold JSON numbers. Unknown
//! fields are rejected.
//!
//! CHSH setup files list the "0" outcome effect of each binary measurement:
//!
//! ```json
//! {"alice": [["1/2", "0", "1/2"], ["0", "1/2", "1/2"]],
//!  "bob":   [["1/2", "0", "1/2"], ["0", "1/2", "1/2"]]}
//! ```
//!
//! Strings work for both backends; numbers only for floating point.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::AnySpace;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::space::{Effect, StateSpace};
use crate::tensor::ChshSetup;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    name: String,
    dimension: usize,
    arithmetic: String,
    unit: Vec<Value>,
    vertices: Vec<Vec<Value>>,
}

fn scalar_at<S: Scalar>(v: &Value, location: impl FnOnce() -> String) -> Result<S> {
    S::from_json(v).map_err(|message| Error::Parse {
        location: location(),
        message,
    })
}

fn build<S: Scalar>(file: SpaceFile) -> Result<StateSpace<S>> {
    let unit = file
        .unit
        .iter()
        .enumerate()
        .map(|(j, v)| scalar_at(v, || format!("unit[{j}]")))
        .collect::<Result<Vec<S>>>()?;
    let vertices = file
        .vertices
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| scalar_at(v, || format!("vertices[{i}][{j}]")))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if unit.len() != file.dimension {
        return Err(Error::validation(
            "dimension",
            format!(
                "unit has {} entries, dimension is {}",
                unit.len(),
                file.dimension
            ),
        ));
    }
    StateSpace::new(file.name, unit, vertices)
}

pub fn parse_str(text: &str) -> Result<AnySpace> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    match file.arithmetic.as_str() {
        "exact" => Ok(AnySpace::Exact(build::<Rational>(file)?)),
        "float" => Ok(AnySpace::Float(build::<f64>(file)?)),
        other => Err(Error::Parse {
            location: "arithmetic".into(),
            message: format!("expected \"exact\" or \"float\", found {other:?}"),
        }),
    }
}

pub fn load(path: &Path) -> Result<AnySpace> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn to_json_string<S: Scalar>(space: &StateSpace<S>) -> String {
    let file = SpaceFile {
        name: space.name().to_string(),
        dimension: space.dimension(),
        arithmetic: S::ARITHMETIC.to_string(),
        unit: space.unit().iter().map(Scalar::to_json).collect(),
        vertices: space
            .vertices()
            .iter()
            .map(|v| v.iter().map(Scalar::to_json).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("state-space files serialize")
}

pub fn save<S: Scalar>(space: &StateSpace<S>, path: &Path) -> Result<()> {
    fs::write(path, to_json_string(space) + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// A parsed but not yet typed CHSH setup file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupFile {
    alice: [Vec<Value>; 2],
    bob: [Vec<Value>; 2],
}

impl SetupFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_setup<S: Scalar>(&self) -> Result<ChshSetup<S>> {
        let effect = |side: &str, k: usize, values: &[Value]| -> Result<Effect<S>> {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let location = || format!("{side}[{k}][{j}]");
                    match v {
                        Value::String(text) if !S::EXACT => {
                            let q = crate::scalar::parse_rational(text).map_err(|message| {
                                Error::Parse {
                                    location: location(),
                                    message,
                                }
                            })?;
                            scalar_at(&Value::from(q.to_f64()), location)
                        }
                        _ => scalar_at(v, location),
                    }
                })
                .collect::<Result<Vec<S>>>()
                .map(Effect)
        };
        Ok(ChshSetup {
            alice: [
                effect("alice", 0, &self.alice[0])?,
                effect("alice", 1, &self.alice[1])?,
            ],
            bob: [
                effect("bob", 0, &self.bob[0])?,
                effect("bob", 1, &self.bob[1])?,
            ],
        })
    }
}
