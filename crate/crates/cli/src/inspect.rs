//! State and channel files: parsing, diagnostics and dumping.

use eigenfid::channel::QubitChannel;
use eigenfid::densmat::{DensityMatrix, EnergyBasis};
use eigenfid::experiments::format_real;
use eigenfid::C64;
use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::config::{check_schema, ConfigError};

type Entry = [f64; 2];

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema: u32,
    #[serde(rename = "type")]
    pub kind: String,
    /// Row-major `d × d` matrix of `[re, im]` entries.
    pub matrix: Vec<Vec<Entry>>,
    /// Optional energy levels of the computational basis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelImages {
    pub e00: [[Entry; 2]; 2],
    pub e01: [[Entry; 2]; 2],
    pub e10: [[Entry; 2]; 2],
    pub e11: [[Entry; 2]; 2],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub schema: u32,
    #[serde(rename = "type")]
    pub kind: String,
    pub images: ChannelImages,
}

/// Parsed and validated inspect input.
#[derive(Debug, Clone)]
pub enum Inspectable {
    State {
        rho: DensityMatrix,
        energies: Option<Vec<f64>>,
    },
    Channel(QubitChannel),
}

/// Errors of `inspect`: malformed input or invalid physics.
#[derive(Debug)]
pub enum InspectError {
    Schema(ConfigError),
    Numerical(eigenfid::Error),
}

impl From<ConfigError> for InspectError {
    fn from(e: ConfigError) -> Self {
        Self::Schema(e)
    }
}

impl From<eigenfid::Error> for InspectError {
    fn from(e: eigenfid::Error) -> Self {
        Self::Numerical(e)
    }
}

fn c(e: Entry) -> C64 {
    C64::new(e[0], e[1])
}

fn entry(z: C64) -> Entry {
    [z.re, z.im]
}

fn mat2(m: &[[Entry; 2]; 2]) -> Matrix2<C64> {
    Matrix2::new(c(m[0][0]), c(m[0][1]), c(m[1][0]), c(m[1][1]))
}

fn rows2(m: &Matrix2<C64>) -> [[Entry; 2]; 2] {
    [[entry(m[(0, 0)]), entry(m[(0, 1)])], [entry(m[(1, 0)]), entry(m[(1, 1)])]]
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer: String = e
            .path()
            .iter()
            .map(|s| match s {
                serde_path_to_error::Segment::Seq { index } => format!("/{index}"),
                serde_path_to_error::Segment::Map { key } => format!("/{key}"),
                serde_path_to_error::Segment::Enum { variant } => format!("/{variant}"),
                serde_path_to_error::Segment::Unknown => "/?".into(),
            })
            .collect();
        ConfigError::at(pointer, e.into_inner().to_string())
    })
}

pub fn parse(text: &str) -> Result<Inspectable, InspectError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::at("", format!("invalid JSON: {e}")))?;
    let kind = value
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| ConfigError::at("/type", "expected \"state\" or \"channel\""))?
        .to_owned();
    match kind.as_str() {
        "state" => {
            let f: StateFile = typed(value)?;
            check_schema(f.schema)?;
            let d = f.matrix.len();
            if d == 0 {
                return Err(ConfigError::at("/matrix", "empty matrix").into());
            }
            if let Some(i) = f.matrix.iter().position(|r| r.len() != d) {
                return Err(ConfigError::at(format!("/matrix/{i}"), format!("row length must be {d}")).into());
            }
            if let Some(e) = &f.energies {
                if e.len() != d {
                    return Err(ConfigError::at("/energies", format!("need {d} levels")).into());
                }
            }
            let m = DMatrix::from_fn(d, d, |i, j| c(f.matrix[i][j]));
            Ok(Inspectable::State {
                rho: DensityMatrix::new(m)?,
                energies: f.energies,
            })
        }
        "channel" => {
            let f: ChannelFile = typed(value)?;
            check_schema(f.schema)?;
            let im = &f.images;
            Ok(Inspectable::Channel(QubitChannel::from_images(
                mat2(&im.e00),
                mat2(&im.e01),
                mat2(&im.e10),
                mat2(&im.e11),
            )?))
        }
        other => Err(ConfigError::at("/type", format!("unknown type {other:?}")).into()),
    }
}

/// Diagnostics as `(name, value)` pairs.
pub fn report(item: &Inspectable) -> Result<Vec<(&'static str, f64)>, eigenfid::Error> {
    let mut out = Vec::new();
    match item {
        Inspectable::State { rho, energies } => {
            let g = rho.purity();
            let (lo, hi) = rho.eigenfidelity_bounds();
            out.push(("dim", rho.dim() as f64));
            out.push(("eigenfidelity", rho.eigenfidelity().value));
            out.push(("eigenerror", rho.eigenerror()));
            out.push(("purity", g));
            out.push(("linear_entropy", rho.linear_entropy()));
            out.push(("eigenfidelity_lower", lo));
            out.push(("eigenfidelity_upper", hi));
            if let Some(levels) = energies {
                let basis = EnergyBasis::computational(levels.clone())?;
                out.push(("effective_temperature", rho.effective_temperature(&basis)?));
            }
        }
        Inspectable::Channel(ch) => {
            let (lo, hi) = ch.eigenfidelity_bounds();
            let r = ch.channel_eigenfidelity();
            out.push(("average_purity", ch.average_purity()));
            out.push(("channel_eigenfidelity_lower", lo));
            out.push(("channel_eigenfidelity_upper", hi));
            out.push(("channel_eigenfidelity", r));
            out.push(("channel_eigenerror", 1.0 - r));
            out.push(("tp_residual", ch.tp_residual()));
            out.push(("hermiticity_residual", ch.hermiticity_residual()));
            out.push(("min_choi_eigenvalue", ch.min_choi_eigenvalue()));
        }
    }
    Ok(out)
}

pub fn render(lines: &[(&'static str, f64)]) -> String {
    lines
        .iter()
        .map(|(k, v)| format!("{k} {}\n", format_real(*v)))
        .collect()
}

/// Canonical JSON of a parsed item; re-reading it reproduces the item.
pub fn dump(item: &Inspectable) -> String {
    let value = match item {
        Inspectable::State { rho, energies } => {
            let m = rho.matrix();
            serde_json::to_value(StateFile {
                schema: crate::config::SCHEMA_VERSION,
                kind: "state".into(),
                matrix: (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| entry(m[(i, j)])).collect()).collect(),
                energies: energies.clone(),
            })
        }
        Inspectable::Channel(ch) => {
            let im = ch.images();
            serde_json::to_value(ChannelFile {
                schema: crate::config::SCHEMA_VERSION,
                kind: "channel".into(),
                images: ChannelImages {
                    e00: rows2(&im[0]),
                    e01: rows2(&im[1]),
                    e10: rows2(&im[2]),
                    e11: rows2(&im[3]),
                },
            })
        }
    };
    serde_json::to_string_pretty(&value.expect("plain data serializes")).expect("value serializes")
}
