//! Versioned JSON sweep configuration.

use std::path::Path;

use eigenfid::experiments::{DriveSpec, SplitConvention, SweepConfig, SweepMode};
use eigenfid::jcdrive::BinomialMode;
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Configuration problem, located by a JSON pointer into the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "config error: {}", self.message)
        } else {
            write!(f, "config error at {}: {}", self.pointer, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Parses `text` as `T`, reporting failures with a JSON pointer.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        ConfigError::at(pointer, e.into_inner().to_string())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text)
}

pub fn check_schema(schema: u32) -> Result<(), ConfigError> {
    if schema != SCHEMA_VERSION {
        return Err(ConfigError::at(
            "/schema",
            format!("unsupported schema version {schema}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DriveKindName {
    Poisson,
    Binomial,
    Fock,
    Custom,
}

/// `{"kind", "nbar", "fano", "N", "coeffs", "n_min", "mode"}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveFile {
    pub kind: DriveKindName,
    pub nbar: Option<f64>,
    pub fano: Option<f64>,
    #[serde(rename = "N")]
    pub fock_n: Option<usize>,
    pub coeffs: Option<Vec<[f64; 2]>>,
    pub n_min: Option<usize>,
    pub mode: Option<BinomialMode>,
}

/// Top-level sweep file. Grids may also be given as scalars inside `drive`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub schema: u32,
    pub mode: Option<SweepMode>,
    pub drive: DriveFile,
    pub nbar: Option<Vec<f64>>,
    pub fano: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub concatenations: Option<Vec<usize>>,
    pub total_tau: Option<Vec<f64>>,
    pub split_conventions: Option<Vec<SplitConvention>>,
    pub coupling: Option<f64>,
    pub carrier: Option<f64>,
    pub seed: Option<u64>,
    pub mc_samples: Option<usize>,
    pub jobs: Option<usize>,
    pub output: Option<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub mc_samples: Option<usize>,
}

fn grid(
    top: Option<Vec<f64>>,
    scalar: Option<f64>,
    pointer: &str,
) -> Result<Option<Vec<f64>>, ConfigError> {
    match (top, scalar) {
        (Some(_), Some(_)) => Err(ConfigError::at(
            format!("/drive{pointer}"),
            format!("given both here and as the top-level grid {pointer}"),
        )),
        (Some(g), None) => Ok(Some(g)),
        (None, Some(x)) => Ok(Some(vec![x])),
        (None, None) => Ok(None),
    }
}

impl SweepFile {
    /// Sweep for subcommand `mode`; the file's `mode`, if present, must agree.
    pub fn into_sweep(self, mode: SweepMode, ov: &Overrides) -> Result<(SweepConfig, Option<String>), ConfigError> {
        check_schema(self.schema)?;
        if let Some(m) = self.mode {
            if m != mode {
                return Err(ConfigError::at("/mode", format!("file declares {m:?} but {mode:?} was requested")));
            }
        }
        let d = self.drive;
        let mut nbar = grid(self.nbar, d.nbar, "/nbar")?;
        if let Some(n) = d.fock_n {
            if d.kind != DriveKindName::Fock {
                return Err(ConfigError::at("/drive/N", "only valid for fock drives"));
            }
            if nbar.is_some() {
                return Err(ConfigError::at("/drive/N", "conflicts with nbar"));
            }
            nbar = Some(vec![n as f64]);
        }
        let fano = grid(self.fano, d.fano, "/fano")?;
        if d.mode.is_some() && d.kind != DriveKindName::Binomial {
            return Err(ConfigError::at("/drive/mode", "only valid for binomial drives"));
        }
        if (d.coeffs.is_some() || d.n_min.is_some()) && d.kind != DriveKindName::Custom {
            return Err(ConfigError::at("/drive/coeffs", "only valid for custom drives"));
        }
        let drive = match d.kind {
            DriveKindName::Poisson => DriveSpec::Poisson,
            DriveKindName::Binomial => DriveSpec::Binomial {
                mode: d.mode.unwrap_or_default(),
            },
            DriveKindName::Fock => DriveSpec::Fock,
            DriveKindName::Custom => DriveSpec::Custom {
                n_min: d.n_min.unwrap_or(0),
                coeffs: d.coeffs.ok_or_else(|| ConfigError::at("/drive/coeffs", "required for custom drives"))?,
            },
        };
        let needs_nbar = !matches!(drive, DriveSpec::Custom { .. });
        let nbar = match nbar {
            Some(g) => g,
            None if needs_nbar => return Err(ConfigError::at("/nbar", "missing photon-number grid")),
            None => Vec::new(),
        };
        let fano = match fano {
            Some(g) => g,
            None if matches!(drive, DriveSpec::Binomial { .. }) => {
                return Err(ConfigError::at("/fano", "binomial drives need a Fano grid"))
            }
            None => Vec::new(),
        };
        let tau = match (self.tau, mode) {
            (Some(t), _) => t,
            (None, SweepMode::Split) => vec![std::f64::consts::FRAC_PI_2],
            (None, SweepMode::Concat) if self.total_tau.is_some() => Vec::new(),
            (None, _) => return Err(ConfigError::at("/tau", "missing reduced-time grid")),
        };
        let mut cfg = SweepConfig::new(mode, drive, nbar, fano, tau);
        if let Some(c) = self.concatenations {
            cfg.concatenations = c;
        }
        if let Some(t) = self.total_tau {
            cfg.total_tau = t;
        }
        if let Some(c) = self.split_conventions {
            cfg.split_conventions = c;
        }
        cfg.coupling = self.coupling.unwrap_or(cfg.coupling);
        cfg.carrier = self.carrier.unwrap_or(cfg.carrier);
        cfg.seed = ov.seed.or(self.seed).unwrap_or(0);
        cfg.jobs = ov.jobs.or(self.jobs).unwrap_or(1);
        cfg.mc_samples = ov.mc_samples.or(self.mc_samples).unwrap_or(0);
        cfg.validate().map_err(|e| match e {
            eigenfid::Error::InvalidParameter { name, reason } => ConfigError::at(format!("/{name}"), reason),
            other => ConfigError::at("", other.to_string()),
        })?;
        Ok((cfg, self.output))
    }
}
