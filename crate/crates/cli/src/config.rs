//! Suite configuration files.
//!
//! ```toml
//! seed = 20240601          # optional; falls back to $HYPERHS_SEED, then 20240601
//! output = "results.json"  # optional; stdout otherwise
//! format = "json"          # or "csv"
//! timing = true            # false zeroes runtime_ms for byte-identical output
//!
//! [[check]]
//! id = "po5"
//! tol = 1e-6               # optional overrides, same names as the verify flags
//! samples = 200000
//! eps = 0.5
//! seed = 7
//! params = { a = [2.0, 1.0, 0.5] }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hyperhs::identities::{is_registered, Params};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Spanned;

pub const SEED_ENV: &str = "HYPERHS_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: check[{index}].id: unknown identity `{id}`")]
    UnknownIdentity { id: String, index: usize, line: usize },
    #[error("line {line}: {field}: {reason}")]
    Invalid { field: String, line: usize, reason: String },
    #[error("{SEED_ENV}={value}: not a 64-bit unsigned seed")]
    SeedEnv { value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSpec {
    pub id: String,
    pub params: Params,
    pub tol: Option<f64>,
    pub samples: Option<u64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
}

impl CheckSpec {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.to_string(),
            params: Params::new(),
            tol: None,
            samples: None,
            eps: None,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub checks: Vec<CheckSpec>,
}

impl SuiteConfig {
    pub fn new(seed: u64, checks: Vec<CheckSpec>) -> Self {
        Self {
            seed,
            output: None,
            format: Format::Json,
            timing: true,
            checks,
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, default_seed()?)
    }

    /// Parses and validates `text`; `default_seed` applies when the file has
    /// no top-level seed.
    pub fn from_toml(text: &str, default_seed: u64) -> Result<Self, ConfigError> {
        let raw: RawSuite = toml::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let mut checks = Vec::with_capacity(raw.check.len());
        for (index, c) in raw.check.into_iter().enumerate() {
            let id_line = line_of(text, c.id.span().start);
            if !is_registered(c.id.get_ref()) {
                return Err(ConfigError::UnknownIdentity {
                    id: c.id.into_inner(),
                    index,
                    line: id_line,
                });
            }
            let positive = |v: &Option<Spanned<f64>>, name: &str| -> Result<Option<f64>, ConfigError> {
                match v {
                    Some(x) if !(*x.get_ref() > 0.0 && x.get_ref().is_finite()) => Err(ConfigError::Invalid {
                        field: format!("check[{index}].{name}"),
                        line: line_of(text, x.span().start),
                        reason: format!("must be positive and finite, got {}", x.get_ref()),
                    }),
                    v => Ok(v.as_ref().map(|x| *x.get_ref())),
                }
            };
            let tol = positive(&c.tol, "tol")?;
            let eps = positive(&c.eps, "eps")?;
            if let Some(s) = &c.samples {
                if *s.get_ref() == 0 {
                    return Err(ConfigError::Invalid {
                        field: format!("check[{index}].samples"),
                        line: line_of(text, s.span().start),
                        reason: "must be at least 1".into(),
                    });
                }
            }
            let mut params = Params::new();
            for (k, v) in c.params {
                let vals = match v {
                    ParamValue::Scalar(x) => vec![x],
                    ParamValue::List(xs) => xs,
                };
                if vals.is_empty() || vals.iter().any(|x| !x.is_finite()) {
                    return Err(ConfigError::Invalid {
                        field: format!("check[{index}].params.{k}"),
                        line: id_line,
                        reason: "expected finite numbers".into(),
                    });
                }
                params.insert(k, vals);
            }
            checks.push(CheckSpec {
                id: c.id.into_inner(),
                params,
                tol,
                samples: c.samples.map(Spanned::into_inner),
                eps,
                seed: c.seed,
            });
        }
        Ok(Self {
            seed: raw.seed.unwrap_or(default_seed),
            output: raw.output,
            format: raw.format,
            timing: raw.timing,
            checks,
        })
    }

    /// SHA-256 over the fields that influence reported numbers: seeds,
    /// check ids and order, parameters and overrides. Output destination,
    /// format, timing and file layout do not enter.
    pub fn digest(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            seed: u64,
            checks: &'a [CheckSpec],
        }
        let bytes = serde_json::to_vec(&Canonical {
            seed: self.seed,
            checks: &self.checks,
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Seed used when neither a flag nor the config gives one.
pub fn default_seed() -> Result<u64, ConfigError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| ConfigError::SeedEnv { value: v }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Parses `key=v1,v2,...` as given to `--param`.
pub fn parse_param(s: &str) -> Result<(String, Vec<f64>), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let vals = v
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{k}: `{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((k.trim().to_string(), vals))
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuite {
    seed: Option<u64>,
    output: Option<PathBuf>,
    #[serde(default)]
    format: Format,
    #[serde(default = "yes")]
    timing: bool,
    #[serde(default)]
    check: Vec<RawCheck>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    id: Spanned<String>,
    #[serde(default)]
    params: BTreeMap<String, ParamValue>,
    tol: Option<Spanned<f64>>,
    samples: Option<Spanned<u64>>,
    eps: Option<Spanned<f64>>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

fn yes() -> bool {
    true
}
