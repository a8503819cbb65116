//! Pipeline configuration: a TOML file listing the datasets to build.
//!
//! ```toml
//! output_dir = "out"
//! seed = 7
//! window_length = 2048
//!
//! [[dataset]]
//! name = "shuffle"
//! family = "dyck-shuffle"
//! k = 64
//! tokens = 30000000
//!
//! [[dataset]]
//! name = "shuffle-trigram"
//! tokens = 30000000
//! metamer = { source = "shuffle", order = 3 }
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::DEFAULT_WINDOW;
use crate::error::{Error, Result};
use crate::spec::{Family, HalfLength, LanguageSpec, DEFAULT_MAX_DEPTH, DEFAULT_MAX_LENGTH, DEFAULT_P_OPEN};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    output_dir: Option<PathBuf>,
    #[serde(default)]
    seed: u64,
    window_length: Option<usize>,
    #[serde(default, rename = "dataset")]
    datasets: Vec<RawDataset>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    name: String,
    tokens: u64,
    family: Option<Family>,
    k: Option<u32>,
    p_open: Option<f64>,
    max_depth: Option<u32>,
    max_length: Option<usize>,
    seed: Option<u64>,
    half_length: Option<HalfLength>,
    metamer: Option<MetamerRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetamerRef {
    pub source: String,
    pub order: usize,
    pub doc_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetKind {
    Language(LanguageSpec),
    Metamer { reference: MetamerRef, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub tokens: u64,
    pub kind: DatasetKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub window_length: usize,
    pub datasets: Vec<Dataset>,
}

impl PipelineConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let window_length = raw.window_length.unwrap_or(DEFAULT_WINDOW);
        if window_length == 0 {
            return Err(Error::Config("window_length must be positive".into()));
        }
        let mut names = HashSet::new();
        let mut datasets = Vec::with_capacity(raw.datasets.len());
        for d in raw.datasets {
            if !names.insert(d.name.clone()) {
                return Err(Error::Config(format!("duplicate dataset name `{}`", d.name)));
            }
            if d.tokens == 0 {
                return Err(Error::Config(format!("dataset `{}` has a zero token budget", d.name)));
            }
            let seed = d.seed.unwrap_or(raw.seed);
            let kind = match (d.metamer, d.family) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "dataset `{}` sets both `family` and `metamer`",
                        d.name
                    )))
                }
                (Some(reference), None) => DatasetKind::Metamer { reference, seed },
                (None, Some(family)) => {
                    let k =
                        d.k.ok_or_else(|| Error::Config(format!("dataset `{}` is missing `k`", d.name)))?;
                    let spec = LanguageSpec {
                        family,
                        k,
                        p_open: d.p_open.unwrap_or(DEFAULT_P_OPEN),
                        max_depth: d.max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
                        max_length: d.max_length.unwrap_or(DEFAULT_MAX_LENGTH),
                        seed,
                        half_length: d.half_length,
                    };
                    spec.validate()
                        .map_err(|e| Error::Config(format!("dataset `{}`: {e}", d.name)))?;
                    DatasetKind::Language(spec)
                }
                (None, None) => {
                    return Err(Error::Config(format!(
                        "dataset `{}` needs `family` or `metamer`",
                        d.name
                    )))
                }
            };
            datasets.push(Dataset {
                name: d.name,
                tokens: d.tokens,
                kind,
            });
        }
        for d in &datasets {
            if let DatasetKind::Metamer { reference, .. } = &d.kind {
                let source = datasets.iter().find(|s| s.name == reference.source).ok_or_else(|| {
                    Error::Config(format!(
                        "dataset `{}` references unknown source `{}`",
                        d.name, reference.source
                    ))
                })?;
                if !matches!(source.kind, DatasetKind::Language(_)) {
                    return Err(Error::Config(format!(
                        "metamer source `{}` must be a generated language",
                        reference.source
                    )));
                }
                if !(1..=3).contains(&reference.order) {
                    return Err(Error::Config(format!("dataset `{}`: order must be 1, 2 or 3", d.name)));
                }
            }
        }
        Ok(PipelineConfig {
            output_dir: raw.output_dir,
            seed: raw.seed,
            window_length,
            datasets,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}
