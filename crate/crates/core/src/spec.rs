use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    DyckNested,
    DyckShuffle,
    Ww,
    RandomUniform,
}

impl Family {
    pub fn is_dyck(self) -> bool {
        matches!(self, Family::DyckNested | Family::DyckShuffle)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::DyckNested => "dyck-nested",
            Family::DyckShuffle => "dyck-shuffle",
            Family::Ww => "ww",
            Family::RandomUniform => "random-uniform",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distribution of the half-length `m` of a `w w` document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HalfLength {
    Fixed { len: usize },
    Uniform { min: usize, max: usize },
}

impl HalfLength {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            HalfLength::Fixed { len } => len >= 1,
            HalfLength::Uniform { min, max } => min >= 1 && min <= max,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidSpec(format!(
                "half-length distribution {self:?} has empty support on [1, inf)"
            )))
        }
    }

    pub fn max(self) -> usize {
        match self {
            HalfLength::Fixed { len } => len,
            HalfLength::Uniform { max, .. } => max,
        }
    }
}

pub const DEFAULT_P_OPEN: f64 = 0.5;
pub const DEFAULT_MAX_DEPTH: u32 = 16;
pub const DEFAULT_MAX_LENGTH: usize = 2048;

fn default_p_open() -> f64 {
    DEFAULT_P_OPEN
}
fn default_max_depth() -> u32 {
    DEFAULT_MAX_DEPTH
}
fn default_max_length() -> usize {
    DEFAULT_MAX_LENGTH
}

/// Parameters of one generated language.
///
/// `k` is the number of bracket pair types for Dyck families and the
/// vocabulary size otherwise. `p_open` and `max_depth` only affect Dyck
/// families; `half_length` only affects `ww`, where it defaults to uniform on
/// `[1, max_length / 2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageSpec {
    pub family: Family,
    pub k: u32,
    #[serde(default = "default_p_open")]
    pub p_open: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
    #[serde(default = "default_max_length")]
    pub max_length: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_length: Option<HalfLength>,
}

impl LanguageSpec {
    pub fn new(family: Family, k: u32) -> Self {
        LanguageSpec {
            family,
            k,
            p_open: DEFAULT_P_OPEN,
            max_depth: DEFAULT_MAX_DEPTH,
            max_length: DEFAULT_MAX_LENGTH,
            seed: 0,
            half_length: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_length(mut self, max_length: usize) -> Self {
        self.max_length = max_length;
        self
    }

    pub fn with_max_depth(mut self, max_depth: u32) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_p_open(mut self, p_open: f64) -> Self {
        self.p_open = p_open;
        self
    }

    pub fn vocab_size(&self) -> u32 {
        if self.family.is_dyck() {
            2 * self.k
        } else {
            self.k
        }
    }

    /// Half-length distribution actually used for `ww` generation.
    pub fn ww_half_length(&self) -> HalfLength {
        self.half_length.unwrap_or(HalfLength::Uniform {
            min: 1,
            max: (self.max_length / 2).max(1),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self.family {
            Family::DyckNested | Family::DyckShuffle => {
                if self.k < 1 {
                    return bad("k must be at least 1".into());
                }
                if self.max_depth < 1 {
                    return bad("max_depth must be at least 1".into());
                }
                if self.max_length < 2 {
                    return bad(format!("max_length must be at least 2, got {}", self.max_length));
                }
                if !(0.0..=1.0).contains(&self.p_open) {
                    return bad(format!("p_open must lie in [0, 1], got {}", self.p_open));
                }
            }
            Family::Ww => {
                if self.k < 1 {
                    return bad("ww vocabulary size must be at least 1".into());
                }
                let half = self.ww_half_length().validate()?;
                if 2 * half.max() > self.max_length {
                    return bad(format!(
                        "ww half-length up to {} exceeds max_length {}",
                        half.max(),
                        self.max_length
                    ));
                }
            }
            Family::RandomUniform => {
                if self.k < 2 {
                    return bad(format!("random vocabulary size must be at least 2, got {}", self.k));
                }
                if self.max_length < 1 {
                    return bad("document length must be positive".into());
                }
            }
        }
        if self.vocab_size() > u16::MAX as u32 + 1 {
            return bad(format!(
                "vocabulary of {} symbols does not fit 16-bit tokens",
                self.vocab_size()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for LanguageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::DyckNested | Family::DyckShuffle => write!(
                f,
                "{}(k={},p_open={},max_depth={},max_length={})",
                self.family, self.k, self.p_open, self.max_depth, self.max_length
            ),
            Family::Ww => write!(f, "ww(vocab={},half_length={:?})", self.k, self.ww_half_length()),
            Family::RandomUniform => write!(f, "random-uniform(vocab={},length={})", self.k, self.max_length),
        }
    }
}

/// Provenance of a packed corpus, recorded in its manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorpusSource {
    Language(LanguageSpec),
    Metamer { order: usize, source: String, seed: u64 },
    External { description: String },
}

impl CorpusSource {
    /// Bracket type count when the corpus is a Dyck family.
    pub fn dyck_k(&self) -> Option<u32> {
        match self {
            CorpusSource::Language(spec) if spec.family.is_dyck() => Some(spec.k),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            CorpusSource::Language(spec) => spec.to_string(),
            CorpusSource::Metamer { order, source, .. } => format!("metamer({order}, {source})"),
            CorpusSource::External { description } => format!("external({description})"),
        }
    }
}
