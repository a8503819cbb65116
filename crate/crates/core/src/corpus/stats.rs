use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::PackedCorpus;
use crate::error::{Error, Result};
use crate::recognize::DepthTrace;
use crate::token::TokenId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    /// Depth after each token, summed over all positions.
    pub histogram: BTreeMap<i64, u64>,
    pub positions: u64,
    pub max_depth: i64,
    pub mean_depth: f64,
}

impl DepthProfile {
    /// Histogram as frequencies over `0..=max`.
    pub fn frequencies(&self, max: i64) -> Vec<f64> {
        let total = self.positions.max(1) as f64;
        (0..=max)
            .map(|d| *self.histogram.get(&d).unwrap_or(&0) as f64 / total)
            .collect()
    }
}

/// Depth profile over documents, with depth reset at each document start.
pub fn depth_profile<'a, I>(docs: I, k: u32) -> Result<DepthProfile>
where
    I: IntoIterator<Item = &'a [TokenId]>,
{
    let mut histogram = BTreeMap::new();
    let mut positions = 0u64;
    let mut sum = 0i128;
    for doc in docs {
        for d in DepthTrace::of(doc, k)?.depths {
            *histogram.entry(d).or_insert(0u64) += 1;
            positions += 1;
            sum += d as i128;
        }
    }
    Ok(DepthProfile {
        max_depth: histogram.keys().next_back().copied().unwrap_or(0),
        mean_depth: if positions == 0 {
            0.0
        } else {
            sum as f64 / positions as f64
        },
        histogram,
        positions,
    })
}

pub fn depth_stats(corpus: &PackedCorpus) -> Result<DepthProfile> {
    let source = &corpus.manifest().source;
    let k = source.dyck_k().ok_or_else(|| Error::NotDyck(source.label()))?;
    depth_profile(corpus.documents(), k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub source: String,
    pub total_tokens: u64,
    pub windows: usize,
    pub dropped_tokens: u64,
    pub vocab_size: u32,
    pub symbols_used: usize,
    pub vocab_usage: Vec<u64>,
    pub documents: usize,
    pub document_length: Option<LengthSummary>,
    pub truncation_rate: f64,
    pub unigram_entropy_bits: f64,
}

pub fn corpus_report(corpus: &PackedCorpus) -> CorpusReport {
    let m = corpus.manifest();
    let mut usage = vec![0u64; m.vocab_size as usize];
    for &t in corpus.tokens() {
        usage[t as usize] += 1;
    }
    let total = corpus.tokens().len() as f64;
    let entropy = if total == 0.0 {
        0.0
    } else {
        usage
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / total;
                -p * p.log2()
            })
            .sum::<f64>()
            .max(0.0)
    };
    let lengths: Vec<usize> = corpus.documents().map(<[TokenId]>::len).collect();
    let document_length = (!lengths.is_empty()).then(|| LengthSummary {
        min: *lengths.iter().min().unwrap(),
        max: *lengths.iter().max().unwrap(),
        mean: lengths.iter().sum::<usize>() as f64 / lengths.len() as f64,
    });
    let truncated = m.truncated.iter().filter(|&&t| t).count();
    CorpusReport {
        source: m.source.label(),
        total_tokens: m.total_tokens,
        windows: corpus.rows(),
        dropped_tokens: m.dropped_tokens,
        vocab_size: m.vocab_size,
        symbols_used: usage.iter().filter(|&&c| c > 0).count(),
        vocab_usage: usage,
        documents: lengths.len(),
        document_length,
        truncation_rate: if lengths.is_empty() {
            0.0
        } else {
            truncated as f64 / lengths.len() as f64
        },
        unigram_entropy_bits: entropy,
    }
}
