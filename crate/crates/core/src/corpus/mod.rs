//! Fixed-window sequence packing and the packed-corpus manifest.
//!
//! Documents are concatenated with no separator token and cut into rows of
//! exactly `window_length` tokens. The final partial window is dropped and its
//! size recorded. Document starts live in the manifest.

pub(crate) mod format;
mod stats;

pub use format::{atomic_write, decode, encode, read_corpus, write_corpus, write_manifest, FORMAT_VERSION, MAGIC};
pub use stats::{corpus_report, depth_profile, depth_stats, CorpusReport, DepthProfile, LengthSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::CorpusSource;
use crate::token::{TokenId, TokenSeq};

pub const DEFAULT_WINDOW: usize = 2048;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub source: CorpusSource,
    pub vocab_size: u32,
    pub window_length: usize,
    pub total_tokens: u64,
    /// Packed tokens discarded after the last whole window.
    pub dropped_tokens: u64,
    pub seed: u64,
    /// Offset of each document's first token in the packed stream.
    pub boundaries: Vec<u64>,
    /// Generator truncation flag, parallel to `boundaries`.
    pub truncated: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackedCorpus {
    tokens: Vec<TokenId>,
    manifest: Manifest,
}

impl PackedCorpus {
    pub(crate) fn from_parts(tokens: Vec<TokenId>, manifest: Manifest) -> Self {
        debug_assert_eq!(tokens.len() as u64, manifest.total_tokens);
        PackedCorpus { tokens, manifest }
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn window_length(&self) -> usize {
        self.manifest.window_length
    }

    pub fn rows(&self) -> usize {
        self.tokens.len() / self.manifest.window_length
    }

    pub fn window(&self, row: usize) -> &[TokenId] {
        let w = self.manifest.window_length;
        &self.tokens[row * w..(row + 1) * w]
    }

    pub fn windows(&self) -> impl Iterator<Item = &[TokenId]> {
        self.tokens.chunks_exact(self.manifest.window_length)
    }

    /// The packed stream, row-major.
    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn document_count(&self) -> usize {
        self.manifest.boundaries.len()
    }

    /// Document `i` as stored; the last one may be cut by the dropped window.
    pub fn document(&self, i: usize) -> &[TokenId] {
        let b = &self.manifest.boundaries;
        let start = b[i] as usize;
        let end = b.get(i + 1).map_or(self.tokens.len(), |&e| e as usize);
        &self.tokens[start..end]
    }

    pub fn documents(&self) -> impl Iterator<Item = &[TokenId]> {
        (0..self.document_count()).map(move |i| self.document(i))
    }

    /// Splits the stream back into documents at the recorded boundaries.
    pub fn unpack(&self) -> Vec<TokenSeq> {
        (0..self.document_count())
            .map(|i| {
                TokenSeq::from_parts_unchecked(
                    self.document(i).to_vec(),
                    self.manifest.vocab_size,
                    self.manifest.truncated[i],
                )
            })
            .collect()
    }
}

/// Incremental packer. Tokens beyond the last whole window are discarded by
/// [`Packer::finish`].
#[derive(Debug)]
pub struct Packer {
    vocab_size: u32,
    window_length: usize,
    tokens: Vec<TokenId>,
    boundaries: Vec<u64>,
    truncated: Vec<bool>,
}

impl Packer {
    pub fn new(vocab_size: u32, window_length: usize) -> Result<Self> {
        if window_length == 0 {
            return Err(Error::InvalidSpec("window length must be at least 1".into()));
        }
        if vocab_size == 0 {
            return Err(Error::InvalidSpec("vocabulary size must be positive".into()));
        }
        Ok(Packer {
            vocab_size,
            window_length,
            tokens: Vec::new(),
            boundaries: Vec::new(),
            truncated: Vec::new(),
        })
    }

    pub fn push(&mut self, doc: &TokenSeq) -> Result<()> {
        if doc.vocab_size() != self.vocab_size {
            return Err(Error::VocabMismatch {
                expected: self.vocab_size,
                found: doc.vocab_size(),
                document: self.boundaries.len(),
            });
        }
        self.boundaries.push(self.tokens.len() as u64);
        self.truncated.push(doc.truncated());
        self.tokens.extend_from_slice(doc.tokens());
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn finish(self, source: CorpusSource, seed: u64) -> PackedCorpus {
        self.finish_capped(source, seed, usize::MAX)
    }

    /// Like [`Packer::finish`], keeping at most `max_tokens` (rounded down to
    /// whole windows).
    pub fn finish_capped(mut self, source: CorpusSource, seed: u64, max_tokens: usize) -> PackedCorpus {
        let kept = self.tokens.len().min(max_tokens) / self.window_length * self.window_length;
        let dropped = (self.tokens.len() - kept) as u64;
        self.tokens.truncate(kept);
        // Documents starting inside the dropped tail are gone entirely.
        let keep_docs = self.boundaries.partition_point(|&b| (b as usize) < kept);
        self.boundaries.truncate(keep_docs);
        self.truncated.truncate(keep_docs);
        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            source,
            vocab_size: self.vocab_size,
            window_length: self.window_length,
            total_tokens: kept as u64,
            dropped_tokens: dropped,
            seed,
            boundaries: self.boundaries,
            truncated: self.truncated,
        };
        PackedCorpus::from_parts(self.tokens, manifest)
    }
}

/// Packs documents that share one vocabulary.
pub fn pack<I>(docs: I, window_length: usize, source: CorpusSource, seed: u64) -> Result<PackedCorpus>
where
    I: IntoIterator<Item = TokenSeq>,
{
    let mut docs = docs.into_iter().peekable();
    let vocab_size = docs.peek().ok_or(Error::EmptyCorpus)?.vocab_size();
    let mut packer = Packer::new(vocab_size, window_length)?;
    for doc in docs {
        packer.push(&doc)?;
    }
    Ok(packer.finish(source, seed))
}
