//! Order-n Markov models fit by maximum likelihood and ancestral sampling of
//! "metamer" corpora that keep local statistics but not global structure.
//!
//! Counts are unsmoothed. The model keeps tables for every order up to `n`;
//! at sampling time an unseen context backs off by dropping its oldest token.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::format::atomic_write;
use crate::error::{Error, Result};
use crate::seed::doc_rng;
use crate::token::{TokenId, TokenSeq};

/// How a context is formed at the start of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextMode {
    /// Each document starts from a begin-of-document context padded with
    /// the reserved id `vocab_size`.
    ResetAtBoundary,
    /// The corpus is one stream; only the very first tokens see short contexts.
    Continuous,
}

impl ContextMode {
    fn name(self) -> &'static str {
        match self {
            ContextMode::ResetAtBoundary => "reset",
            ContextMode::Continuous => "continuous",
        }
    }
}

/// Next-token counts for one context, sorted by token.
pub type CountRow = Vec<(TokenId, u64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab_size: u32,
    total_tokens: u64,
    mode: ContextMode,
    source: String,
    /// `tables[m]` maps contexts of length `m` to next-token counts.
    tables: Vec<BTreeMap<Vec<TokenId>, CountRow>>,
}

fn check_order(order: usize) -> Result<()> {
    if (1..=3).contains(&order) {
        Ok(())
    } else {
        Err(Error::BadOrder(order))
    }
}

/// Packs up to three ids below `base` into one key; table position implies
/// the length.
fn pack_key(tokens: &[TokenId], base: u64) -> u64 {
    tokens.iter().fold(0, |acc, &t| acc * base + t as u64)
}

fn unpack_key(mut key: u64, len: usize, base: u64) -> Vec<TokenId> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (key % base) as TokenId;
        key /= base;
    }
    out
}

/// `counts[m]` maps packed `(context of length m, next)` to a count.
type Counts = Vec<FxHashMap<u64, u64>>;

fn merge(mut a: Counts, b: Counts) -> Counts {
    for (ta, tb) in a.iter_mut().zip(b) {
        for (key, c) in tb {
            *ta.entry(key).or_insert(0) += c;
        }
    }
    a
}

fn count_stream(tokens: &[TokenId], order: usize, bos: Option<TokenId>, base: u64, counts: &mut Counts) {
    let pad = if bos.is_some() { order - 1 } else { 0 };
    let mut history: Vec<TokenId> = vec![bos.unwrap_or(0); pad];
    history.extend_from_slice(tokens);
    for pos in pad..history.len() {
        for (m, table) in counts.iter_mut().enumerate() {
            if m > pos {
                break;
            }
            *table.entry(pack_key(&history[pos - m..=pos], base)).or_insert(0) += 1;
        }
    }
}

impl NGramModel {
    /// Maximum-likelihood fit. Documents must share one vocabulary.
    pub fn fit<'a, I>(docs: I, vocab_size: u32, order: usize, mode: ContextMode) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [TokenId]>,
    {
        check_order(order)?;
        let docs: Vec<&[TokenId]> = docs.into_iter().collect();
        let total_tokens: u64 = docs.iter().map(|d| d.len() as u64).sum();
        if total_tokens == 0 {
            return Err(Error::EmptyCorpus);
        }
        if let Some((position, &token)) = docs
            .iter()
            .flat_map(|d| d.iter())
            .enumerate()
            .find(|(_, &t)| t >= vocab_size)
        {
            return Err(Error::TokenOutOfVocab {
                token,
                position,
                vocab_size,
            });
        }

        let base = vocab_size as u64 + 1;
        let empty = || -> Counts { vec![FxHashMap::default(); order] };
        let counts = match mode {
            ContextMode::ResetAtBoundary => docs
                .par_iter()
                .fold(empty, |mut acc, doc| {
                    count_stream(doc, order, Some(vocab_size), base, &mut acc);
                    acc
                })
                .reduce(empty, merge),
            ContextMode::Continuous => {
                let stream: Vec<TokenId> = docs.concat();
                let mut acc = empty();
                count_stream(&stream, order, None, base, &mut acc);
                acc
            }
        };

        let tables = counts
            .into_iter()
            .enumerate()
            .map(|(m, table)| {
                let mut grouped: BTreeMap<Vec<TokenId>, CountRow> = BTreeMap::new();
                for (key, c) in table {
                    let mut gram = unpack_key(key, m + 1, base);
                    let next = gram.pop().expect("n-grams are non-empty");
                    grouped.entry(gram).or_default().push((next, c));
                }
                for row in grouped.values_mut() {
                    row.sort_unstable();
                }
                grouped
            })
            .collect();
        Ok(NGramModel {
            order,
            vocab_size,
            total_tokens,
            mode,
            source: String::new(),
            tables,
        })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    /// Reserved context id marking positions before a document start.
    pub fn bos(&self) -> TokenId {
        self.vocab_size
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn mode(&self) -> ContextMode {
        self.mode
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn context_count(&self) -> usize {
        self.tables.iter().map(BTreeMap::len).sum()
    }

    /// Contexts of length `order - 1` with their counts.
    pub fn top_contexts(&self) -> &BTreeMap<Vec<TokenId>, CountRow> {
        &self.tables[self.order - 1]
    }

    pub fn counts(&self, context: &[TokenId]) -> Option<&CountRow> {
        self.tables.get(context.len())?.get(context)
    }

    /// Normalized conditional distribution for an exact context.
    pub fn distribution(&self, context: &[TokenId]) -> Option<Vec<(TokenId, f64)>> {
        let row = self.counts(context)?;
        let total: u64 = row.iter().map(|&(_, c)| c).sum();
        Some(row.iter().map(|&(t, c)| (t, c as f64 / total as f64)).collect())
    }

    /// Longest suffix of `context` (at most `order - 1` tokens) that has counts.
    pub fn backoff<'c>(&self, context: &'c [TokenId]) -> Option<&'c [TokenId]> {
        let start = context.len().saturating_sub(self.order - 1);
        (start..=context.len())
            .map(|s| &context[s..])
            .find(|ctx| self.counts(ctx).is_some())
    }

    pub fn sampler(&self) -> Result<MetamerSampler<'_>> {
        let base = self.vocab_size as u64 + 1;
        let tables = self
            .tables
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|(ctx, row)| {
                        let weights =
                            WeightedIndex::new(row.iter().map(|&(_, c)| c)).map_err(|_| Error::DeadEnd(ctx.clone()))?;
                        Ok((pack_key(ctx, base), (row.iter().map(|&(t, _)| t).collect(), weights)))
                    })
                    .collect::<Result<FxHashMap<_, _>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MetamerSampler {
            model: self,
            base,
            tables,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let bos = self.bos();
        let _ = writeln!(out, "ngram-model 1");
        let _ = writeln!(out, "order {}", self.order);
        let _ = writeln!(out, "vocab_size {}", self.vocab_size);
        let _ = writeln!(out, "total_tokens {}", self.total_tokens);
        let _ = writeln!(out, "context_mode {}", self.mode.name());
        if !self.source.is_empty() {
            let _ = writeln!(out, "source {}", self.source);
        }
        let _ = writeln!(out, "contexts {}", self.context_count());
        for table in &self.tables {
            for (ctx, row) in table {
                let ctx_text = if ctx.is_empty() {
                    "-".to_string()
                } else {
                    ctx.iter()
                        .map(|&t| if t == bos { "^".to_string() } else { t.to_string() })
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                for &(t, c) in row {
                    let _ = writeln!(out, "{ctx_text}\t{t}\t{c}");
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, reason: &str| Error::ModelFormat {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (n, line) = lines.next().ok_or_else(|| err(0, "unexpected end of header"))?;
            let (k, v) = line.split_once(' ').ok_or_else(|| err(n, "expected `key value`"))?;
            if k != key {
                return Err(err(n, &format!("expected `{key}`, found `{k}`")));
            }
            Ok((n, v.to_string()))
        };
        let num = |(n, v): (usize, String)| v.trim().parse::<u64>().map_err(|_| err(n, "expected an integer"));

        if header("ngram-model")?.1 != "1" {
            return Err(err(1, "unsupported model version"));
        }
        let order = num(header("order")?)? as usize;
        check_order(order)?;
        let vocab_size = num(header("vocab_size")?)? as u32;
        let total_tokens = num(header("total_tokens")?)?;
        let (n, mode) = header("context_mode")?;
        let mode = match mode.as_str() {
            "reset" => ContextMode::ResetAtBoundary,
            "continuous" => ContextMode::Continuous,
            _ => return Err(err(n, "unknown context mode")),
        };
        let (n, next) = lines.next().ok_or_else(|| err(0, "missing `contexts` line"))?;
        let (source, contexts_line) = match next.split_once(' ') {
            Some(("source", s)) => (
                s.to_string(),
                lines.next().ok_or_else(|| err(n + 1, "missing `contexts` line"))?,
            ),
            _ => (String::new(), (n, next)),
        };
        let (cn, cl) = contexts_line;
        let declared = cl
            .strip_prefix("contexts ")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| err(cn, "expected `contexts N`"))?;

        let bos = vocab_size;
        let mut tables: Vec<BTreeMap<Vec<TokenId>, CountRow>> = vec![BTreeMap::new(); order];
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(ctx), Some(t), Some(c), None) = (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(err(n, "expected `context<TAB>token<TAB>count`"));
            };
            let ctx: Vec<TokenId> = if ctx == "-" {
                Vec::new()
            } else {
                ctx.split(' ')
                    .map(|s| {
                        if s == "^" {
                            Ok(bos)
                        } else {
                            s.parse().map_err(|_| err(n, "bad context token"))
                        }
                    })
                    .collect::<Result<_>>()?
            };
            if ctx.len() >= order {
                return Err(err(n, "context longer than order - 1"));
            }
            let t: TokenId = t.parse().map_err(|_| err(n, "bad token"))?;
            if t >= vocab_size || ctx.iter().any(|&x| x > bos) {
                return Err(err(n, "token outside vocabulary"));
            }
            let c: u64 = c.parse().map_err(|_| err(n, "bad count"))?;
            tables[ctx.len()].entry(ctx).or_default().push((t, c));
        }
        for row in tables.iter_mut().flat_map(|t| t.values_mut()) {
            row.sort_unstable();
        }
        let model = NGramModel {
            order,
            vocab_size,
            total_tokens,
            mode,
            source,
            tables,
        };
        if model.context_count() != declared {
            return Err(err(
                cn,
                &format!("declared {declared} contexts, found {}", model.context_count()),
            ));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        atomic_write(path.as_ref(), self.to_text().as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

/// Fits an order-`order` model on a corpus of documents.
pub fn fit_ngram<'a, I>(docs: I, order: usize) -> Result<NGramModel>
where
    I: IntoIterator<Item = &'a TokenSeq>,
{
    check_order(order)?;
    let docs: Vec<&TokenSeq> = docs.into_iter().collect();
    let first = docs.first().ok_or(Error::EmptyCorpus)?;
    let vocab_size = first.vocab_size();
    if let Some((i, d)) = docs.iter().enumerate().find(|(_, d)| d.vocab_size() != vocab_size) {
        return Err(Error::VocabMismatch {
            expected: vocab_size,
            found: d.vocab_size(),
            document: i,
        });
    }
    NGramModel::fit(
        docs.iter().map(|d| d.tokens()),
        vocab_size,
        order,
        ContextMode::ResetAtBoundary,
    )
}

/// Continuations of one context and their sampling weights.
type Row = (Vec<TokenId>, WeightedIndex<u64>);

pub struct MetamerSampler<'m> {
    model: &'m NGramModel,
    base: u64,
    tables: Vec<FxHashMap<u64, Row>>,
}

impl MetamerSampler<'_> {
    /// Ancestral sample of one document, keyed by `(seed, index)`.
    pub fn document(&self, seed: u64, index: u64, length: usize) -> Result<TokenSeq> {
        let model = self.model;
        let mut rng = doc_rng(seed, index);
        let pad = match model.mode {
            ContextMode::ResetAtBoundary => model.order - 1,
            ContextMode::Continuous => 0,
        };
        let mut history: Vec<TokenId> = vec![model.bos(); pad];
        history.reserve(length);
        for _ in 0..length {
            let start = history.len().saturating_sub(model.order - 1);
            let full = &history[start..];
            let (tokens, weights) = (0..=full.len())
                .find_map(|s| self.tables[full.len() - s].get(&pack_key(&full[s..], self.base)))
                .ok_or_else(|| Error::DeadEnd(full.to_vec()))?;
            history.push(tokens[weights.sample(&mut rng)]);
        }
        history.drain(..pad);
        Ok(TokenSeq::from_parts_unchecked(history, model.vocab_size, false))
    }
}

/// Samples documents of `doc_length` tokens until exactly `token_budget`
/// tokens exist; the last document may be shorter.
pub fn sample_metamer(model: &NGramModel, token_budget: usize, doc_length: usize, seed: u64) -> Result<Vec<TokenSeq>> {
    if token_budget == 0 || doc_length == 0 {
        return Err(Error::InvalidSpec(
            "token budget and document length must be positive".into(),
        ));
    }
    let sampler = model.sampler()?;
    let docs = token_budget.div_ceil(doc_length);
    (0..docs)
        .into_par_iter()
        .map(|d| {
            let len = doc_length.min(token_budget - d * doc_length);
            sampler.document(seed, d as u64, len)
        })
        .collect()
}

/// Empirical n-gram counts over the inside of documents (no padding).
#[derive(Debug, Clone)]
pub struct NGramCounts {
    n: usize,
    base: u64,
    counts: FxHashMap<u64, u64>,
}

impl NGramCounts {
    pub fn of<'a, I>(docs: I, n: usize, vocab_size: u32) -> Self
    where
        I: IntoIterator<Item = &'a [TokenId]>,
    {
        assert!((1..=3).contains(&n), "n-gram length must be 1, 2 or 3");
        let base = vocab_size as u64 + 1;
        let mut counts = FxHashMap::default();
        for doc in docs {
            for gram in doc.windows(n) {
                *counts.entry(pack_key(gram, base)).or_insert(0) += 1;
            }
        }
        NGramCounts { n, base, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, gram: &[TokenId]) -> u64 {
        if gram.len() != self.n {
            return 0;
        }
        self.counts.get(&pack_key(gram, self.base)).copied().unwrap_or(0)
    }

    /// Total-variation distance between the two empirical distributions.
    pub fn total_variation(&self, other: &NGramCounts) -> f64 {
        assert_eq!((self.n, self.base), (other.n, other.base), "incomparable n-gram tables");
        total_variation(&self.counts, &other.counts)
    }
}

/// Total-variation distance between two count tables viewed as distributions.
pub fn total_variation<K: std::hash::Hash + Eq, S: std::hash::BuildHasher>(
    a: &HashMap<K, u64, S>,
    b: &HashMap<K, u64, S>,
) -> f64 {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return if na == nb { 0.0 } else { 1.0 };
    }
    let (na, nb) = (na as f64, nb as f64);
    let mut sum = 0.0;
    for (k, &ca) in a {
        let cb = b.get(k).copied().unwrap_or(0);
        sum += (ca as f64 / na - cb as f64 / nb).abs();
    }
    for (k, &cb) in b {
        if !a.contains_key(k) {
            sum += cb as f64 / nb;
        }
    }
    sum / 2.0
}
