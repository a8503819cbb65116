//! Token-budgeted dataset builds shared by the command line and configs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{DatasetKind, PipelineConfig};
use crate::corpus::{write_corpus, write_manifest, PackedCorpus, Packer};
use crate::error::{Error, Result};
use crate::generate::Generator;
use crate::metamer::{sample_metamer, ContextMode, NGramModel};
use crate::spec::{CorpusSource, LanguageSpec};

const BATCH: usize = 256;

/// Training batch geometry used to convert token budgets into optimizer steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGeometry {
    pub batch_size: usize,
    pub sequence_length: usize,
}

impl StepGeometry {
    /// Effective batch 32 of 2048-token sequences.
    pub const DEFAULT: StepGeometry = StepGeometry {
        batch_size: 32,
        sequence_length: 2048,
    };

    pub fn tokens_per_step(&self) -> u64 {
        (self.batch_size * self.sequence_length) as u64
    }

    pub fn steps(&self, tokens: u64) -> f64 {
        tokens as f64 / self.tokens_per_step() as f64
    }
}

/// Generates documents until `floor(token_budget / window) * window` tokens
/// are packed. Documents are produced in parallel batches; order is by index.
pub fn generate_corpus(spec: &LanguageSpec, token_budget: u64, window: usize) -> Result<PackedCorpus> {
    let generator = Generator::new(spec)?;
    let mut packer = Packer::new(generator.vocab_size(), window)?;
    let need = (token_budget as usize / window) * window;
    let mut next = 0u64;
    while packer.len() < need {
        let docs: Vec<_> = (next..next + BATCH as u64)
            .into_par_iter()
            .map(|i| generator.document(i))
            .collect();
        next += BATCH as u64;
        for doc in &docs {
            if packer.len() >= need {
                break;
            }
            packer.push(doc)?;
        }
    }
    Ok(packer.finish_capped(CorpusSource::Language(spec.clone()), spec.seed, need))
}

/// Fits an n-gram model on a packed corpus, one context reset per document.
pub fn fit_corpus(corpus: &PackedCorpus, order: usize) -> Result<NGramModel> {
    let m = corpus.manifest();
    Ok(
        NGramModel::fit(corpus.documents(), m.vocab_size, order, ContextMode::ResetAtBoundary)?
            .with_source(m.source.label()),
    )
}

/// Samples a metamer corpus of `floor(token_budget / window)` windows.
pub fn metamer_corpus(
    model: &NGramModel,
    token_budget: u64,
    doc_length: usize,
    window: usize,
    seed: u64,
) -> Result<PackedCorpus> {
    let need = (token_budget as usize / window) * window;
    let mut packer = Packer::new(model.vocab_size(), window)?;
    if need > 0 {
        for doc in sample_metamer(model, need, doc_length, seed)? {
            packer.push(&doc)?;
        }
    }
    let source = CorpusSource::Metamer {
        order: model.order(),
        source: model.source().to_string(),
        seed,
    };
    Ok(packer.finish(source, seed))
}

pub fn corpus_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.bin"))
}

pub fn manifest_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}.manifest.json"))
}

/// Writes `<name>.bin` and `<name>.manifest.json` under `dir`.
pub fn save(corpus: &PackedCorpus, dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = corpus_path(dir, name);
    write_corpus(corpus, &path)?;
    write_manifest(corpus.manifest(), manifest_path(dir, name))?;
    Ok(path)
}

/// Builds every dataset in the config: generated languages first, then
/// metamers of them.
pub fn run_config(config: &PipelineConfig, dir: &Path) -> Result<Vec<(String, PackedCorpus)>> {
    let mut built: Vec<(String, PackedCorpus)> = Vec::new();
    for d in &config.datasets {
        if let DatasetKind::Language(spec) = &d.kind {
            let corpus = generate_corpus(spec, d.tokens, config.window_length)?;
            save(&corpus, dir, &d.name)?;
            built.push((d.name.clone(), corpus));
        }
    }
    for d in &config.datasets {
        if let DatasetKind::Metamer { reference, seed } = &d.kind {
            let source = &built
                .iter()
                .find(|(n, _)| *n == reference.source)
                .expect("sources validated at parse time")
                .1;
            let model = fit_corpus(source, reference.order)?;
            let doc_length = reference.doc_length.unwrap_or(match &source.manifest().source {
                CorpusSource::Language(spec) => spec.max_length,
                _ => config.window_length,
            });
            let corpus = metamer_corpus(&model, d.tokens, doc_length, config.window_length, *seed)?;
            save(&corpus, dir, &d.name)?;
            built.push((d.name.clone(), corpus));
        }
    }
    Ok(built)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Family;

    #[test]
    fn budget_rounds_down_to_whole_windows() {
        let spec = LanguageSpec::new(Family::DyckShuffle, 4)
            .with_max_length(100)
            .with_seed(1);
        let c = generate_corpus(&spec, 1000, 64).unwrap();
        assert_eq!(c.rows(), 15);
        assert_eq!(c.tokens().len(), 960);
        assert_eq!(c.manifest().boundaries.len(), 10);
    }

    #[test]
    fn ww_budget_is_capped() {
        let spec = LanguageSpec::new(Family::Ww, 16).with_max_length(400);
        let c = generate_corpus(&spec, 100, 10).unwrap();
        assert_eq!(c.tokens().len(), 100);
    }

    #[test]
    fn tokens_per_step() {
        assert_eq!(StepGeometry::DEFAULT.tokens_per_step(), 65_536);
    }
}
