//! Seeded generators for the pre-pretraining and evaluation datasets.
//!
//! Every generator is a pure function of its parameters and the document
//! index; see [`crate::seed`].

mod dyck;
mod random;
mod retrieval;
mod ww;

pub use dyck::{gen_dyck, DyckGenerator};
pub use random::{gen_random, RandomGenerator};
pub use retrieval::{default_names, default_wordlist, gen_retrieval_eval, RetrievalDoc, RetrievalGenerator, Speaker};
pub use ww::{gen_ww, WwGenerator};

use crate::error::Result;
use crate::spec::{Family, LanguageSpec};
use crate::token::TokenSeq;

/// Any language generator selected by [`LanguageSpec::family`].
#[derive(Debug, Clone)]
pub enum Generator {
    Dyck(DyckGenerator),
    Ww(WwGenerator),
    Random(RandomGenerator),
}

impl Generator {
    pub fn new(spec: &LanguageSpec) -> Result<Self> {
        spec.validate()?;
        Ok(match spec.family {
            Family::DyckNested | Family::DyckShuffle => Generator::Dyck(DyckGenerator::new(spec.clone())?),
            Family::Ww => Generator::Ww(WwGenerator::new(spec.k, spec.ww_half_length(), spec.seed)?),
            Family::RandomUniform => Generator::Random(RandomGenerator::new(spec.k, spec.max_length, spec.seed)?),
        })
    }

    pub fn vocab_size(&self) -> u32 {
        match self {
            Generator::Dyck(g) => g.vocab_size(),
            Generator::Ww(g) => g.vocab_size(),
            Generator::Random(g) => g.vocab_size(),
        }
    }

    pub fn document(&self, index: u64) -> TokenSeq {
        match self {
            Generator::Dyck(g) => g.document(index),
            Generator::Ww(g) => g.document(index),
            Generator::Random(g) => g.document(index),
        }
    }

    pub fn documents(&self, count: usize) -> impl Iterator<Item = TokenSeq> + '_ {
        (0..count as u64).map(move |i| self.document(i))
    }
}
