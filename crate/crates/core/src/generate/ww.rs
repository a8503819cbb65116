use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::doc_rng;
use crate::spec::HalfLength;
use crate::token::TokenSeq;

/// Copy-language generator: draws `m` from the half-length distribution and
/// `w` as `m` i.i.d. uniform tokens, then emits `w w`.
#[derive(Debug, Clone)]
pub struct WwGenerator {
    vocab_size: u32,
    half_length: HalfLength,
    seed: u64,
}

impl WwGenerator {
    pub fn new(vocab_size: u32, half_length: HalfLength, seed: u64) -> Result<Self> {
        if vocab_size < 1 {
            return Err(Error::InvalidSpec("ww vocabulary size must be at least 1".into()));
        }
        let half_length = half_length.validate()?;
        Ok(WwGenerator {
            vocab_size,
            half_length,
            seed,
        })
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn document(&self, index: u64) -> TokenSeq {
        let mut rng = doc_rng(self.seed, index);
        let m = match self.half_length {
            HalfLength::Fixed { len } => len,
            HalfLength::Uniform { min, max } => rng.gen_range(min..=max),
        };
        let mut tokens: Vec<u32> = (0..m).map(|_| rng.gen_range(0..self.vocab_size)).collect();
        tokens.extend_from_within(..);
        TokenSeq::from_parts_unchecked(tokens, self.vocab_size, false)
    }
}

pub fn gen_ww(
    vocab_size: u32,
    half_length: HalfLength,
    count: usize,
    seed: u64,
) -> Result<impl Iterator<Item = TokenSeq>> {
    let generator = WwGenerator::new(vocab_size, half_length, seed)?;
    Ok((0..count as u64).map(move |i| generator.document(i)))
}
