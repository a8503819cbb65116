use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::doc_rng;
use crate::token::TokenSeq;

/// I.i.d. uniform tokens: vocabulary 2 is the random-binary baseline and
/// vocabulary 128 the random-integer baseline.
#[derive(Debug, Clone)]
pub struct RandomGenerator {
    vocab_size: u32,
    doc_length: usize,
    seed: u64,
}

impl RandomGenerator {
    pub fn new(vocab_size: u32, doc_length: usize, seed: u64) -> Result<Self> {
        if vocab_size < 2 {
            return Err(Error::InvalidSpec(format!(
                "random vocabulary size must be at least 2, got {vocab_size}"
            )));
        }
        if doc_length == 0 {
            return Err(Error::InvalidSpec("document length must be positive".into()));
        }
        Ok(RandomGenerator {
            vocab_size,
            doc_length,
            seed,
        })
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn document(&self, index: u64) -> TokenSeq {
        let mut rng = doc_rng(self.seed, index);
        let tokens = (0..self.doc_length)
            .map(|_| rng.gen_range(0..self.vocab_size))
            .collect();
        TokenSeq::from_parts_unchecked(tokens, self.vocab_size, false)
    }
}

pub fn gen_random(
    vocab_size: u32,
    doc_length: usize,
    count: usize,
    seed: u64,
) -> Result<impl Iterator<Item = TokenSeq>> {
    let generator = RandomGenerator::new(vocab_size, doc_length, seed)?;
    Ok((0..count as u64).map(move |i| generator.document(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_range() {
        for doc in gen_random(2, 100, 10, 1).unwrap() {
            assert!(doc.tokens().iter().all(|&t| t <= 1));
        }
    }

    #[test]
    fn deterministic() {
        let a: Vec<_> = gen_random(128, 64, 5, 42).unwrap().collect();
        let b: Vec<_> = gen_random(128, 64, 5, 42).unwrap().collect();
        assert_eq!(a, b);
        let c: Vec<_> = gen_random(128, 64, 5, 43).unwrap().collect();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_unary_vocab() {
        assert!(gen_random(1, 10, 1, 0).is_err());
    }
}
