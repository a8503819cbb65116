use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::doc_rng;
use crate::spec::{Family, LanguageSpec};
use crate::token::{Brackets, TokenSeq};

/// Capped random-walk generator for nested and shuffle Dyck documents.
///
/// Per position: depth 0 forces an open, depth `max_depth` forces a close,
/// otherwise open with probability `p_open`. Opens draw a type uniformly.
/// Shuffle closes draw uniformly among types with a positive open count;
/// nested closes pop the most recent unclosed bracket. Both families share
/// the walk, so their depth trajectories have the same law.
#[derive(Debug, Clone)]
pub struct DyckGenerator {
    spec: LanguageSpec,
    brackets: Brackets,
}

impl DyckGenerator {
    pub fn new(spec: LanguageSpec) -> Result<Self> {
        if !spec.family.is_dyck() {
            return Err(Error::InvalidSpec(format!("{} is not a Dyck family", spec.family)));
        }
        spec.validate()?;
        let brackets = Brackets::new(spec.k)?;
        Ok(DyckGenerator { spec, brackets })
    }

    pub fn spec(&self) -> &LanguageSpec {
        &self.spec
    }

    pub fn vocab_size(&self) -> u32 {
        self.brackets.vocab_size()
    }

    pub fn document(&self, index: u64) -> TokenSeq {
        let spec = &self.spec;
        let mut rng = doc_rng(spec.seed, index);
        let k = spec.k;
        let max_depth = spec.max_depth as usize;

        let mut tokens = Vec::with_capacity(spec.max_length);
        // Nested: stack of open types. Shuffle: per-type counts plus the set
        // of types with a positive count (unordered, swap-remove).
        let mut stack: Vec<u32> = Vec::new();
        let mut counts = vec![0u32; k as usize];
        let mut active: Vec<u32> = Vec::new();
        let mut depth = 0usize;

        while tokens.len() < spec.max_length {
            let open = if depth == 0 {
                true
            } else if depth >= max_depth {
                false
            } else {
                rng.gen::<f64>() < spec.p_open
            };

            if open {
                let kind = rng.gen_range(0..k);
                tokens.push(self.brackets.open(kind));
                match spec.family {
                    Family::DyckNested => stack.push(kind),
                    _ => {
                        if counts[kind as usize] == 0 {
                            active.push(kind);
                        }
                        counts[kind as usize] += 1;
                    }
                }
                depth += 1;
            } else {
                let kind = match spec.family {
                    Family::DyckNested => stack.pop().expect("positive depth implies a non-empty stack"),
                    _ => {
                        let pick = if active.len() == 1 {
                            0
                        } else {
                            rng.gen_range(0..active.len())
                        };
                        let kind = active[pick];
                        counts[kind as usize] -= 1;
                        if counts[kind as usize] == 0 {
                            active.swap_remove(pick);
                        }
                        kind
                    }
                };
                tokens.push(self.brackets.close(kind));
                depth -= 1;
            }
        }

        TokenSeq::from_parts_unchecked(tokens, self.vocab_size(), depth != 0)
    }

    pub fn documents(&self, count: usize) -> impl Iterator<Item = TokenSeq> + '_ {
        (0..count as u64).map(move |i| self.document(i))
    }
}

/// Emits `count` Dyck documents of exactly `spec.max_length` tokens.
pub fn gen_dyck(spec: &LanguageSpec, count: usize) -> Result<impl Iterator<Item = TokenSeq>> {
    if count == 0 {
        return Err(Error::InvalidSpec("document count must be at least 1".into()));
    }
    let generator = DyckGenerator::new(spec.clone())?;
    Ok((0..count as u64).map(move |i| generator.document(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, k: u32) -> LanguageSpec {
        LanguageSpec::new(family, k)
    }

    #[test]
    fn depth_cap_one_forces_alternation() {
        let s = spec(Family::DyckNested, 1).with_max_depth(1).with_max_length(6);
        let doc = gen_dyck(&s, 1).unwrap().next().unwrap();
        assert_eq!(doc.tokens(), &[0, 1, 0, 1, 0, 1]);
        assert!(!doc.truncated());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_dyck(&spec(Family::DyckShuffle, 0), 1).is_err());
        assert!(gen_dyck(&spec(Family::DyckShuffle, 2).with_max_depth(0), 1).is_err());
        assert!(gen_dyck(&spec(Family::DyckShuffle, 2).with_max_length(1), 1).is_err());
        assert!(gen_dyck(&spec(Family::DyckShuffle, 2).with_p_open(-0.1), 1).is_err());
        assert!(gen_dyck(&spec(Family::DyckShuffle, 2), 0).is_err());
        assert!(gen_dyck(&spec(Family::Ww, 2), 1).is_err());
    }

    #[test]
    fn documents_have_exact_length_and_bounded_depth() {
        let s = spec(Family::DyckShuffle, 8).with_max_length(500).with_seed(3);
        for doc in gen_dyck(&s, 50).unwrap() {
            assert_eq!(doc.len(), 500);
            let mut depth = 0i64;
            for &t in doc.tokens() {
                depth += if t < 8 { 1 } else { -1 };
                assert!((0..=16).contains(&depth));
            }
            assert_eq!(doc.truncated(), depth != 0);
        }
    }

    #[test]
    fn k1_families_coincide() {
        let nested = spec(Family::DyckNested, 1).with_seed(11).with_max_length(300);
        let shuffle = LanguageSpec {
            family: Family::DyckShuffle,
            ..nested.clone()
        };
        let a: Vec<_> = gen_dyck(&nested, 40).unwrap().collect();
        let b: Vec<_> = gen_dyck(&shuffle, 40).unwrap().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn p_open_one_saturates_then_alternates() {
        let s = spec(Family::DyckNested, 2)
            .with_p_open(1.0)
            .with_max_depth(3)
            .with_max_length(10);
        let doc = gen_dyck(&s, 1).unwrap().next().unwrap();
        let signs: Vec<bool> = doc.tokens().iter().map(|&t| t < 2).collect();
        assert_eq!(
            signs,
            vec![true, true, true, false, true, false, true, false, true, false]
        );
    }
}
