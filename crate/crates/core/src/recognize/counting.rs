//! Deciders written as counting formulas over prefixes.
//!
//! `#j <= i [P(j)]` is the number of positions up to `i` satisfying `P`.
//! A running tally evaluates it for every `i` in one pass.

use crate::error::{Error, Result};
use crate::token::{Bracket, Brackets, TokenId};

/// Prefix depths over all bracket types: `depths[i]` is the number of opens
/// minus the number of closes among the first `i + 1` tokens. The empty
/// prefix has depth 0 and is not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthTrace {
    pub depths: Vec<i64>,
}

impl DepthTrace {
    pub fn of(tokens: &[TokenId], k: u32) -> Result<Self> {
        let brackets = Brackets::new(k)?.decode_all(tokens)?;
        let mut depth = 0i64;
        let depths = brackets
            .iter()
            .map(|b| {
                depth += match b {
                    Bracket::Open(_) => 1,
                    Bracket::Close(_) => -1,
                };
                depth
            })
            .collect();
        Ok(DepthTrace { depths })
    }

    pub fn final_depth(&self) -> i64 {
        self.depths.last().copied().unwrap_or(0)
    }

    pub fn min_depth(&self) -> i64 {
        self.depths.iter().copied().min().unwrap_or(0).min(0)
    }
}

/// 1-Dyck as the two-conjunct counting formula
/// `[depth(n) = 0] ∧ #i <= n [depth(i) < 0] = 0`
/// over the alphabet `0 = (`, `1 = )`.
pub fn recognize_counting_1dyck(tokens: &[TokenId]) -> Result<bool> {
    let mut opens = 0i64;
    let mut closes = 0i64;
    let mut negative_prefixes = 0usize;
    for (position, &token) in tokens.iter().enumerate() {
        match token {
            0 => opens += 1,
            1 => closes += 1,
            _ => {
                return Err(Error::TokenOutOfVocab {
                    token,
                    position,
                    vocab_size: 2,
                })
            }
        }
        if opens - closes < 0 {
            negative_prefixes += 1;
        }
    }
    Ok(opens - closes == 0 && negative_prefixes == 0)
}

/// k-Shuffle Dyck: for every bracket type independently, opens and closes
/// balance over the whole string and no prefix has more closes than opens.
pub fn recognize_shuffle(tokens: &[TokenId], k: u32) -> Result<bool> {
    let brackets = Brackets::new(k)?.decode_all(tokens)?;
    let mut balance = vec![0i64; k as usize];
    let mut violations = vec![0usize; k as usize];
    for b in brackets {
        match b {
            Bracket::Open(kind) => balance[kind as usize] += 1,
            Bracket::Close(kind) => {
                balance[kind as usize] -= 1;
                if balance[kind as usize] < 0 {
                    violations[kind as usize] += 1;
                }
            }
        }
    }
    Ok(balance.iter().zip(&violations).all(|(&b, &v)| b == 0 && v == 0))
}
