//! k-Dyck as a first-order formula with counting quantifiers.
//!
//! Positions are `1..=n`. The macros, evaluated by materializing every unary
//! and binary predicate (O(n²) time):
//!
//! ```text
//! depth(i)     = #j <= i [Q_((j)] - #j <= i [Q_)(j)]
//! dindex(i)    = #j <= i [depth(j) = depth(i) ∧ (Q_((j) ↔ Q_((i))]
//! paired(j, i) = [depth(j) = depth(i) + 1] ∧ [dindex(j) = dindex(i)]
//! match(j, i)  = ⋁_κ [Q_(κ(j) ∧ Q_)κ(i)]
//! closed(i)    = ∃ j <= i [paired(j, i) ∧ match(j, i)]
//!
//! accept       = [depth(n) = 0] ∧ [#i <= n [depth(i) < 0] = 0]
//!                ∧ ∀ i <= n [Q_)(i) → closed(i)]
//! ```
//!
//! An open at depth `d` (counted inclusively) and its partner close sit at
//! depth `d` and `d - 1`, and the m-th open reaching depth `d` pairs with the
//! m-th close leaving it. `dindex` therefore counts only positions of the
//! same polarity as `i`. Counting opens and closes together
//! ([`DindexConvention::MixedPolarity`]) misindexes `(())`: the inner close
//! at depth 1 gets dindex 2 while its partner open at depth 2 has dindex 1.
//!
//! The final quantifier ranges over closing positions; an open position can
//! never satisfy `match(j, i)` as the right-hand argument.

use crate::error::Result;
use crate::token::{Bracket, Brackets, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DindexConvention {
    /// Count only positions of the same polarity (open or close) as `i`.
    #[default]
    SamePolarity,
    /// `#j <= i [depth(j) = depth(i)]` over all positions.
    MixedPolarity,
}

pub fn recognize_fom_kdyck(tokens: &[TokenId], k: u32) -> Result<bool> {
    recognize_fom_kdyck_with(tokens, k, DindexConvention::SamePolarity)
}

pub fn recognize_fom_kdyck_with(tokens: &[TokenId], k: u32, convention: DindexConvention) -> Result<bool> {
    let brackets = Brackets::new(k)?.decode_all(tokens)?;
    let n = brackets.len();
    let is_open = |i: usize| matches!(brackets[i], Bracket::Open(_));

    // depth(i) via the two counting quantifiers, materialized per position.
    let mut depth = vec![0i64; n];
    let (mut opens, mut closes) = (0i64, 0i64);
    for (i, d) in depth.iter_mut().enumerate() {
        if is_open(i) {
            opens += 1;
        } else {
            closes += 1;
        }
        *d = opens - closes;
    }

    if depth.last().copied().unwrap_or(0) != 0 {
        return Ok(false);
    }
    if depth.iter().filter(|&&d| d < 0).count() != 0 {
        return Ok(false);
    }

    let dindex: Vec<usize> = (0..n)
        .map(|i| {
            (0..=i)
                .filter(|&j| {
                    depth[j] == depth[i]
                        && match convention {
                            DindexConvention::SamePolarity => is_open(j) == is_open(i),
                            DindexConvention::MixedPolarity => true,
                        }
                })
                .count()
        })
        .collect();

    let paired = |j: usize, i: usize| depth[j] == depth[i] + 1 && dindex[j] == dindex[i];
    let matched = |j: usize, i: usize| match (brackets[j], brackets[i]) {
        (Bracket::Open(a), Bracket::Close(b)) => a == b,
        _ => false,
    };
    let closed = |i: usize| (0..=i).any(|j| paired(j, i) && matched(j, i));

    Ok((0..n).filter(|&i| !is_open(i)).all(closed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(recognize_fom_kdyck(&[0, 1, 2, 5, 4, 3], 3).unwrap());
        assert!(recognize_fom_kdyck(&[0, 1], 1).unwrap());
        assert!(recognize_fom_kdyck(&[0, 0, 1, 1], 1).unwrap());
        assert!(recognize_fom_kdyck(&[], 2).unwrap());
        assert!(!recognize_fom_kdyck(&[0, 1, 2, 3], 2).unwrap());
        assert!(!recognize_fom_kdyck(&[0, 1, 2, 4, 3, 5], 3).unwrap());
        assert!(recognize_fom_kdyck(&[4], 2).is_err());
    }

    #[test]
    fn mixed_polarity_index_misses_nested_pairs() {
        let nested = [0, 0, 1, 1];
        assert!(recognize_fom_kdyck_with(&[0, 1], 1, DindexConvention::MixedPolarity).unwrap());
        assert!(!recognize_fom_kdyck_with(&nested, 1, DindexConvention::MixedPolarity).unwrap());
        assert!(recognize_fom_kdyck_with(&nested, 1, DindexConvention::SamePolarity).unwrap());
    }
}
