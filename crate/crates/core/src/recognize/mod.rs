//! Membership deciders for the pre-pretraining languages.
//!
//! All Dyck deciders accept the empty string. The copy language rejects it:
//! `w` must be non-empty.

mod counting;
mod fom;
mod stack;

pub use counting::{recognize_counting_1dyck, recognize_shuffle, DepthTrace};
pub use fom::{recognize_fom_kdyck, recognize_fom_kdyck_with, DindexConvention};
pub use stack::recognize_stack_kdyck;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::token::{Brackets, TokenId};

/// `w w` with `w` non-empty.
pub fn recognize_ww(tokens: &[TokenId]) -> bool {
    let n = tokens.len();
    if n == 0 || !n.is_multiple_of(2) {
        return false;
    }
    let (first, second) = tokens.split_at(n / 2);
    first == second
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub k: u32,
    /// Only evaluated for `k = 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dyck1_counting: Option<bool>,
    pub kdyck_stack: bool,
    pub kdyck_fom: bool,
    pub shuffle: bool,
    pub ww: bool,
    pub disagreement: bool,
}

/// Runs every decider applicable to a `2k`-symbol bracket sequence.
pub fn classify(tokens: &[TokenId], k: u32) -> Result<MembershipVerdict> {
    Brackets::new(k)?.decode_all(tokens)?;
    let dyck1_counting = if k == 1 {
        Some(recognize_counting_1dyck(tokens)?)
    } else {
        None
    };
    let kdyck_stack = recognize_stack_kdyck(tokens, k)?;
    let kdyck_fom = recognize_fom_kdyck(tokens, k)?;
    Ok(MembershipVerdict {
        k,
        dyck1_counting,
        kdyck_stack,
        kdyck_fom,
        shuffle: recognize_shuffle(tokens, k)?,
        ww: recognize_ww(tokens),
        disagreement: kdyck_stack != kdyck_fom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ww_examples() {
        assert!(recognize_ww(&[1, 2, 3, 1, 2, 3]));
        assert!(!recognize_ww(&[1, 2, 1, 3]));
        assert!(!recognize_ww(&[1, 2, 1]));
        assert!(!recognize_ww(&[]));
    }

    #[test]
    fn classify_crossing_string() {
        let v = classify(&[0, 1, 2, 4, 3, 5], 3).unwrap();
        assert!(!v.kdyck_stack);
        assert!(!v.kdyck_fom);
        assert!(v.shuffle);
        assert!(!v.ww);
        assert!(!v.disagreement);
        assert_eq!(v.dyck1_counting, None);
    }

    #[test]
    fn classify_k1() {
        let v = classify(&[0, 1, 0, 1], 1).unwrap();
        assert_eq!(v.dyck1_counting, Some(true));
        assert!(v.kdyck_stack && v.kdyck_fom && v.shuffle);
        // `()()` is `w w` with `w = ()`
        assert!(v.ww);
    }

    #[test]
    fn classify_rejects_out_of_alphabet() {
        assert!(classify(&[0, 6], 3).is_err());
    }
}
