use std::collections::HashSet;

use ppt_core::recognize::{
    classify, recognize_counting_1dyck, recognize_fom_kdyck, recognize_shuffle, recognize_stack_kdyck,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Every word of `S -> (_i S )_i S | ε` over `k` pair types with length
/// exactly `n`, by direct expansion of the grammar.
fn grammar_words(k: u32, max_len: usize) -> Vec<Vec<Vec<u32>>> {
    let mut by_len: Vec<Vec<Vec<u32>>> = vec![Vec::new(); max_len + 1];
    by_len[0].push(Vec::new());
    for n in (2..=max_len).step_by(2) {
        let mut words = Vec::new();
        for inner in (0..=n - 2).step_by(2) {
            let rest = n - 2 - inner;
            for i in 0..k {
                for a in &by_len[inner] {
                    for b in &by_len[rest] {
                        let mut w = Vec::with_capacity(n);
                        w.push(i);
                        w.extend_from_slice(a);
                        w.push(i + k);
                        w.extend_from_slice(b);
                        words.push(w);
                    }
                }
            }
        }
        by_len[n] = words;
    }
    by_len
}

fn for_all_strings(symbols: u32, max_len: usize, mut f: impl FnMut(&[u32])) {
    let mut buf = vec![0u32; max_len];
    for len in 0..=max_len {
        let total = (symbols as u64).pow(len as u32);
        for mut code in 0..total {
            for slot in buf[..len].iter_mut() {
                *slot = (code % symbols as u64) as u32;
                code /= symbols as u64;
            }
            f(&buf[..len]);
        }
    }
}

#[test]
fn stack_matches_grammar_enumeration_k2_len12() {
    let words: HashSet<Vec<u32>> = grammar_words(2, 12).into_iter().flatten().collect();
    // Catalan(n) * 2^n words of length 2n.
    assert_eq!(words.len(), 1 + 2 + 8 + 40 + 224 + 1344 + 8448);
    let mut accepted = 0usize;
    for_all_strings(4, 12, |s| {
        let stack = recognize_stack_kdyck(s, 2).unwrap();
        assert_eq!(stack, words.contains(s), "{s:?}");
        accepted += stack as usize;
    });
    assert_eq!(accepted, words.len());
}

#[test]
fn k1_collapse_exhaustive_len14() {
    for_all_strings(2, 14, |s| {
        let counting = recognize_counting_1dyck(s).unwrap();
        assert_eq!(counting, recognize_stack_kdyck(s, 1).unwrap(), "{s:?}");
        assert_eq!(counting, recognize_shuffle(s, 1).unwrap(), "{s:?}");
        assert_eq!(counting, recognize_fom_kdyck(s, 1).unwrap(), "{s:?}");
    });
}

#[test]
fn fom_matches_stack_k2_len8() {
    for_all_strings(4, 8, |s| {
        assert_eq!(
            recognize_fom_kdyck(s, 2).unwrap(),
            recognize_stack_kdyck(s, 2).unwrap(),
            "{s:?}"
        );
    });
}

#[test]
fn classify_fuzz_never_disagrees() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    for _ in 0..1_000 {
        let k = rng.gen_range(1..=4);
        let len = 2 * rng.gen_range(0..=20);
        // Bias toward well-formed strings so both verdicts are exercised.
        let s: Vec<u32> = if rng.gen_bool(0.5) {
            let mut out = Vec::new();
            let mut stack = Vec::new();
            while out.len() < len {
                let remaining = len - out.len();
                if !stack.is_empty() && (remaining == stack.len() || rng.gen_bool(0.5)) {
                    out.push(stack.pop().unwrap() + k);
                } else {
                    let t = rng.gen_range(0..k);
                    stack.push(t);
                    out.push(t);
                }
            }
            if rng.gen_bool(0.3) && !out.is_empty() {
                let i = rng.gen_range(0..out.len());
                out[i] = rng.gen_range(0..2 * k);
            }
            out
        } else {
            (0..len).map(|_| rng.gen_range(0..2 * k)).collect()
        };
        let v = classify(&s, k).unwrap();
        assert!(!v.disagreement, "{s:?} k={k}");
    }
}

#[test]
fn rejected_prefix_stays_rejected_after_opens() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 2_000 {
        let k = rng.gen_range(1..=3u32);
        let len = rng.gen_range(1..16);
        let s: Vec<u32> = (0..len).map(|_| rng.gen_range(0..2 * k)).collect();
        if recognize_stack_kdyck(&s, k).unwrap() {
            continue;
        }
        checked += 1;
        let mut extended = s.clone();
        for _ in 0..rng.gen_range(1..6) {
            extended.push(rng.gen_range(0..k));
        }
        assert!(!recognize_stack_kdyck(&extended, k).unwrap());
        assert!(!recognize_fom_kdyck(&extended, k).unwrap());
        if !recognize_shuffle(&s, k).unwrap() {
            assert!(!recognize_shuffle(&extended, k).unwrap());
        }
    }
}

fn bracket_string() -> impl Strategy<Value = (u32, Vec<u32>)> {
    (1u32..=4).prop_flat_map(|k| (Just(k), prop::collection::vec(0..2 * k, 0..24)))
}

proptest! {
    #[test]
    fn nested_implies_shuffle((k, s) in bracket_string()) {
        if recognize_stack_kdyck(&s, k).unwrap() {
            prop_assert!(recognize_shuffle(&s, k).unwrap());
        }
    }

    #[test]
    fn deciders_are_total((k, s) in bracket_string()) {
        prop_assert!(classify(&s, k).is_ok());
    }
}
