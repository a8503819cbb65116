use std::collections::HashMap;

use ppt_core::generate::{
    default_names, default_wordlist, gen_dyck, gen_random, gen_retrieval_eval, gen_ww, DyckGenerator,
};
use ppt_core::recognize::{recognize_shuffle, recognize_stack_kdyck, recognize_ww, DepthTrace};
use ppt_core::{Family, HalfLength, LanguageSpec};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn nested_round_trip_10k() {
    let spec = LanguageSpec::new(Family::DyckNested, 5)
        .with_max_length(256)
        .with_seed(21);
    let mut untruncated = 0;
    for doc in gen_dyck(&spec, 10_000).unwrap() {
        if !doc.truncated() {
            untruncated += 1;
            assert!(recognize_stack_kdyck(doc.tokens(), 5).unwrap());
        }
    }
    assert!(untruncated > 0);
}

#[test]
fn shuffle_round_trip_10k() {
    let spec = LanguageSpec::new(Family::DyckShuffle, 7)
        .with_max_length(256)
        .with_seed(22);
    let mut untruncated = 0;
    for doc in gen_dyck(&spec, 10_000).unwrap() {
        if !doc.truncated() {
            untruncated += 1;
            assert!(recognize_shuffle(doc.tokens(), 7).unwrap());
        }
    }
    assert!(untruncated > 0);
}

#[test]
fn ww_round_trip_10k() {
    let docs = gen_ww(128, HalfLength::Uniform { min: 1, max: 64 }, 10_000, 23).unwrap();
    for doc in docs {
        assert!(!doc.truncated());
        assert!(recognize_ww(doc.tokens()));
    }
}

#[test]
fn truncated_documents_are_valid_prefixes() {
    // Appending the closes a truncated document is missing makes it a word.
    let spec = LanguageSpec::new(Family::DyckNested, 3)
        .with_max_length(64)
        .with_seed(5);
    for doc in gen_dyck(&spec, 500).unwrap().filter(|d| d.truncated()) {
        let mut stack = Vec::new();
        for &t in doc.tokens() {
            if t < 3 {
                stack.push(t);
            } else {
                assert_eq!(stack.pop(), Some(t - 3));
            }
        }
        let mut completed = doc.tokens().to_vec();
        completed.extend(stack.iter().rev().map(|t| t + 3));
        assert!(recognize_stack_kdyck(&completed, 3).unwrap());
    }
}

#[test]
fn depth_bounded_on_every_prefix() {
    for family in [Family::DyckNested, Family::DyckShuffle] {
        for max_depth in [1, 2, 5, 16] {
            let spec = LanguageSpec::new(family, 4)
                .with_max_depth(max_depth)
                .with_max_length(300)
                .with_seed(max_depth as u64);
            for doc in gen_dyck(&spec, 200).unwrap() {
                let trace = DepthTrace::of(doc.tokens(), 4).unwrap();
                assert!(trace.depths.iter().all(|&d| (0..=max_depth as i64).contains(&d)));
            }
        }
    }
}

#[test]
fn seed_splitting_is_prefix_stable() {
    let spec = LanguageSpec::new(Family::DyckShuffle, 64)
        .with_max_length(128)
        .with_seed(99);
    let short: Vec<_> = gen_dyck(&spec, 10).unwrap().collect();
    let long: Vec<_> = gen_dyck(&spec, 50).unwrap().collect();
    assert_eq!(short[..], long[..10]);
    let g = DyckGenerator::new(spec).unwrap();
    assert_eq!(g.document(37), long[37]);
}

#[test]
fn k1_collapse_over_many_seeds() {
    for seed in 0..50 {
        let nested = LanguageSpec::new(Family::DyckNested, 1)
            .with_seed(seed)
            .with_max_length(200);
        let shuffle = LanguageSpec {
            family: Family::DyckShuffle,
            ..nested.clone()
        };
        assert!(gen_dyck(&nested, 5).unwrap().eq(gen_dyck(&shuffle, 5).unwrap()));
    }
}

#[test]
fn shuffle_emits_crossing_factor() {
    // ( [ { ] ) } as a contiguous factor of some default k = 3 document.
    let pattern = [0, 1, 2, 4, 3, 5];
    let spec = LanguageSpec::new(Family::DyckShuffle, 3).with_seed(1);
    let found = gen_dyck(&spec, 200)
        .unwrap()
        .any(|d| d.tokens().windows(6).any(|w| w == pattern));
    assert!(found);
}

#[test]
fn ww_unigrams_are_uniform() {
    // Only the first half of each document is an independent sample; the
    // second half duplicates it and would double the chi-square statistic.
    let vocab = 128usize;
    let mut counts = vec![0u64; vocab];
    for doc in gen_ww(vocab as u32, HalfLength::Uniform { min: 1, max: 1024 }, 100_000, 4).unwrap() {
        for &t in &doc.tokens()[..doc.len() / 2] {
            counts[t as usize] += 1;
        }
    }
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / vocab as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((vocab - 1) as f64).unwrap().cdf(stat);
    assert!(p > 0.01, "chi-square {stat:.1}, p = {p:.4}");
}

#[test]
fn random_baseline_frequencies() {
    let mut counts = vec![0u64; 128];
    for doc in gen_random(128, 2048, 489, 8).unwrap() {
        for &t in doc.tokens() {
            counts[t as usize] += 1;
        }
    }
    let n: u64 = counts.iter().sum();
    assert!(n >= 1_000_000);
    let expected = n as f64 / 128.0;
    for (t, &c) in counts.iter().enumerate() {
        assert!(
            (c as f64 - expected).abs() <= 0.05 * expected,
            "token {t}: {c} vs {expected:.0}"
        );
    }
}

#[test]
fn retrieval_spans_repeat_first_list() {
    let docs = gen_retrieval_eval(default_wordlist(), default_names(), 4, 1_000, 77).unwrap();
    let mut lists = HashMap::new();
    for doc in docs {
        assert_eq!(doc.target(), doc.first_list());
        assert_eq!(doc.target().split(", ").count(), 4);
        assert!(doc.span_end < doc.text.len());
        *lists.entry(doc.target().to_string()).or_insert(0) += 1;
    }
    assert!(lists.len() > 900);
}
