//! Data engine for formal-language pre-pretraining corpora.
//!
//! - [`generate`]: seeded generators for nested and shuffle Dyck, the copy
//!   language `ww`, uniform random baselines and retrieval passages.
//! - [`recognize`]: membership deciders, including counting-logic
//!   constructions cross-checked against a pushdown decider.
//! - [`metamer`]: n-gram fitting and metamer sampling.
//! - [`corpus`]: sequence packing, the binary corpus format and statistics.
//! - [`efficiency`]: marginal rate of substitution and token efficiency.

pub mod config;
pub mod corpus;
pub mod efficiency;
pub mod error;
pub mod generate;
pub mod metamer;
pub mod pipeline;
pub mod recognize;
pub mod seed;
pub mod spec;
pub mod token;

pub use error::{Error, Result};
pub use spec::{CorpusSource, Family, HalfLength, LanguageSpec};
pub use token::{TokenId, TokenSeq};
