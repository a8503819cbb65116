use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::doc_rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Speaker {
    pub name: String,
    pub pronoun: String,
}

impl Speaker {
    pub fn new(name: &str, pronoun: &str) -> Self {
        Speaker {
            name: name.to_string(),
            pronoun: pronoun.to_string(),
        }
    }
}

/// One verbatim-retrieval passage. Spans are byte offsets into `text`;
/// `span_start..span_end` covers the repeated list that gets scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalDoc {
    pub text: String,
    pub span_start: usize,
    pub span_end: usize,
    #[serde(skip)]
    pub first_span: (usize, usize),
}

impl RetrievalDoc {
    pub fn target(&self) -> &str {
        &self.text[self.span_start..self.span_end]
    }

    pub fn first_list(&self) -> &str {
        &self.text[self.first_span.0..self.first_span.1]
    }
}

#[derive(Debug, Clone)]
pub struct RetrievalGenerator {
    wordlist: Vec<String>,
    speakers: Vec<Speaker>,
    list_len: usize,
    seed: u64,
}

impl RetrievalGenerator {
    pub fn new(wordlist: Vec<String>, speakers: Vec<Speaker>, list_len: usize, seed: u64) -> Result<Self> {
        if list_len == 0 {
            return Err(Error::Retrieval("list length must be at least 1".into()));
        }
        if list_len > wordlist.len() {
            return Err(Error::Retrieval(format!(
                "list length {list_len} exceeds wordlist size {}",
                wordlist.len()
            )));
        }
        if speakers.is_empty() {
            return Err(Error::Retrieval("at least one (name, pronoun) pair is required".into()));
        }
        Ok(RetrievalGenerator {
            wordlist,
            speakers,
            list_len,
            seed,
        })
    }

    pub fn document(&self, index: u64) -> RetrievalDoc {
        let mut rng = doc_rng(self.seed, index);
        let speaker = &self.speakers[rng.gen_range(0..self.speakers.len())];
        let words: Vec<&str> = sample(&mut rng, self.wordlist.len(), self.list_len)
            .into_iter()
            .map(|i| self.wordlist[i].as_str())
            .collect();
        render(speaker, &words)
    }
}

/// Fills the passage template for one speaker and word list.
pub fn render(speaker: &Speaker, words: &[&str]) -> RetrievalDoc {
    let list = words.join(", ");
    let pronoun = &speaker.pronoun;
    let mut text = format!(
        "Before the meeting, {} wrote down the following list of words: ",
        speaker.name
    );
    let first_start = text.len();
    text.push_str(&list);
    let first_end = text.len();
    text.push_str(&format!(
        ". After the meeting, {pronoun} took a break and had a cup of coffee. When {pronoun} got back, {pronoun} read the list again: "
    ));
    let span_start = text.len();
    text.push_str(&list);
    let span_end = text.len();
    text.push('.');
    RetrievalDoc {
        text,
        span_start,
        span_end,
        first_span: (first_start, first_end),
    }
}

pub fn gen_retrieval_eval(
    wordlist: Vec<String>,
    speakers: Vec<Speaker>,
    list_len: usize,
    count: usize,
    seed: u64,
) -> Result<impl Iterator<Item = RetrievalDoc>> {
    let generator = RetrievalGenerator::new(wordlist, speakers, list_len, seed)?;
    Ok((0..count as u64).map(move |i| generator.document(i)))
}

const DEFAULT_WORDS: &[&str] = &[
    "carpet", "button", "pebble", "walnut", "compass", "ticket", "garden", "river", "candle", "mirror", "basket", "ladder",
    "pencil", "blanket", "engine", "forest", "harbor", "island", "jacket", "kettle", "lantern", "meadow", "needle",
    "orchard", "pillow", "quarry", "saddle", "tunnel", "valley", "wagon", "anchor", "bottle", "cabinet", "desert",
    "feather", "glacier", "hammer", "marble", "notebook", "ocean", "pepper", "ribbon", "silver", "thunder", "umbrella",
    "violin", "whistle", "yarn", "zipper", "bridge",
];

pub fn default_wordlist() -> Vec<String> {
    DEFAULT_WORDS.iter().map(|w| w.to_string()).collect()
}

pub fn default_names() -> Vec<Speaker> {
    [
        ("Mary", "she"),
        ("John", "he"),
        ("Sarah", "she"),
        ("David", "he"),
        ("Emma", "she"),
        ("James", "he"),
        ("Alex", "they"),
    ]
    .iter()
    .map(|(n, p)| Speaker::new(n, p))
    .collect()
}
