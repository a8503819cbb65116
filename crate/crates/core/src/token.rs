use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Token identifier. Corpus files store tokens as 16-bit values, but in-memory
/// sequences keep a wider type so out-of-range ids can be reported rather than
/// silently wrapped.
pub type TokenId = u32;

/// A finite token sequence over a declared vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSeq {
    tokens: Vec<TokenId>,
    vocab_size: u32,
    truncated: bool,
}

impl TokenSeq {
    pub fn new(tokens: Vec<TokenId>, vocab_size: u32) -> Result<Self> {
        Self::with_truncation(tokens, vocab_size, false)
    }

    pub fn with_truncation(tokens: Vec<TokenId>, vocab_size: u32, truncated: bool) -> Result<Self> {
        if vocab_size == 0 {
            return Err(Error::InvalidSpec("vocabulary size must be positive".into()));
        }
        if let Some((position, &token)) = tokens.iter().enumerate().find(|(_, &t)| t >= vocab_size) {
            return Err(Error::TokenOutOfVocab {
                token,
                position,
                vocab_size,
            });
        }
        Ok(TokenSeq {
            tokens,
            vocab_size,
            truncated,
        })
    }

    /// Generators construct sequences whose range is correct by construction.
    pub(crate) fn from_parts_unchecked(tokens: Vec<TokenId>, vocab_size: u32, truncated: bool) -> Self {
        debug_assert!(tokens.iter().all(|&t| t < vocab_size));
        TokenSeq {
            tokens,
            vocab_size,
            truncated,
        }
    }

    pub fn tokens(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<TokenId> {
        self.tokens
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Bracket alphabet of a Dyck-family language with `k` pair types:
/// ids `0..k` open, `k..2k` close, and `i + k` closes `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Brackets {
    k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Open(u32),
    Close(u32),
}

impl Brackets {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("bracket type count k must be at least 1".into()));
        }
        Ok(Brackets { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn vocab_size(self) -> u32 {
        2 * self.k
    }

    pub fn open(self, kind: u32) -> TokenId {
        debug_assert!(kind < self.k);
        kind
    }

    pub fn close(self, kind: u32) -> TokenId {
        debug_assert!(kind < self.k);
        kind + self.k
    }

    pub fn decode(self, token: TokenId) -> Option<Bracket> {
        if token < self.k {
            Some(Bracket::Open(token))
        } else if token < 2 * self.k {
            Some(Bracket::Close(token - self.k))
        } else {
            None
        }
    }

    /// Decodes a whole sequence, failing on the first out-of-alphabet token.
    pub fn decode_all(self, tokens: &[TokenId]) -> Result<Vec<Bracket>> {
        tokens
            .iter()
            .enumerate()
            .map(|(position, &token)| {
                self.decode(token).ok_or(Error::TokenOutOfVocab {
                    token,
                    position,
                    vocab_size: self.vocab_size(),
                })
            })
            .collect()
    }
}

const OPEN_GLYPHS: [char; 4] = ['(', '[', '{', '<'];
const CLOSE_GLYPHS: [char; 4] = [')', ']', '}', '>'];

/// Parses bracket glyph notation such as `([{])}` into token ids for `k`
/// pair types. Only the first four pair types have glyphs. Whitespace is
/// ignored; returns `None` if any other character appears.
pub fn parse_glyphs(text: &str, k: u32) -> Option<Vec<TokenId>> {
    let brackets = Brackets::new(k).ok()?;
    let mut out = Vec::new();
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        if let Some(kind) = OPEN_GLYPHS.iter().position(|&g| g == c) {
            if kind as u32 >= k {
                return None;
            }
            out.push(brackets.open(kind as u32));
        } else {
            let kind = CLOSE_GLYPHS.iter().position(|&g| g == c)?;
            if kind as u32 >= k {
                return None;
            }
            out.push(brackets.close(kind as u32));
        }
    }
    Some(out)
}

/// Smallest `k` able to express every glyph in `text`, if it is glyph notation.
pub fn glyph_arity(text: &str) -> Option<u32> {
    let mut k = 0;
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        let kind = OPEN_GLYPHS
            .iter()
            .position(|&g| g == c)
            .or_else(|| CLOSE_GLYPHS.iter().position(|&g| g == c))?;
        k = k.max(kind as u32 + 1);
    }
    Some(k.max(1))
}

/// Renders tokens of a `k <= 4` bracket language as glyphs.
pub fn render_glyphs(tokens: &[TokenId], k: u32) -> Option<String> {
    if k == 0 || k > 4 {
        return None;
    }
    let brackets = Brackets { k };
    tokens
        .iter()
        .map(|&t| match brackets.decode(t)? {
            Bracket::Open(kind) => Some(OPEN_GLYPHS[kind as usize]),
            Bracket::Close(kind) => Some(CLOSE_GLYPHS[kind as usize]),
        })
        .collect()
}
