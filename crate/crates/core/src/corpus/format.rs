//! Binary corpus file.
//!
//! ```text
//! magic     8 bytes   "PPTCORP\0"
//! version   u32 LE
//! manifest  u64 LE byte length, then UTF-8 JSON
//! tokens    u16 LE, row-major, manifest.total_tokens of them
//! footer    u32 LE CRC-32 of every preceding byte
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::corpus::{Manifest, PackedCorpus};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PPTCORP\0";
pub const FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = 8 + 4 + 8;
const FOOTER_LEN: usize = 4;

pub fn encode(corpus: &PackedCorpus) -> Result<Vec<u8>> {
    let manifest = serde_json::to_vec(corpus.manifest())?;
    let tokens = corpus.tokens();
    let mut out = Vec::with_capacity(HEADER_LEN + manifest.len() + 2 * tokens.len() + FOOTER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(manifest.len() as u64).to_le_bytes());
    out.extend_from_slice(&manifest);
    for &t in tokens {
        let narrow = u16::try_from(t).map_err(|_| Error::TokenTooWide(t))?;
        out.extend_from_slice(&narrow.to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<PackedCorpus> {
    if bytes.len() < HEADER_LEN + FOOTER_LEN {
        if bytes.len() >= MAGIC.len() && &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::BadMagic);
        }
        return Err(Error::Truncated(format!(
            "{} bytes is shorter than the fixed header",
            bytes.len()
        )));
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    let (body, footer) = bytes.split_at(bytes.len() - FOOTER_LEN);
    let stored = u32::from_le_bytes(footer.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let version = u32::from_le_bytes(body[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let manifest_len = u64::from_le_bytes(body[12..20].try_into().unwrap()) as usize;
    let manifest_end = HEADER_LEN
        .checked_add(manifest_len)
        .filter(|&end| end <= body.len())
        .ok_or_else(|| Error::Truncated("manifest extends past end of file".into()))?;
    let manifest: Manifest = serde_json::from_slice(&body[HEADER_LEN..manifest_end])?;
    validate_manifest(&manifest)?;

    let token_bytes = &body[manifest_end..];
    let expected = manifest.total_tokens as usize * 2;
    if token_bytes.len() != expected {
        return Err(Error::Truncated(format!(
            "token region holds {} bytes, manifest declares {expected}",
            token_bytes.len()
        )));
    }
    let mut tokens = Vec::with_capacity(manifest.total_tokens as usize);
    for (i, pair) in token_bytes.chunks_exact(2).enumerate() {
        let t = u16::from_le_bytes([pair[0], pair[1]]) as u32;
        if t >= manifest.vocab_size {
            return Err(Error::TokenOutOfVocab {
                token: t,
                position: i,
                vocab_size: manifest.vocab_size,
            });
        }
        tokens.push(t);
    }
    Ok(PackedCorpus::from_parts(tokens, manifest))
}

fn validate_manifest(m: &Manifest) -> Result<()> {
    let bad = |msg: &str| Err(Error::Truncated(format!("inconsistent manifest: {msg}")));
    if m.format_version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: m.format_version,
            supported: FORMAT_VERSION,
        });
    }
    if m.window_length == 0 || !m.total_tokens.is_multiple_of(m.window_length as u64) {
        return bad("total tokens is not a whole number of windows");
    }
    if m.boundaries.len() != m.truncated.len() {
        return bad("boundary and truncation lists differ in length");
    }
    if m.boundaries.windows(2).any(|w| w[0] > w[1]) || m.boundaries.iter().any(|&b| b >= m.total_tokens) {
        return bad("boundaries are not sorted offsets inside the stream");
    }
    if m.boundaries.first().is_some_and(|&b| b != 0) {
        return bad("first document does not start at offset 0");
    }
    Ok(())
}

/// Writes atomically: a temporary file in the target directory is renamed
/// over `path` once fully written.
pub fn write_corpus(corpus: &PackedCorpus, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode(corpus)?;
    atomic_write(path.as_ref(), &bytes)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<PackedCorpus> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Standalone pretty-printed manifest for consumers that do not parse the
/// binary container.
pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(manifest)?;
    text.push(b'\n');
    atomic_write(path.as_ref(), &text)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
