//! Token sequences and the verbatim n-gram index.
//!
//! Captures are rendered as flat token streams over their header bytes at
//! one of three granularities: bits (MSB first), hex digits (big nibble
//! first), or whole bytes. Matching may cross packet boundaries; the
//! per-packet offsets are retained so analyses can filter if they care.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::capture::CaptureFile;
use crate::exec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("corpus mixes token schemes: {0:?} and {1:?}")]
    MixedSchemes(TokenScheme, TokenScheme),
}

/// Native representation unit of the traffic generator under audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenScheme {
    Bit,
    Hex,
    Byte,
}

impl TokenScheme {
    pub fn tokens_per_byte(self) -> usize {
        match self {
            TokenScheme::Bit => 8,
            TokenScheme::Hex => 2,
            TokenScheme::Byte => 1,
        }
    }

    pub fn max_token(self) -> u8 {
        match self {
            TokenScheme::Bit => 1,
            TokenScheme::Hex => 15,
            TokenScheme::Byte => 255,
        }
    }
}

impl std::str::FromStr for TokenScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bit" => Ok(TokenScheme::Bit),
            "hex" => Ok(TokenScheme::Hex),
            "byte" => Ok(TokenScheme::Byte),
            other => Err(format!("unknown token scheme `{other}`")),
        }
    }
}

/// A capture rendered as one token stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    pub scheme: TokenScheme,
    pub tokens: Vec<u8>,
    /// Token index where each packet begins; first entry is 0.
    pub packet_offsets: Vec<usize>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Expands the concatenated header bytes of every packet.
pub fn tokenize(capture: &CaptureFile, scheme: TokenScheme) -> TokenSequence {
    let total: usize = capture
        .packets
        .iter()
        .map(|p| p.header_bytes.len() * scheme.tokens_per_byte())
        .sum();
    let mut tokens = Vec::with_capacity(total);
    let mut packet_offsets = Vec::with_capacity(capture.packets.len());
    for packet in &capture.packets {
        packet_offsets.push(tokens.len());
        for &byte in &packet.header_bytes {
            match scheme {
                TokenScheme::Byte => tokens.push(byte),
                TokenScheme::Hex => {
                    tokens.push(byte >> 4);
                    tokens.push(byte & 0x0F);
                }
                TokenScheme::Bit => {
                    for bit in (0..8).rev() {
                        tokens.push((byte >> bit) & 1);
                    }
                }
            }
        }
    }
    TokenSequence {
        scheme,
        tokens,
        packet_offsets,
    }
}

/// Tokenizes a whole corpus, in order, fanning out across captures.
pub fn tokenize_corpus(corpus: &[CaptureFile], scheme: TokenScheme) -> Vec<TokenSequence> {
    exec::map(corpus, |c| tokenize(c, scheme))
}

/// Inverse of `tokenize` for one packet's worth of tokens: packs the token
/// stream back into bytes. Token counts that do not fill a whole byte are
/// rejected with `None`.
pub fn detokenize(tokens: &[u8], scheme: TokenScheme) -> Option<Vec<u8>> {
    let per = scheme.tokens_per_byte();
    if tokens.len() % per != 0 {
        return None;
    }
    Some(
        tokens
            .chunks_exact(per)
            .map(|chunk| match scheme {
                TokenScheme::Byte => chunk[0],
                TokenScheme::Hex => (chunk[0] << 4) | (chunk[1] & 0x0F),
                TokenScheme::Bit => chunk.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)),
            })
            .collect(),
    )
}

/// Where a window occurs: which sequence, and at which token index.
pub type WindowPosition = (usize, usize);

/// Lookup from n-token windows to every position where they occur in an
/// indexed corpus. Posting lists are sorted by start index, which is what
/// makes position-aligned queries cheap on an `aligned` index.
#[derive(Debug, Default)]
pub struct CorpusIndex {
    pub n: usize,
    pub aligned: bool,
    scheme: Option<TokenScheme>,
    positions: HashMap<Box<[u8]>, Vec<WindowPosition>>,
}

impl CorpusIndex {
    pub fn scheme(&self) -> Option<TokenScheme> {
        self.scheme
    }

    pub fn window_count(&self) -> usize {
        self.positions.len()
    }

    /// Every indexed position of `window`, sorted by start index.
    pub fn lookup(&self, window: &[u8]) -> &[WindowPosition] {
        self.positions
            .get(window)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// True iff `window` occurs anywhere in the indexed corpus.
    pub fn contains(&self, window: &[u8]) -> bool {
        self.positions.contains_key(window)
    }

    /// True iff `window` occurs at exactly `start` in some sequence.
    pub fn contains_at(&self, window: &[u8], start: usize) -> bool {
        let posts = self.lookup(window);
        match posts.binary_search_by_key(&start, |&(_, s)| s) {
            Ok(_) => true,
            Err(_) => false,
        }
    }
}

/// Indexes every length-`n` window of every sequence.
pub fn build_corpus_index(
    seqs: &[TokenSequence],
    n: usize,
    aligned: bool,
) -> Result<CorpusIndex, TokenError> {
    assert!(n >= 1, "window length must be at least 1");
    let mut scheme = None;
    for seq in seqs {
        match scheme {
            None => scheme = Some(seq.scheme),
            Some(s) if s != seq.scheme => return Err(TokenError::MixedSchemes(s, seq.scheme)),
            _ => {}
        }
    }
    let mut positions: HashMap<Box<[u8]>, Vec<WindowPosition>> = HashMap::new();
    for (seq_id, seq) in seqs.iter().enumerate() {
        for (start, window) in seq.tokens.windows(n).enumerate() {
            positions
                .entry(window.into())
                .or_default()
                .push((seq_id, start));
        }
    }
    for posts in positions.values_mut() {
        posts.sort_unstable_by_key(|&(_, start)| start);
    }
    Ok(CorpusIndex {
        n,
        aligned,
        scheme,
        positions,
    })
}
