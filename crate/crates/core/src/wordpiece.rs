//! Greedy longest-match-first WordPiece segmentation.
//!
//! This reproduces the observable behavior of the reference BERT tokenizer on
//! single words: at each position the longest matching vocabulary entry is
//! taken (word-initial form at position 0, `##`-continuation form after), and
//! the whole word degrades to the unknown sentinel when any position has no
//! match or the word is longer than `max_chars`.

use crate::error::{Error, Result};
use crate::parallel;
use crate::vocab::{Vocabulary, CONTINUATION_PREFIX};

/// Sentinel token for unsegmentable words.
pub const UNKNOWN_TOKEN: &str = "[UNK]";

/// Reference-tokenizer default for the maximum number of input characters.
pub const DEFAULT_MAX_CHARS: usize = 100;

/// A WordPiece segmentation: either a token sequence whose de-prefixed
/// concatenation reproduces the input word, or the single unknown sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPieceSegmentation {
    tokens: Vec<String>,
    is_unknown: bool,
}

impl WordPieceSegmentation {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn is_unknown(&self) -> bool {
        self.is_unknown
    }

    /// Tokens joined by single spaces, e.g. `te ##mp ##lat ##ize`.
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }

    /// Concatenation of tokens with continuation markers stripped; equals the
    /// input word for non-unknown segmentations.
    pub fn surface(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.strip_prefix(CONTINUATION_PREFIX).unwrap_or(t))
            .collect()
    }

    fn unknown() -> Self {
        WordPieceSegmentation {
            tokens: vec![UNKNOWN_TOKEN.to_string()],
            is_unknown: true,
        }
    }
}

/// Segments a single word with greedy longest-match-first lookup.
///
/// The word is expected to be a lowercase single word (no whitespace);
/// an empty word is an argument error.
pub fn segment_wordpiece(
    word: &str,
    vocab: &Vocabulary,
    max_chars: usize,
) -> Result<WordPieceSegmentation> {
    if word.is_empty() {
        return Err(Error::Validation("cannot segment an empty word".into()));
    }
    if word.chars().count() > max_chars {
        return Ok(WordPieceSegmentation::unknown());
    }

    // Positions of char boundaries so slicing stays valid for non-ASCII input.
    let mut bounds: Vec<usize> = word.char_indices().map(|(i, _)| i).collect();
    bounds.push(word.len());

    let mut tokens = Vec::new();
    let mut start = 0; // index into bounds
    let n = bounds.len() - 1;
    while start < n {
        let mut matched = None;
        let mut end = n;
        while end > start {
            let piece = &word[bounds[start]..bounds[end]];
            let candidate = if start == 0 {
                piece.to_string()
            } else {
                format!("{CONTINUATION_PREFIX}{piece}")
            };
            if vocab.contains(&candidate) {
                matched = Some((candidate, end));
                break;
            }
            end -= 1;
        }
        match matched {
            Some((token, end)) => {
                tokens.push(token);
                start = end;
            }
            None => return Ok(WordPieceSegmentation::unknown()),
        }
    }
    Ok(WordPieceSegmentation {
        tokens,
        is_unknown: false,
    })
}

/// Segments a batch of words, in parallel when the `parallel` feature is on.
pub fn segment_batch(
    words: &[String],
    vocab: &Vocabulary,
    max_chars: usize,
) -> Vec<Result<WordPieceSegmentation>> {
    parallel::map_slice(words, |w| segment_wordpiece(w, vocab, max_chars))
}
