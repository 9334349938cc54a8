//! Vocabulary, affix inventory, and stem-set resources.
//!
//! A [`Vocabulary`] is a fixed WordPiece token inventory loaded from the
//! standard `vocab.txt` format (one token per line, line index = token id).
//! Tokens beginning with `##` are continuation tokens; everything else is
//! word-initial. The [`AffixInventory`] and [`StemSet`] derived from it drive
//! the derivational segmenter: every affix and stem is, by construction, a
//! token the WordPiece segmenter could also use.
//!
//! All three types are immutable after construction and safe to share across
//! threads.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Marker prefix of continuation (non-word-initial) tokens.
pub const CONTINUATION_PREFIX: &str = "##";

/// A fixed WordPiece token inventory with dense ids assigned by line order.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from an iterator of token strings, assigning ids
    /// from 0 in iteration order. Duplicate or empty tokens are format errors.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for (line_no, token) in tokens.into_iter().enumerate() {
            let token = token.into();
            if token.is_empty() {
                return Err(Error::Format(format!(
                    "empty vocabulary token at line {}",
                    line_no + 1
                )));
            }
            if index.contains_key(&token) {
                return Err(Error::Format(format!(
                    "duplicate vocabulary token {token:?} at line {}",
                    line_no + 1
                )));
            }
            index.insert(token.clone(), entries.len() as u32);
            entries.push(token);
        }
        if entries.is_empty() {
            return Err(Error::Format("vocabulary file is empty".to_string()));
        }
        Ok(Vocabulary { entries, index })
    }

    /// Loads a `vocab.txt`-style file: UTF-8, one token per line. A trailing
    /// newline is allowed; interior empty lines are not.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines: Vec<&str> = raw.lines().map(|l| l.trim_end_matches('\r')).collect();
        while lines.last() == Some(&"") {
            lines.pop();
        }
        Self::from_tokens(lines.into_iter().map(str::to_owned))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// True iff `token` carries the `##` continuation marker.
    pub fn is_continuation(token: &str) -> bool {
        token.starts_with(CONTINUATION_PREFIX)
    }

    /// Iterates tokens in id order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

/// The sets of derivational prefixes and suffixes accepted by the segmenter.
///
/// Prefixes are validated as word-initial vocabulary tokens, suffixes as
/// `##`-continuation tokens, so every affix the derivational segmenter emits
/// is available to the WordPiece segmenter as well.
#[derive(Debug, Clone)]
pub struct AffixInventory {
    prefixes: BTreeSet<String>,
    suffixes: BTreeSet<String>,
}

impl AffixInventory {
    pub fn new<P, S>(prefixes: P, suffixes: S, vocab: &Vocabulary) -> Result<Self>
    where
        P: IntoIterator<Item = String>,
        S: IntoIterator<Item = String>,
    {
        let mut inventory = AffixInventory {
            prefixes: BTreeSet::new(),
            suffixes: BTreeSet::new(),
        };
        for prefix in prefixes {
            check_affix_shape(&prefix)?;
            if !vocab.contains(&prefix) {
                return Err(Error::Validation(format!(
                    "prefix {prefix:?} is not a word-initial token of the vocabulary"
                )));
            }
            inventory.prefixes.insert(prefix);
        }
        for suffix in suffixes {
            check_affix_shape(&suffix)?;
            if !vocab.contains(&format!("{CONTINUATION_PREFIX}{suffix}")) {
                return Err(Error::Validation(format!(
                    "suffix {suffix:?} is not a continuation token of the vocabulary"
                )));
            }
            inventory.suffixes.insert(suffix);
        }
        Ok(inventory)
    }

    /// Loads prefix and suffix lists (one entry per line, `#` comments and
    /// blank lines ignored, entries lowercased) and validates them against
    /// the vocabulary.
    pub fn load(prefix_path: &Path, suffix_path: &Path, vocab: &Vocabulary) -> Result<Self> {
        Self::new(
            load_word_list(prefix_path)?,
            load_word_list(suffix_path)?,
            vocab,
        )
    }

    pub fn prefixes(&self) -> impl Iterator<Item = &str> {
        self.prefixes.iter().map(String::as_str)
    }

    pub fn suffixes(&self) -> impl Iterator<Item = &str> {
        self.suffixes.iter().map(String::as_str)
    }

    pub fn is_prefix(&self, s: &str) -> bool {
        self.prefixes.contains(s)
    }

    pub fn is_suffix(&self, s: &str) -> bool {
        self.suffixes.contains(s)
    }

    /// True if `s` appears in either role.
    pub fn contains_string(&self, s: &str) -> bool {
        self.prefixes.contains(s) || self.suffixes.contains(s)
    }

    pub fn prefix_count(&self) -> usize {
        self.prefixes.len()
    }

    pub fn suffix_count(&self) -> usize {
        self.suffixes.len()
    }
}

fn check_affix_shape(affix: &str) -> Result<()> {
    if affix.is_empty() || !is_ascii_alpha(affix) {
        return Err(Error::Format(format!(
            "affix {affix:?} is not lowercase alphabetic"
        )));
    }
    Ok(())
}

/// The set of words eligible to terminate the affix-removal search: fully
/// alphabetic word-initial vocabulary tokens of length > 3 that are neither
/// stopwords nor affix strings.
#[derive(Debug, Clone)]
pub struct StemSet {
    stems: HashSet<String>,
}

impl StemSet {
    /// Builds a stem set from explicit members; used by tests and synthetic
    /// setups. Members are not re-validated.
    pub fn from_members<I: IntoIterator<Item = String>>(members: I) -> Self {
        StemSet {
            stems: members.into_iter().collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.stems.contains(word)
    }

    pub fn len(&self) -> usize {
        self.stems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    /// Members in lexicographic order, for stable output.
    pub fn sorted(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.stems.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

/// Derives the stem set from a vocabulary: word-initial, fully alphabetic
/// (ASCII a-z), longer than 3 characters, and not a stopword or affix string.
pub fn build_stem_set(
    vocab: &Vocabulary,
    affixes: &AffixInventory,
    stopwords: &HashSet<String>,
) -> StemSet {
    let stems = vocab
        .tokens()
        .filter(|t| !Vocabulary::is_continuation(t))
        .filter(|t| t.len() > 3 && is_ascii_alpha(t))
        .filter(|t| !stopwords.contains(*t))
        .filter(|t| !affixes.contains_string(t))
        .map(str::to_owned)
        .collect();
    StemSet { stems }
}

/// True iff `s` consists only of ASCII lowercase letters a-z.
pub fn is_ascii_alpha(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

/// Reads a one-entry-per-line word list. `#`-prefixed comment lines and blank
/// lines are skipped; entries are lowercased.
pub fn load_word_list(path: &Path) -> Result<Vec<String>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(raw
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect())
}

/// Reads a word list into a set.
pub fn load_word_set(path: &Path) -> Result<HashSet<String>> {
    Ok(load_word_list(path)?.into_iter().collect())
}
