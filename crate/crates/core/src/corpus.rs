//! Weakly-supervised dataset construction from labeled document corpora.
//!
//! Documents carry corpus-specific labels (star ratings, subject classes,
//! subreddits). A [`LabelScheme`] maps two disjoint label sets onto two
//! semantic classes; derivationally complex words are extracted from the
//! documents, ranked by the fraction of class-1 texts containing them, and
//! the first and third tertiles become the two classes. A seeded shuffle
//! then splits the words 60/20/20 into train/dev/test.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::derivational::segment_derivational;
use crate::error::{Error, Result};
use crate::parallel;
use crate::vocab::{AffixInventory, StemSet};

/// A single corpus record: raw text plus its corpus-specific label.
#[derive(Debug, Clone)]
pub struct Document {
    pub text: String,
    pub label: String,
}

/// Two named semantic classes, each defined by a set of corpus labels.
#[derive(Debug, Clone)]
pub struct LabelScheme {
    pub class1_name: String,
    pub class2_name: String,
    pub class1_labels: BTreeSet<String>,
    pub class2_labels: BTreeSet<String>,
}

impl LabelScheme {
    pub fn new(
        class1_name: impl Into<String>,
        class2_name: impl Into<String>,
        class1_labels: impl IntoIterator<Item = String>,
        class2_labels: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let scheme = LabelScheme {
            class1_name: class1_name.into(),
            class2_name: class2_name.into(),
            class1_labels: class1_labels.into_iter().collect(),
            class2_labels: class2_labels.into_iter().collect(),
        };
        if scheme.class1_name.is_empty() || scheme.class2_name.is_empty() {
            return Err(Error::Config("class names must be non-empty".into()));
        }
        if scheme.class1_labels.is_empty() || scheme.class2_labels.is_empty() {
            return Err(Error::Config("both label sets must be non-empty".into()));
        }
        if scheme
            .class1_labels
            .intersection(&scheme.class2_labels)
            .next()
            .is_some()
        {
            return Err(Error::Config(
                "class label sets must be disjoint".into(),
            ));
        }
        Ok(scheme)
    }

    /// Which class a corpus label belongs to, if any.
    pub fn classify(&self, label: &str) -> Option<ClassId> {
        if self.class1_labels.contains(label) {
            Some(ClassId::Class1)
        } else if self.class2_labels.contains(label) {
            Some(ClassId::Class2)
        } else {
            None
        }
    }

    pub fn class_name(&self, class: ClassId) -> &str {
        match class {
            ClassId::Class1 => &self.class1_name,
            ClassId::Class2 => &self.class2_name,
        }
    }
}

/// One of the two semantic classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassId {
    Class1,
    Class2,
}

/// Per-word counts: texts containing the word per class (text-level) and
/// total occurrences across all in-scheme texts (occurrence-level).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WordStats {
    pub count_class1: u64,
    pub count_class2: u64,
    pub total_frequency: u64,
}

impl WordStats {
    fn merge(&mut self, other: &WordStats) {
        self.count_class1 += other.count_class1;
        self.count_class2 += other.count_class2;
        self.total_frequency += other.total_frequency;
    }

    /// Fraction of containing texts that are class 1.
    pub fn class1_fraction(&self) -> f64 {
        self.count_class1 as f64 / (self.count_class1 + self.count_class2) as f64
    }
}

/// Reduces any letter repeated more than three times consecutively to
/// exactly three.
fn squeeze_repeats(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    for c in s.chars() {
        if Some(c) == prev && c.is_ascii_alphabetic() {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 3 {
            out.push(c);
        }
    }
    out
}

/// Appendix-style text normalization: hyperlinks and digit-bearing tokens
/// dropped, letter runs longer than three squeezed to three, lowercased, and
/// split on non-alphabetic boundaries.
pub fn preprocess(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    for raw in text.split_whitespace() {
        let lower = raw.to_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
        {
            continue;
        }
        if lower.chars().any(char::is_numeric) {
            continue;
        }
        let squeezed = squeeze_repeats(&lower);
        for piece in squeezed.split(|c: char| !c.is_ascii_lowercase()) {
            if !piece.is_empty() {
                words.push(piece.to_string());
            }
        }
    }
    words
}

/// Segmentation resources needed to decide derivability.
pub struct SegmenterContext<'a> {
    pub affixes: &'a AffixInventory,
    pub stems: &'a StemSet,
    pub max_depth: usize,
}

impl SegmenterContext<'_> {
    pub fn is_derivable(&self, word: &str) -> bool {
        segment_derivational(word, self.affixes, self.stems, self.max_depth).is_some()
    }
}

/// Counts, for every derivationally complex word, how many class-1 and
/// class-2 texts contain it and its total occurrence frequency. Documents
/// whose label belongs to neither class are skipped. Counting is
/// parallelized; the per-worker maps merge commutatively, so the result is
/// schedule-independent.
pub fn extract_complex_words(
    docs: &[Document],
    scheme: &LabelScheme,
    ctx: &SegmenterContext,
) -> BTreeMap<String, WordStats> {
    let counts = parallel::fold_merge(
        docs,
        BTreeMap::<String, WordStats>::new,
        |mut acc, doc| {
            let Some(class) = scheme.classify(&doc.label) else {
                return acc;
            };
            let words = preprocess(&doc.text);
            for word in &words {
                acc.entry(word.clone()).or_default().total_frequency += 1;
            }
            let unique: BTreeSet<&String> = words.iter().collect();
            for word in unique {
                let stats = acc.entry(word.clone()).or_default();
                match class {
                    ClassId::Class1 => stats.count_class1 += 1,
                    ClassId::Class2 => stats.count_class2 += 1,
                }
            }
            acc
        },
        |mut a, b| {
            for (word, stats) in &b {
                a.entry(word.clone()).or_default().merge(stats);
            }
            a
        },
    );

    // Drop everything the derivational segmenter rejects (stems, unknowns,
    // simplex words). Derivability is checked once per unique word.
    let words: Vec<String> = counts.keys().cloned().collect();
    let derivable = parallel::map_slice(&words, |w| ctx.is_derivable(w));
    words
        .into_iter()
        .zip(derivable)
        .filter(|(_, keep)| *keep)
        .map(|(w, _)| {
            let stats = counts[&w];
            (w, stats)
        })
        .collect()
}

/// Ranks words by class-1 fraction (descending, ties by word) and labels the
/// first tertile class 1 and the third tertile class 2; the middle tertile is
/// discarded. Needs at least three words.
pub fn assign_classes(
    stats: &BTreeMap<String, WordStats>,
) -> Result<Vec<(String, ClassId, u64)>> {
    let n = stats.len();
    if n < 3 {
        return Err(Error::DataShape(format!(
            "dataset too small: tertile labeling needs at least 3 words, got {n}"
        )));
    }
    let mut ranked: Vec<(&String, &WordStats)> = stats.iter().collect();
    ranked.sort_by(|(wa, sa), (wb, sb)| {
        sb.class1_fraction()
            .total_cmp(&sa.class1_fraction())
            .then_with(|| wa.cmp(wb))
    });
    let k = n / 3;
    let mut out = Vec::with_capacity(2 * k);
    for (word, stats) in &ranked[..k] {
        out.push(((*word).clone(), ClassId::Class1, stats.total_frequency));
    }
    for (word, stats) in &ranked[n - k..] {
        out.push(((*word).clone(), ClassId::Class2, stats.total_frequency));
    }
    Ok(out)
}

/// Dataset split assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::Format(format!("unknown split {other:?}"))),
        }
    }
}

/// A labeled dataset entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub word: String,
    pub class: ClassId,
    pub frequency: u64,
    pub split: Split,
}

/// The assembled dataset: unique complex words with class, frequency, and
/// split assignment.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub scheme: LabelScheme,
    pub entries: Vec<DatasetEntry>,
}

/// Permutes the classified words with a seeded shuffle and assigns the first
/// 60% to train, the next 20% to dev, and the rest to test.
pub fn split_dataset(
    classified: Vec<(String, ClassId, u64)>,
    scheme: LabelScheme,
    seed: u64,
) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = classified;
    items.shuffle(&mut rng);

    let n = items.len();
    let n_train = (0.6 * n as f64).round() as usize;
    let n_dev = ((0.2 * n as f64).round() as usize).min(n - n_train);

    let entries = items
        .into_iter()
        .enumerate()
        .map(|(i, (word, class, frequency))| {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            };
            DatasetEntry {
                word,
                class,
                frequency,
                split,
            }
        })
        .collect();
    LabeledDataset { scheme, entries }
}

impl LabeledDataset {
    pub fn by_split(&self, split: Split) -> impl Iterator<Item = &DatasetEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// Tab-separated rendering with a single header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("word\tclass\tfrequency\tsplit\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.word,
                self.scheme.class_name(e.class),
                e.frequency,
                e.split.as_str()
            ));
        }
        out
    }

    /// Parses the TSV format written by [`LabeledDataset::to_tsv`]. Class
    /// names must match the scheme; words must be unique.
    pub fn from_tsv(content: &str, scheme: LabelScheme) -> Result<Self> {
        let mut lines = content.lines();
        match lines.next() {
            Some("word\tclass\tfrequency\tsplit") => {}
            other => {
                return Err(Error::Format(format!(
                    "bad dataset header: {other:?}"
                )))
            }
        }
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(Error::Format(format!(
                    "dataset line {}: expected 4 columns, got {}",
                    i + 2,
                    cols.len()
                )));
            }
            let class = if cols[1] == scheme.class1_name {
                ClassId::Class1
            } else if cols[1] == scheme.class2_name {
                ClassId::Class2
            } else {
                return Err(Error::Format(format!(
                    "dataset line {}: unknown class {:?}",
                    i + 2,
                    cols[1]
                )));
            };
            let frequency: u64 = cols[2].parse().map_err(|_| {
                Error::Format(format!("dataset line {}: bad frequency {:?}", i + 2, cols[2]))
            })?;
            if !seen.insert(cols[0].to_string()) {
                return Err(Error::Format(format!(
                    "dataset line {}: duplicate word {:?}",
                    i + 2,
                    cols[0]
                )));
            }
            entries.push(DatasetEntry {
                word: cols[0].to_string(),
                class,
                frequency,
                split: Split::parse(cols[3])?,
            });
        }
        Ok(LabeledDataset { scheme, entries })
    }

    pub fn load_tsv(path: &Path, scheme: LabelScheme) -> Result<Self> {
        let content = crate::io::read_to_string(path)?;
        Self::from_tsv(&content, scheme)
    }
}

/// Parses line-delimited corpus records. The first line is a tab-separated
/// header naming the fields; `text_field` and `label_field` select the two
/// columns of interest. When the text field is the last column, embedded tabs
/// in the text are preserved.
pub fn parse_documents(content: &str, text_field: &str, label_field: &str) -> Result<Vec<Document>> {
    let mut lines = content.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("corpus file is empty".into()))?;
    let fields: Vec<&str> = header.split('\t').collect();
    let text_idx = fields
        .iter()
        .position(|f| *f == text_field)
        .ok_or_else(|| Error::Format(format!("corpus header lacks field {text_field:?}")))?;
    let label_idx = fields
        .iter()
        .position(|f| *f == label_field)
        .ok_or_else(|| Error::Format(format!("corpus header lacks field {label_field:?}")))?;

    let mut docs = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.splitn(fields.len(), '\t').collect();
        if cols.len() < fields.len() {
            return Err(Error::Format(format!(
                "corpus line {}: expected {} columns, got {}",
                i + 2,
                fields.len(),
                cols.len()
            )));
        }
        let label = cols[label_idx].to_string();
        if label.is_empty() {
            return Err(Error::Format(format!("corpus line {}: empty label", i + 2)));
        }
        docs.push(Document {
            text: cols[text_idx].to_string(),
            label,
        });
    }
    Ok(docs)
}

pub fn load_documents(path: &Path, text_field: &str, label_field: &str) -> Result<Vec<Document>> {
    let content = crate::io::read_to_string(path)?;
    parse_documents(&content, text_field, label_field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Vocabulary;

    #[test]
    fn preprocess_squeezes_long_repeats() {
        assert_eq!(preprocess("niiiiice"), vec!["niiice"]);
        // exactly three repeats are kept
        assert_eq!(preprocess("Nice niiice"), vec!["nice", "niiice"]);
    }

    #[test]
    fn preprocess_drops_links_and_digit_tokens() {
        assert_eq!(preprocess("visit http://x.co now2"), vec!["visit"]);
        assert_eq!(preprocess("see www.example.com or HTTPS://y.z"), vec!["see", "or"]);
    }

    #[test]
    fn preprocess_splits_on_non_alphabetic() {
        assert_eq!(preprocess("well-known word's"), vec!["well", "known", "word", "s"]);
    }

    #[test]
    fn preprocess_is_idempotent() {
        let texts = [
            "Grrrrreat stuff!! visit www.shop.example NOW 5stars",
            "niiiiice; well-known...",
        ];
        for t in texts {
            let once = preprocess(t);
            let again = preprocess(&once.join(" "));
            assert_eq!(once, again);
        }
    }

    fn tiny_context() -> (AffixInventory, StemSet) {
        let vocab = Vocabulary::from_tokens(
            ["super", "##ize", "bizarre", "annoying"].map(str::to_owned),
        )
        .unwrap();
        let affixes = AffixInventory::new(
            ["super".to_owned()],
            ["ize".to_owned()],
            &vocab,
        )
        .unwrap();
        let stems = StemSet::from_members(
            ["bizarre", "annoying", "tribal"].map(str::to_owned),
        );
        (affixes, stems)
    }

    fn scheme() -> LabelScheme {
        LabelScheme::new(
            "pos",
            "neg",
            ["4".to_owned(), "5".to_owned()],
            ["1".to_owned(), "2".to_owned()],
        )
        .unwrap()
    }

    #[test]
    fn scheme_rejects_overlap() {
        assert!(LabelScheme::new(
            "a",
            "b",
            ["x".to_owned()],
            ["x".to_owned(), "y".to_owned()]
        )
        .is_err());
    }

    #[test]
    fn extraction_counts_texts_not_occurrences_for_classes() {
        let (affixes, stems) = tiny_context();
        let ctx = SegmenterContext {
            affixes: &affixes,
            stems: &stems,
            max_depth: 4,
        };
        let docs = vec![Document {
            text: "superbizarre superbizarre".into(),
            label: "4".into(),
        }];
        let stats = extract_complex_words(&docs, &scheme(), &ctx);
        let s = stats.get("superbizarre").expect("extracted");
        assert_eq!(s.count_class1, 1);
        assert_eq!(s.count_class2, 0);
        assert_eq!(s.total_frequency, 2);
    }

    #[test]
    fn out_of_scheme_documents_are_skipped() {
        let (affixes, stems) = tiny_context();
        let ctx = SegmenterContext {
            affixes: &affixes,
            stems: &stems,
            max_depth: 4,
        };
        let docs = vec![Document {
            text: "superbizarre".into(),
            label: "3".into(),
        }];
        assert!(extract_complex_words(&docs, &scheme(), &ctx).is_empty());
    }

    #[test]
    fn simplex_words_contribute_nothing() {
        let (affixes, stems) = tiny_context();
        let ctx = SegmenterContext {
            affixes: &affixes,
            stems: &stems,
            max_depth: 4,
        };
        let docs = vec![Document {
            text: "bizarre annoying zzzqqq".into(),
            label: "4".into(),
        }];
        assert!(extract_complex_words(&docs, &scheme(), &ctx).is_empty());
    }

    fn stats_for(fractions: &[(&str, u64, u64)]) -> BTreeMap<String, WordStats> {
        fractions
            .iter()
            .map(|(w, c1, c2)| {
                (
                    w.to_string(),
                    WordStats {
                        count_class1: *c1,
                        count_class2: *c2,
                        total_frequency: c1 + c2,
                    },
                )
            })
            .collect()
    }

    #[test]
    fn tertiles_of_three() {
        let stats = stats_for(&[("a", 1, 0), ("b", 1, 1), ("c", 0, 1)]);
        let classified = assign_classes(&stats).unwrap();
        assert_eq!(
            classified,
            vec![
                ("a".to_string(), ClassId::Class1, 1),
                ("c".to_string(), ClassId::Class2, 1),
            ]
        );
    }

    #[test]
    fn tertiles_of_six() {
        // fractions 1.0, 0.9, 0.6, 0.5, 0.2, 0.0
        let stats = stats_for(&[
            ("u", 10, 0),
            ("v", 9, 1),
            ("w", 6, 4),
            ("x", 5, 5),
            ("y", 2, 8),
            ("z", 0, 10),
        ]);
        let classified = assign_classes(&stats).unwrap();
        let class1: Vec<&str> = classified
            .iter()
            .filter(|(_, c, _)| *c == ClassId::Class1)
            .map(|(w, _, _)| w.as_str())
            .collect();
        let class2: Vec<&str> = classified
            .iter()
            .filter(|(_, c, _)| *c == ClassId::Class2)
            .map(|(w, _, _)| w.as_str())
            .collect();
        assert_eq!(class1, vec!["u", "v"]);
        assert_eq!(class2, vec!["y", "z"]);
    }

    #[test]
    fn equal_fractions_fall_back_to_word_order() {
        let stats = stats_for(&[("c", 1, 1), ("a", 1, 1), ("b", 1, 1)]);
        let classified = assign_classes(&stats).unwrap();
        assert_eq!(classified[0].0, "a");
        assert_eq!(classified[0].1, ClassId::Class1);
        assert_eq!(classified[1].0, "c");
        assert_eq!(classified[1].1, ClassId::Class2);
    }

    #[test]
    fn too_few_words_is_an_error() {
        let stats = stats_for(&[("a", 1, 0), ("b", 0, 1)]);
        assert!(matches!(assign_classes(&stats), Err(Error::DataShape(_))));
    }

    fn classified_n(n: usize) -> Vec<(String, ClassId, u64)> {
        (0..n)
            .map(|i| {
                (
                    format!("word{i:03}"),
                    if i % 2 == 0 { ClassId::Class1 } else { ClassId::Class2 },
                    i as u64 + 1,
                )
            })
            .collect()
    }

    #[test]
    fn split_proportions_ten_entries() {
        let ds = split_dataset(classified_n(10), scheme(), 7);
        assert_eq!(ds.by_split(Split::Train).count(), 6);
        assert_eq!(ds.by_split(Split::Dev).count(), 2);
        assert_eq!(ds.by_split(Split::Test).count(), 2);
    }

    #[test]
    fn split_sizes_within_one_of_exact() {
        for n in 1..60 {
            let ds = split_dataset(classified_n(n), scheme(), 3);
            let train = ds.by_split(Split::Train).count() as f64;
            let dev = ds.by_split(Split::Dev).count() as f64;
            let test = ds.by_split(Split::Test).count() as f64;
            let nf = n as f64;
            assert!((train - 0.6 * nf).abs() <= 1.0, "n={n} train={train}");
            assert!((dev - 0.2 * nf).abs() <= 1.0, "n={n} dev={dev}");
            assert!((test - 0.2 * nf).abs() <= 1.0, "n={n} test={test}");
            assert_eq!(train + dev + test, nf);
        }
    }

    #[test]
    fn same_seed_same_split() {
        let a = split_dataset(classified_n(20), scheme(), 11);
        let b = split_dataset(classified_n(20), scheme(), 11);
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn some_seed_pair_differs() {
        let base = split_dataset(classified_n(8), scheme(), 0);
        let differs = (1..20u64)
            .any(|s| split_dataset(classified_n(8), scheme(), s).entries != base.entries);
        assert!(differs);
    }

    #[test]
    fn tsv_round_trips() {
        let ds = split_dataset(classified_n(9), scheme(), 5);
        let tsv = ds.to_tsv();
        let back = LabeledDataset::from_tsv(&tsv, scheme()).unwrap();
        assert_eq!(back.entries, ds.entries);
        assert_eq!(back.to_tsv(), tsv);
    }

    #[test]
    fn document_parsing_selects_fields() {
        let content = "label\ttext\n4\tgreat product\n1\tawful\tstill awful\n";
        let docs = parse_documents(content, "text", "label").unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].label, "4");
        assert_eq!(docs[0].text, "great product");
        // text is the last column, embedded tabs survive
        assert_eq!(docs[1].text, "awful\tstill awful");
    }

    #[test]
    fn document_parsing_requires_fields() {
        assert!(parse_documents("a\tb\nx\ty\n", "text", "label").is_err());
    }
}
