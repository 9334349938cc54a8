//! Compares the rayon-parallel batch entry points against their sequential
//! fallbacks on the shipped vocabulary and affix resources.
//!
//! Run with `cargo bench -p morphseg-core`. Building with
//! `--no-default-features` drops the parallel variants and benches only the
//! sequential path.

use std::collections::HashSet;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphseg_core::corpus::{extract_complex_words, Document, LabelScheme, SegmenterContext};
use morphseg_core::derivational::{segment_derivational, DEFAULT_MAX_DEPTH};
use morphseg_core::parallel::map_slice_seq;
use morphseg_core::vocab::{build_stem_set, load_word_set, AffixInventory, StemSet, Vocabulary};
use morphseg_core::wordpiece::{segment_wordpiece, DEFAULT_MAX_CHARS};

struct Resources {
    vocab: Vocabulary,
    affixes: AffixInventory,
    stems: StemSet,
}

fn load_resources() -> Resources {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let vocab = Vocabulary::load(&root.join("fixtures/bert-base-uncased-vocab.txt")).unwrap();
    let affixes = AffixInventory::load(
        &root.join("data/prefixes.txt"),
        &root.join("data/suffixes.txt"),
        &vocab,
    )
    .unwrap();
    let stopwords: HashSet<String> = load_word_set(&root.join("data/stopwords.txt")).unwrap();
    let stems = build_stem_set(&vocab, &affixes, &stopwords);
    Resources {
        vocab,
        affixes,
        stems,
    }
}

/// Deterministic mix of derivatives (prefix + stem, stem + suffix) and plain
/// stems, shuffled.
fn word_sample(res: &Resources, n: usize) -> Vec<String> {
    let stems: Vec<&str> = res.stems.sorted();
    let prefixes: Vec<&str> = res.affixes.prefixes().collect();
    let suffixes: Vec<&str> = res.affixes.suffixes().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe11c);
    let mut words = Vec::with_capacity(n);
    for i in 0..n {
        let stem = stems[(i * 7919) % stems.len()];
        let word = match i % 3 {
            0 => format!("{}{stem}", prefixes[i % prefixes.len()]),
            1 => format!("{stem}{}", suffixes[i % suffixes.len()]),
            _ => stem.to_string(),
        };
        words.push(word);
    }
    words.shuffle(&mut rng);
    words
}

fn bench_derivational(c: &mut Criterion) {
    let res = load_resources();
    let words = word_sample(&res, 2000);
    let mut group = c.benchmark_group("derivational_batch");
    group.throughput(Throughput::Elements(words.len() as u64));
    group.bench_with_input(BenchmarkId::new("sequential", words.len()), &words, |b, words| {
        b.iter(|| {
            map_slice_seq(words, |w| {
                segment_derivational(w, &res.affixes, &res.stems, DEFAULT_MAX_DEPTH)
            })
        })
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", words.len()), &words, |b, words| {
        b.iter(|| {
            morphseg_core::derivational::segment_batch(
                words,
                &res.affixes,
                &res.stems,
                DEFAULT_MAX_DEPTH,
            )
        })
    });
    group.finish();
}

fn bench_wordpiece(c: &mut Criterion) {
    let res = load_resources();
    let words = word_sample(&res, 5000);
    let mut group = c.benchmark_group("wordpiece_batch");
    group.throughput(Throughput::Elements(words.len() as u64));
    group.bench_with_input(BenchmarkId::new("sequential", words.len()), &words, |b, words| {
        b.iter(|| map_slice_seq(words, |w| segment_wordpiece(w, &res.vocab, DEFAULT_MAX_CHARS)))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", words.len()), &words, |b, words| {
        b.iter(|| morphseg_core::wordpiece::segment_batch(words, &res.vocab, DEFAULT_MAX_CHARS))
    });
    group.finish();
}

fn bench_extraction(c: &mut Criterion) {
    let res = load_resources();
    let words = word_sample(&res, 400);
    let docs: Vec<Document> = (0..300)
        .map(|i| {
            let text: Vec<&str> = (0..40).map(|j| words[(i * 40 + j) % words.len()].as_str()).collect();
            Document {
                text: text.join(" "),
                label: if i % 2 == 0 { "1".into() } else { "2".into() },
            }
        })
        .collect();
    let scheme = LabelScheme::new("one", "two", ["1".to_owned()], ["2".to_owned()]).unwrap();
    let ctx = SegmenterContext {
        affixes: &res.affixes,
        stems: &res.stems,
        max_depth: DEFAULT_MAX_DEPTH,
    };
    let mut group = c.benchmark_group("corpus_extraction");
    group.throughput(Throughput::Elements(docs.len() as u64));
    // extract_complex_words dispatches on the feature flag internally; with
    // default features this measures the parallel path.
    group.bench_function("extract", |b| {
        b.iter(|| extract_complex_words(&docs, &scheme, &ctx))
    });
    group.finish();
}

criterion_group!(benches, bench_derivational, bench_wordpiece, bench_extraction);
criterion_main!(benches);
