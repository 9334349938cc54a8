//! Linear probing over segmentation-derived bag-of-token features.
//!
//! Each word is represented by the counts of its segmentation tokens (plus
//! three reserved ids used by the stem/affix ablations), and a logistic
//! model trained with mini-batch gradient descent predicts the binary
//! semantic class. Training starts from all-zero weights, so for a fixed
//! shuffle seed the optimization is bit-reproducible; the seed only governs
//! the per-epoch data order.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledDataset, Split};
use crate::derivational::{segment_derivational, serialize_delbert};
use crate::error::{Error, Result};
use crate::parallel;
use crate::vocab::{AffixInventory, StemSet, Vocabulary};
use crate::wordpiece::segment_wordpiece;

/// Which segmenter produces the features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegKind {
    WordPiece,
    Derivational,
}

impl SegKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SegKind::WordPiece => "wordpiece",
            SegKind::Derivational => "derivational",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "wordpiece" => Ok(SegKind::WordPiece),
            "derivational" => Ok(SegKind::Derivational),
            other => Err(Error::Config(format!("unknown segmentation kind {other:?}"))),
        }
    }
}

/// Feature construction mode. The ablations collapse all stems (or all
/// prefixes/suffixes) onto shared ids to isolate what the other unit type
/// contributes; they are defined for derivational features only, since
/// WordPiece tokens carry no stem/affix roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationMode {
    Full,
    StemAblated,
    AffixAblated,
}

impl AblationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AblationMode::Full => "full",
            AblationMode::StemAblated => "stem_ablated",
            AblationMode::AffixAblated => "affix_ablated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(AblationMode::Full),
            "stem_ablated" => Ok(AblationMode::StemAblated),
            "affix_ablated" => Ok(AblationMode::AffixAblated),
            other => Err(Error::Config(format!("unknown ablation mode {other:?}"))),
        }
    }
}

/// The feature id space: one id per vocabulary token plus three reserved ids.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSpace {
    vocab_len: u32,
}

impl FeatureSpace {
    pub fn new(vocab: &Vocabulary) -> Self {
        FeatureSpace {
            vocab_len: vocab.len() as u32,
        }
    }

    pub fn size(&self) -> usize {
        self.vocab_len as usize + 3
    }

    pub fn shared_stem(&self) -> u32 {
        self.vocab_len
    }

    pub fn shared_prefix(&self) -> u32 {
        self.vocab_len + 1
    }

    pub fn shared_suffix(&self) -> u32 {
        self.vocab_len + 2
    }
}

/// Sparse non-negative token counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureVector {
    counts: BTreeMap<u32, u32>,
}

impl FeatureVector {
    pub fn counts(&self) -> &BTreeMap<u32, u32> {
        &self.counts
    }

    fn add(&mut self, id: u32) {
        *self.counts.entry(id).or_insert(0) += 1;
    }

    /// Stable rendering used to group identical feature patterns.
    pub fn signature(&self) -> String {
        self.counts
            .iter()
            .map(|(id, c)| format!("{id}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Everything featurization needs.
pub struct ProbeContext<'a> {
    pub vocab: &'a Vocabulary,
    pub affixes: &'a AffixInventory,
    pub stems: &'a StemSet,
    pub max_depth: usize,
    pub max_chars: usize,
}

/// Maps a word to its feature vector, or `None` when the word is not
/// segmentable under `kind` (the word is then skipped downstream).
/// Requesting an ablation for WordPiece features is a configuration error.
pub fn featurize(
    word: &str,
    kind: SegKind,
    mode: AblationMode,
    ctx: &ProbeContext,
) -> Result<Option<FeatureVector>> {
    let space = FeatureSpace::new(ctx.vocab);
    match kind {
        SegKind::WordPiece => {
            if mode != AblationMode::Full {
                return Err(Error::Config(format!(
                    "ablation mode {:?} is undefined for WordPiece features",
                    mode.as_str()
                )));
            }
            let seg = segment_wordpiece(word, ctx.vocab, ctx.max_chars)?;
            if seg.is_unknown() {
                return Ok(None);
            }
            let mut fv = FeatureVector::default();
            for token in seg.tokens() {
                let id = ctx.vocab.id(token).ok_or_else(|| {
                    Error::Validation(format!("token {token:?} missing from vocabulary"))
                })?;
                fv.add(id);
            }
            Ok(Some(fv))
        }
        SegKind::Derivational => {
            let Some(seg) =
                segment_derivational(word, ctx.affixes, ctx.stems, ctx.max_depth)
            else {
                return Ok(None);
            };
            // Serialization both yields the token sequence and enforces the
            // vocabulary-closure invariant.
            let tokens = serialize_delbert(&seg, ctx.vocab)?;
            let mut fv = FeatureVector::default();
            let prefix_count = seg.prefixes().count();
            let mut emitted = 0usize; // counts non-hyphen tokens seen
            for token in &tokens {
                if token == crate::derivational::HYPHEN_TOKEN {
                    fv.add(ctx.vocab.id(token).expect("checked by serialization"));
                    continue;
                }
                let role_id = if emitted < prefix_count {
                    // prefix token
                    match mode {
                        AblationMode::AffixAblated => space.shared_prefix(),
                        _ => ctx.vocab.id(token).expect("checked by serialization"),
                    }
                } else if emitted == prefix_count {
                    // stem token
                    match mode {
                        AblationMode::StemAblated => space.shared_stem(),
                        _ => ctx.vocab.id(token).expect("checked by serialization"),
                    }
                } else {
                    // suffix token
                    match mode {
                        AblationMode::AffixAblated => space.shared_suffix(),
                        _ => ctx.vocab.id(token).expect("checked by serialization"),
                    }
                };
                fv.add(role_id);
                emitted += 1;
            }
            Ok(Some(fv))
        }
    }
}

/// A featurized dataset entry. `label` is true for class 1, the positive
/// class of the F1 computation.
#[derive(Debug, Clone)]
pub struct Example {
    pub word: String,
    pub label: bool,
    pub features: FeatureVector,
}

/// Featurized train/dev/test splits plus the words skipped as unsegmentable.
#[derive(Debug, Clone, Default)]
pub struct ProbeDataset {
    pub train: Vec<Example>,
    pub dev: Vec<Example>,
    pub test: Vec<Example>,
    pub skipped: Vec<String>,
}

/// Featurizes every dataset word under `kind`/`mode`.
pub fn featurize_dataset(
    dataset: &LabeledDataset,
    kind: SegKind,
    mode: AblationMode,
    ctx: &ProbeContext,
) -> Result<ProbeDataset> {
    let featurized: Vec<Result<Option<FeatureVector>>> =
        parallel::map_slice(&dataset.entries, |e| featurize(&e.word, kind, mode, ctx));
    let mut out = ProbeDataset::default();
    for (entry, fv) in dataset.entries.iter().zip(featurized) {
        match fv? {
            None => out.skipped.push(entry.word.clone()),
            Some(features) => {
                let example = Example {
                    word: entry.word.clone(),
                    label: entry.class == crate::corpus::ClassId::Class1,
                    features,
                };
                match entry.split {
                    Split::Train => out.train.push(example),
                    Split::Dev => out.dev.push(example),
                    Split::Test => out.test.push(example),
                }
            }
        }
    }
    Ok(out)
}

fn sigmoid(z: f64) -> f64 {
    let p = 1.0 / (1.0 + (-z).exp());
    p.clamp(1e-12, 1.0 - 1e-12)
}

/// A trained logistic probe.
#[derive(Debug, Clone)]
pub struct ProbeModel {
    weights: Vec<f64>,
    bias: f64,
    kind: SegKind,
    mode: AblationMode,
}

impl ProbeModel {
    pub fn from_parts(weights: Vec<f64>, bias: f64, kind: SegKind, mode: AblationMode) -> Self {
        ProbeModel {
            weights,
            bias,
            kind,
            mode,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kind(&self) -> SegKind {
        self.kind
    }

    pub fn mode(&self) -> AblationMode {
        self.mode
    }

    fn raw_score(&self, fv: &FeatureVector) -> f64 {
        let mut z = self.bias;
        for (&id, &count) in fv.counts() {
            z += self.weights[id as usize] * count as f64;
        }
        z
    }

    /// Probability of class 1, clamped into the open interval (0, 1).
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        sigmoid(self.raw_score(fv))
    }

    /// Plain-text serialization: a header with mode, kind, and feature-space
    /// size, one weight per line, bias last.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "morphseg-probe-v1\nkind\t{}\nmode\t{}\nfeatures\t{}\n",
            self.kind.as_str(),
            self.mode.as_str(),
            self.weights.len()
        );
        for w in &self.weights {
            out.push_str(&format!("{w}\n"));
        }
        out.push_str(&format!("{}\n", self.bias));
        out
    }

    pub fn from_text(content: &str) -> Result<Self> {
        let mut lines = content.lines();
        if lines.next() != Some("morphseg-probe-v1") {
            return Err(Error::Format("not a probe model file".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing {name} line")))?;
            line.strip_prefix(&format!("{name}\t"))
                .map(str::to_owned)
                .ok_or_else(|| Error::Format(format!("bad {name} line {line:?}")))
        };
        let kind = SegKind::parse(&field("kind")?)?;
        let mode = AblationMode::parse(&field("mode")?)?;
        let n: usize = field("features")?
            .parse()
            .map_err(|_| Error::Format("bad feature count".into()))?;
        let mut values = Vec::with_capacity(n + 1);
        for line in lines {
            if line.is_empty() {
                continue;
            }
            values.push(
                line.parse::<f64>()
                    .map_err(|_| Error::Format(format!("bad weight {line:?}")))?,
            );
        }
        if values.len() != n + 1 {
            return Err(Error::Format(format!(
                "expected {} weights + bias, got {} values",
                n,
                values.len()
            )));
        }
        let bias = values.pop().unwrap();
        Ok(ProbeModel {
            weights: values,
            bias,
            kind,
            mode,
        })
    }
}

/// A single training configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: u32,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

/// Mean binary cross-entropy of a weight vector on a set of examples.
pub fn bce_loss_at(weights: &[f64], bias: f64, examples: &[Example]) -> f64 {
    let mut loss = 0.0;
    for ex in examples {
        let mut z = bias;
        for (&id, &count) in ex.features.counts() {
            z += weights[id as usize] * count as f64;
        }
        let p = sigmoid(z);
        loss -= if ex.label { p.ln() } else { (1.0 - p).ln() };
    }
    loss / examples.len() as f64
}

/// Analytic gradient of [`bce_loss_at`] with respect to weights and bias.
pub fn bce_gradient_at(
    weights: &[f64],
    bias: f64,
    examples: &[Example],
    space_size: usize,
) -> (Vec<f64>, f64) {
    let mut grad_w = vec![0.0; space_size];
    let mut grad_b = 0.0;
    let m = examples.len() as f64;
    for ex in examples {
        let mut z = bias;
        for (&id, &count) in ex.features.counts() {
            z += weights[id as usize] * count as f64;
        }
        let err = sigmoid(z) - if ex.label { 1.0 } else { 0.0 };
        for (&id, &count) in ex.features.counts() {
            grad_w[id as usize] += err * count as f64 / m;
        }
        grad_b += err / m;
    }
    (grad_w, grad_b)
}

/// Trains a logistic probe with mini-batch gradient descent from all-zero
/// initialization. The training split must contain both classes.
pub fn train_probe(
    train: &[Example],
    space: &FeatureSpace,
    kind: SegKind,
    mode: AblationMode,
    cfg: &TrainConfig,
) -> Result<ProbeModel> {
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch size must be positive".into()));
    }
    if !(cfg.learning_rate > 0.0) {
        return Err(Error::Config("learning rate must be positive".into()));
    }
    let positives = train.iter().filter(|e| e.label).count();
    if train.is_empty() || positives == 0 || positives == train.len() {
        return Err(Error::DataShape(
            "training split must contain both classes".into(),
        ));
    }

    let mut weights = vec![0.0; space.size()];
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let m = batch.len() as f64;
            let mut grad: BTreeMap<u32, f64> = BTreeMap::new();
            let mut grad_b = 0.0;
            for &i in batch {
                let ex = &train[i];
                let mut z = bias;
                for (&id, &count) in ex.features.counts() {
                    z += weights[id as usize] * count as f64;
                }
                let err = sigmoid(z) - if ex.label { 1.0 } else { 0.0 };
                for (&id, &count) in ex.features.counts() {
                    *grad.entry(id).or_insert(0.0) += err * count as f64;
                }
                grad_b += err;
            }
            for (id, g) in grad {
                weights[id as usize] -= cfg.learning_rate * g / m;
            }
            bias -= cfg.learning_rate * grad_b / m;
        }
    }
    Ok(ProbeModel {
        weights,
        bias,
        kind,
        mode,
    })
}

/// Evaluation results on one split.
#[derive(Debug, Clone)]
pub struct Metrics {
    pub f1: f64,
    pub accuracy: f64,
    pub per_word_likelihood: BTreeMap<String, f64>,
}

/// True iff the model's argmax prediction matches the label (probability
/// exactly 0.5 predicts class 1).
fn is_correct(p_class1: f64, label: bool) -> bool {
    if label {
        p_class1 >= 0.5
    } else {
        p_class1 < 0.5
    }
}

/// Computes F1 (class 1 positive), accuracy, and the per-word likelihood of
/// the true class.
pub fn evaluate(model: &ProbeModel, examples: &[Example]) -> Metrics {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    let mut correct = 0u64;
    let mut per_word = BTreeMap::new();
    for ex in examples {
        let p = model.predict(&ex.features);
        let predicted_class1 = p >= 0.5;
        match (predicted_class1, ex.label) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
        if is_correct(p, ex.label) {
            correct += 1;
        }
        per_word.insert(ex.word.clone(), if ex.label { p } else { 1.0 - p });
    }
    let f1 = f1_from_counts(tp, fp, fn_);
    let accuracy = if examples.is_empty() {
        0.0
    } else {
        correct as f64 / examples.len() as f64
    };
    Metrics {
        f1,
        accuracy,
        per_word_likelihood: per_word,
    }
}

fn f1_from_counts(tp: u64, fp: u64, fn_: u64) -> f64 {
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Grids searched by [`grid_search`].
#[derive(Debug, Clone)]
pub struct Hyperparams {
    pub epochs: Vec<u32>,
    pub learning_rates: Vec<f64>,
    pub batch_size: usize,
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.epochs.is_empty() || self.learning_rates.is_empty() {
            return Err(Error::Config("hyperparameter grids must be non-empty".into()));
        }
        if self.learning_rates.iter().any(|lr| !(*lr > 0.0)) {
            return Err(Error::Config("learning rates must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be positive".into()));
        }
        Ok(())
    }
}

/// Per-run evaluation record.
#[derive(Debug, Clone)]
pub struct RunMetrics {
    pub epochs: u32,
    pub learning_rate: f64,
    pub seed: u64,
    pub train_f1: f64,
    pub train_accuracy: f64,
    pub dev_f1: f64,
    pub dev_accuracy: f64,
    pub test_f1: f64,
    pub test_accuracy: f64,
}

/// Mean and standard deviation of dev F1 across seeds for one configuration.
#[derive(Debug, Clone)]
pub struct ConfigSummary {
    pub epochs: u32,
    pub learning_rate: f64,
    pub mean_dev_f1: f64,
    pub std_dev_f1: f64,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub best_epochs: u32,
    pub best_learning_rate: f64,
    pub summaries: Vec<ConfigSummary>,
    pub runs: Vec<RunMetrics>,
}

/// Trains every (epochs, learning-rate) configuration with every seed and
/// selects the configuration with the highest mean dev F1 (first in grid
/// order on ties). Runs are independent and execute in parallel; results are
/// collected in deterministic grid × seed order.
pub fn grid_search(
    data: &ProbeDataset,
    space: &FeatureSpace,
    kind: SegKind,
    mode: AblationMode,
    hp: &Hyperparams,
    seeds: &[u64],
) -> Result<GridSearchResult> {
    hp.validate()?;
    if seeds.is_empty() {
        return Err(Error::Config("seed list must be non-empty".into()));
    }
    let mut jobs = Vec::new();
    for &epochs in &hp.epochs {
        for &lr in &hp.learning_rates {
            for &seed in seeds {
                jobs.push(TrainConfig {
                    epochs,
                    learning_rate: lr,
                    batch_size: hp.batch_size,
                    seed,
                });
            }
        }
    }
    let runs: Vec<Result<RunMetrics>> = parallel::map_slice(&jobs, |cfg| {
        let model = train_probe(&data.train, space, kind, mode, cfg)?;
        let train = evaluate(&model, &data.train);
        let dev = evaluate(&model, &data.dev);
        let test = evaluate(&model, &data.test);
        Ok(RunMetrics {
            epochs: cfg.epochs,
            learning_rate: cfg.learning_rate,
            seed: cfg.seed,
            train_f1: train.f1,
            train_accuracy: train.accuracy,
            dev_f1: dev.f1,
            dev_accuracy: dev.accuracy,
            test_f1: test.f1,
            test_accuracy: test.accuracy,
        })
    });
    let runs: Vec<RunMetrics> = runs.into_iter().collect::<Result<_>>()?;

    let mut summaries = Vec::new();
    let mut best: Option<(f64, u32, f64)> = None;
    let per_config = seeds.len();
    for (c, chunk) in runs.chunks(per_config).enumerate() {
        let epochs = hp.epochs[c / hp.learning_rates.len()];
        let lr = hp.learning_rates[c % hp.learning_rates.len()];
        let dev_f1s: Vec<f64> = chunk.iter().map(|r| r.dev_f1).collect();
        let mean = crate::stats::mean(&dev_f1s);
        let std = crate::stats::population_std(&dev_f1s);
        summaries.push(ConfigSummary {
            epochs,
            learning_rate: lr,
            mean_dev_f1: mean,
            std_dev_f1: std,
        });
        if best.map_or(true, |(b, _, _)| mean > b) {
            best = Some((mean, epochs, lr));
        }
    }
    let (_, best_epochs, best_learning_rate) = best.expect("non-empty grids");
    Ok(GridSearchResult {
        best_epochs,
        best_learning_rate,
        summaries,
        runs,
    })
}

/// Per-word prediction averaged across seeds: likelihood of the true class
/// and the fraction of seeds whose argmax prediction was correct.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPrediction {
    pub mean_likelihood: f64,
    pub mean_correct: f64,
}

/// Trains one model per seed with the given configuration and averages
/// per-word true-class likelihood and correctness over all splits.
pub fn predict_mean(
    data: &ProbeDataset,
    space: &FeatureSpace,
    kind: SegKind,
    mode: AblationMode,
    epochs: u32,
    learning_rate: f64,
    batch_size: usize,
    seeds: &[u64],
) -> Result<BTreeMap<String, WordPrediction>> {
    if seeds.is_empty() {
        return Err(Error::Config("seed list must be non-empty".into()));
    }
    let per_seed: Vec<Result<BTreeMap<String, (f64, bool)>>> =
        parallel::map_slice(seeds, |&seed| {
            let cfg = TrainConfig {
                epochs,
                learning_rate,
                batch_size,
                seed,
            };
            let model = train_probe(&data.train, space, kind, mode, &cfg)?;
            let mut map = BTreeMap::new();
            for split in [&data.train, &data.dev, &data.test] {
                for ex in split {
                    let p = model.predict(&ex.features);
                    let likelihood = if ex.label { p } else { 1.0 - p };
                    map.insert(ex.word.clone(), (likelihood, is_correct(p, ex.label)));
                }
            }
            Ok(map)
        });

    let mut out: BTreeMap<String, WordPrediction> = BTreeMap::new();
    let n = seeds.len() as f64;
    for seed_map in per_seed {
        for (word, (likelihood, correct)) in seed_map? {
            let agg = out.entry(word).or_default();
            agg.mean_likelihood += likelihood / n;
            agg.mean_correct += if correct { 1.0 } else { 0.0 } / n;
        }
    }
    Ok(out)
}
