//! Segmentation-quality analyses: WordPiece morphological-validity rates,
//! frequency-binned accuracy, per-affix accuracy deltas with Welch's t-test
//! and OLS regression, and likelihood-difference error ranking.

use std::collections::BTreeMap;

use crate::corpus::{LabeledDataset, Split};
use crate::derivational::DerivationalSegmentation;
use crate::error::{Error, Result};
use crate::probe::WordPrediction;
use crate::stats;
use crate::vocab::CONTINUATION_PREFIX;
use crate::wordpiece::WordPieceSegmentation;

/// A word together with both of its segmentations.
#[derive(Debug, Clone)]
pub struct SegmentedWord {
    pub word: String,
    pub derivational: DerivationalSegmentation,
    pub wordpiece: WordPieceSegmentation,
}

/// Checks whether the WordPiece segmentation keeps the stem intact: the stem
/// must appear as the de-prefixed concatenation of a contiguous token run
/// whose boundaries coincide with the stem's position in the surface word.
/// A stem altered by a morpho-orthographic rule can never match, and a stem
/// that merely occurs as a substring elsewhere does not count.
pub fn check_validity(
    word: &str,
    wp: &WordPieceSegmentation,
    ds: &DerivationalSegmentation,
) -> bool {
    if wp.is_unknown() {
        return false;
    }
    let start = ds.stem_offset();
    let stem = ds.stem();
    let end = start + stem.len();
    if end > word.len() || &word[start..end] != stem {
        return false;
    }
    let mut boundaries = Vec::with_capacity(wp.tokens().len() + 1);
    let mut pos = 0usize;
    boundaries.push(0);
    for token in wp.tokens() {
        pos += token
            .strip_prefix(CONTINUATION_PREFIX)
            .unwrap_or(token)
            .len();
        boundaries.push(pos);
    }
    if pos != word.len() {
        return false; // segmentation does not cover this word
    }
    boundaries.contains(&start) && boundaries.contains(&end)
}

/// Affix role for grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AffixRole {
    Prefix,
    Suffix,
}

impl AffixRole {
    pub fn as_str(self) -> &'static str {
        match self {
            AffixRole::Prefix => "prefix",
            AffixRole::Suffix => "suffix",
        }
    }
}

/// The outermost affix of a segmentation. Words with any prefix are grouped
/// under their outermost prefix; pure-suffix words under the outermost
/// suffix.
pub fn outermost_affix(ds: &DerivationalSegmentation) -> (AffixRole, String) {
    if let Some(prefix) = ds.prefixes().next() {
        (AffixRole::Prefix, prefix.to_string())
    } else {
        let outermost = ds
            .suffixes()
            .last()
            .expect("segmentation has at least one affix");
        (AffixRole::Suffix, outermost.to_string())
    }
}

/// Validity counts for one affix group.
#[derive(Debug, Clone, Copy, Default)]
pub struct AffixValidity {
    pub n_words: usize,
    pub n_invalid: usize,
}

impl AffixValidity {
    pub fn error_rate(&self) -> f64 {
        self.n_invalid as f64 / self.n_words as f64
    }
}

/// Per-affix WordPiece error rates with unweighted prefix/suffix aggregates.
#[derive(Debug, Clone, Default)]
pub struct ValidityReport {
    pub per_affix: BTreeMap<(AffixRole, String), AffixValidity>,
    pub prefix_mean: Option<f64>,
    pub prefix_std: Option<f64>,
    pub suffix_mean: Option<f64>,
    pub suffix_std: Option<f64>,
}

/// Groups words by outermost affix and reports the per-affix proportion of
/// morphologically invalid WordPiece segmentations. The aggregate mean and
/// standard deviation weight every affix equally regardless of group size.
pub fn validity_report(words: &[SegmentedWord]) -> ValidityReport {
    let mut report = ValidityReport::default();
    for sw in words {
        let key = outermost_affix(&sw.derivational);
        let entry = report.per_affix.entry(key).or_default();
        entry.n_words += 1;
        if !check_validity(&sw.word, &sw.wordpiece, &sw.derivational) {
            entry.n_invalid += 1;
        }
    }
    for role in [AffixRole::Prefix, AffixRole::Suffix] {
        let rates: Vec<f64> = report
            .per_affix
            .iter()
            .filter(|((r, _), _)| *r == role)
            .map(|(_, v)| v.error_rate())
            .collect();
        if !rates.is_empty() {
            let mean = stats::mean(&rates);
            let std = stats::population_std(&rates);
            match role {
                AffixRole::Prefix => {
                    report.prefix_mean = Some(mean);
                    report.prefix_std = Some(std);
                }
                AffixRole::Suffix => {
                    report.suffix_mean = Some(mean);
                    report.suffix_std = Some(std);
                }
            }
        }
    }
    report
}

/// Absolute-frequency bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FreqBin {
    Low,
    Mid,
    High,
}

impl FreqBin {
    /// Thresholds: low f <= 5, mid 5 < f <= 500, high f > 500.
    pub fn from_frequency(f: u64) -> Self {
        if f <= 5 {
            FreqBin::Low
        } else if f <= 500 {
            FreqBin::Mid
        } else {
            FreqBin::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FreqBin::Low => "low",
            FreqBin::Mid => "mid",
            FreqBin::High => "high",
        }
    }
}

/// Predictions of one trained model variant, averaged over seeds.
#[derive(Debug, Clone)]
pub struct ModelPredictions {
    pub name: String,
    pub per_word: BTreeMap<String, WordPrediction>,
}

/// One non-empty (model, bin) cell.
#[derive(Debug, Clone)]
pub struct BinAccuracy {
    pub model: String,
    pub bin: FreqBin,
    pub n_words: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default)]
pub struct FrequencyBinReport {
    pub rows: Vec<BinAccuracy>,
}

/// Bins merged dev+test words by frequency and reports each model's mean
/// correctness per bin. Empty bins produce no row.
pub fn frequency_bins(
    dataset: &LabeledDataset,
    models: &[ModelPredictions],
) -> FrequencyBinReport {
    let mut report = FrequencyBinReport::default();
    for model in models {
        let mut acc: BTreeMap<FreqBin, (usize, f64)> = BTreeMap::new();
        for entry in dataset
            .entries
            .iter()
            .filter(|e| matches!(e.split, Split::Dev | Split::Test))
        {
            let Some(pred) = model.per_word.get(&entry.word) else {
                continue;
            };
            let cell = acc.entry(FreqBin::from_frequency(entry.frequency)).or_default();
            cell.0 += 1;
            cell.1 += pred.mean_correct;
        }
        for (bin, (n, sum)) in acc {
            report.rows.push(BinAccuracy {
                model: model.name.clone(),
                bin,
                n_words: n,
                accuracy: sum / n as f64,
            });
        }
    }
    report
}

/// Welch's t-test output.
#[derive(Debug, Clone, Copy)]
pub struct StatTestResult {
    pub statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub effect_size: f64,
}

/// Two-tailed Welch's t-test with Welch-Satterthwaite degrees of freedom and
/// Cohen's d (pooled standard deviation) as the effect size. Sample
/// variances are population-normalized (divide by n).
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<StatTestResult> {
    let (na, nb) = (a.len(), b.len());
    if na < 2 || nb < 2 {
        return Err(Error::DataShape(format!(
            "welch t-test needs at least 2 values per sample, got {na} and {nb}"
        )));
    }
    let (ma, mb) = (stats::mean(a), stats::mean(b));
    let (va, vb) = (stats::population_variance(a), stats::population_variance(b));
    if va == 0.0 && vb == 0.0 {
        return Err(Error::DataShape(
            "welch t-test needs nonzero variance in at least one sample".into(),
        ));
    }
    let (na_f, nb_f) = (na as f64, nb as f64);
    let sea = va / na_f;
    let seb = vb / nb_f;
    let se2 = sea + seb;
    let statistic = (ma - mb) / se2.sqrt();
    let degrees_of_freedom =
        se2 * se2 / (sea * sea / (na_f - 1.0) + seb * seb / (nb_f - 1.0));
    let p_value = stats::t_two_tailed(statistic, degrees_of_freedom);
    let pooled = ((na_f * va + nb_f * vb) / (na_f + nb_f - 2.0)).sqrt();
    let effect_size = (ma - mb) / pooled;
    Ok(StatTestResult {
        statistic,
        degrees_of_freedom,
        p_value,
        effect_size,
    })
}

/// Simple-regression output.
#[derive(Debug, Clone, Copy)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub f_statistic: f64,
    pub p_value: f64,
}

/// Ordinary least squares of y on x with R², the model F statistic
/// F = R²(n-2)/(1-R²), and its p-value from the F(1, n-2) distribution.
pub fn ols_regression(x: &[f64], y: &[f64]) -> Result<RegressionResult> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::DataShape(format!(
            "regression inputs differ in length: {n} vs {}",
            y.len()
        )));
    }
    if n < 3 {
        return Err(Error::DataShape(format!(
            "regression needs at least 3 points, got {n}"
        )));
    }
    let mx = stats::mean(x);
    let my = stats::mean(y);
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DataShape("regression predictor is constant".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sst: f64 = y.iter().map(|yi| (yi - my) * (yi - my)).sum();
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let r_squared = if sst == 0.0 {
        0.0
    } else {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    };
    let df2 = (n - 2) as f64;
    let f_statistic = if r_squared >= 1.0 {
        f64::INFINITY
    } else {
        r_squared * df2 / (1.0 - r_squared)
    };
    let p_value = stats::f_sf(f_statistic, 1.0, df2);
    Ok(RegressionResult {
        slope,
        intercept,
        r_squared,
        f_statistic,
        p_value,
    })
}

/// One row of the error ranking.
#[derive(Debug, Clone)]
pub struct RankedWord {
    pub word: String,
    pub likelihood_a: f64,
    pub likelihood_b: f64,
    pub difference: f64,
}

/// Ranks words by the likelihood difference mu_a - mu_b, descending, ties by
/// word. Both maps must cover exactly the same words.
pub fn rank_error_examples(
    a: &BTreeMap<String, f64>,
    b: &BTreeMap<String, f64>,
) -> Result<Vec<RankedWord>> {
    let only_a: Vec<&str> = a.keys().filter(|w| !b.contains_key(*w)).map(|s| s.as_str()).collect();
    let only_b: Vec<&str> = b.keys().filter(|w| !a.contains_key(*w)).map(|s| s.as_str()).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        return Err(Error::DataShape(format!(
            "word sets differ: only in first = {only_a:?}, only in second = {only_b:?}"
        )));
    }
    let mut rows: Vec<RankedWord> = a
        .iter()
        .map(|(word, &la)| {
            let lb = b[word];
            RankedWord {
                word: word.clone(),
                likelihood_a: la,
                likelihood_b: lb,
                difference: la - lb,
            }
        })
        .collect();
    rows.sort_by(|x, y| {
        y.difference
            .total_cmp(&x.difference)
            .then_with(|| x.word.cmp(&y.word))
    });
    Ok(rows)
}

/// Per-affix accuracy comparison between two model variants, plus the
/// group's proportion of invalid WordPiece segmentations (the regression
/// predictor).
#[derive(Debug, Clone)]
pub struct AffixDelta {
    pub role: AffixRole,
    pub affix: String,
    pub n_words: usize,
    pub accuracy_a: f64,
    pub accuracy_b: f64,
    pub delta: f64,
    pub invalid_fraction: f64,
}

/// Groups the given (dev+test) words by outermost affix and compares mean
/// correctness of variant A against variant B per group. Words missing from
/// either prediction map are skipped.
pub fn affix_deltas(
    words: &[SegmentedWord],
    predictions_a: &BTreeMap<String, WordPrediction>,
    predictions_b: &BTreeMap<String, WordPrediction>,
) -> Vec<AffixDelta> {
    #[derive(Default)]
    struct Group {
        n: usize,
        sum_a: f64,
        sum_b: f64,
        invalid: usize,
    }
    let mut groups: BTreeMap<(AffixRole, String), Group> = BTreeMap::new();
    for sw in words {
        let (Some(pa), Some(pb)) = (
            predictions_a.get(&sw.word),
            predictions_b.get(&sw.word),
        ) else {
            continue;
        };
        let g = groups.entry(outermost_affix(&sw.derivational)).or_default();
        g.n += 1;
        g.sum_a += pa.mean_correct;
        g.sum_b += pb.mean_correct;
        if !check_validity(&sw.word, &sw.wordpiece, &sw.derivational) {
            g.invalid += 1;
        }
    }
    groups
        .into_iter()
        .map(|((role, affix), g)| {
            let accuracy_a = g.sum_a / g.n as f64;
            let accuracy_b = g.sum_b / g.n as f64;
            AffixDelta {
                role,
                affix,
                n_words: g.n,
                accuracy_a,
                accuracy_b,
                delta: accuracy_a - accuracy_b,
                invalid_fraction: g.invalid as f64 / g.n as f64,
            }
        })
        .collect()
}
