//! Code-mixing quantification.
//!
//! Five per-utterance and corpus-level metrics over token language tags:
//! the Code-Mixing Index (CMI), switch points, the switching probability
//! (I-index), language entropy and the Multilingual Index (M-index).
//! Language-independent tags (`ne`/`univ`/`other`/`mixed`) are transparent:
//! they never create switches and count toward the CMI's `u` term.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{tokenize_whitespace, Dataset, LangTag};
use crate::error::{Error, Result};
use crate::lid::LidModel;

/// Number of mixing languages the corpus is configured for. The M-index
/// denominator uses this, not the number of languages observed.
pub const CONFIGURED_LANGUAGES: usize = 2;

/// Per-utterance metric values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtteranceMetrics {
    pub cmi: f64,
    pub i_index: f64,
    pub entropy_bits: f64,
    pub switch_points: usize,
    pub n_tokens: usize,
    pub n_lang_tokens: usize,
    pub n_indep_tokens: usize,
}

/// Corpus-level aggregates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusMetrics {
    pub n_records: usize,
    pub mean_cmi_all: f64,
    pub mean_cmi_mixed: f64,
    pub fraction_mixed: f64,
    pub m_index: f64,
    pub language_entropy_bits: f64,
    pub avg_switch_points: f64,
    pub token_share: BTreeMap<LangTag, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_record: BTreeMap<String, UtteranceMetrics>,
    pub corpus: CorpusMetrics,
}

/// Count language-bearing tags per tag, plus the number of
/// language-independent tags (`u`).
pub fn language_histogram(tags: &[LangTag]) -> (BTreeMap<LangTag, usize>, usize) {
    let mut counts: BTreeMap<LangTag, usize> = BTreeMap::new();
    let mut independent = 0usize;
    for tag in tags {
        if tag.is_language_token() {
            *counts.entry(tag.clone()).or_insert(0) += 1;
        } else {
            independent += 1;
        }
    }
    (counts, independent)
}

/// Code-Mixing Index: `100 * (1 - max_i w_i / (n - u))` for `n > u`,
/// else 0. Ranges over [0, 100]; 0 whenever at most one language appears.
pub fn cmi(tags: &[LangTag]) -> f64 {
    let n = tags.len();
    let (counts, u) = language_histogram(tags);
    if n <= u {
        return 0.0;
    }
    let max_w = counts.values().copied().max().unwrap_or(0);
    100.0 * (1.0 - max_w as f64 / (n - u) as f64)
}

fn language_subsequence(tags: &[LangTag]) -> Vec<&LangTag> {
    tags.iter().filter(|t| t.is_language_token()).collect()
}

/// Number of adjacent unequal pairs in the language-token subsequence;
/// language-independent tokens are transparent.
pub fn switch_points(tags: &[LangTag]) -> usize {
    language_subsequence(tags)
        .windows(2)
        .filter(|pair| pair[0] != pair[1])
        .count()
}

/// Probability of switching: switch points over the n_lang - 1 adjacent
/// language-token pairs; 0 when fewer than two language tokens.
pub fn i_index(tags: &[LangTag]) -> f64 {
    let n_lang = language_subsequence(tags).len();
    if n_lang < 2 {
        return 0.0;
    }
    switch_points(tags) as f64 / (n_lang - 1) as f64
}

/// Shannon entropy (bits) of the language-token distribution.
pub fn language_entropy(tags: &[LangTag]) -> f64 {
    let (counts, _) = language_histogram(tags);
    entropy_bits_from_counts(counts.values().copied())
}

fn entropy_bits_from_counts(counts: impl Iterator<Item = usize> + Clone) -> f64 {
    let total: usize = counts.clone().sum();
    if total == 0 {
        return 0.0;
    }
    let mut bits = 0.0;
    for count in counts {
        if count == 0 {
            continue;
        }
        let p = count as f64 / total as f64;
        bits -= p * p.log2();
    }
    bits
}

/// Multilingual Index over a proportion vector of the configured
/// languages: `(1 - sum(p^2)) / ((k-1) * sum(p^2))`, 0 when `k = 1`,
/// when the proportions are all zero, or when one language owns them all.
pub fn m_index(proportions: &[f64]) -> f64 {
    let k = proportions.len();
    if k <= 1 {
        return 0.0;
    }
    let sum_sq: f64 = proportions.iter().map(|p| p * p).sum();
    if sum_sq == 0.0 || sum_sq == 1.0 {
        return 0.0;
    }
    (1.0 - sum_sq) / ((k - 1) as f64 * sum_sq)
}

/// Proportions of lang1/lang2 among the configured-language tokens.
fn configured_proportions(counts: &BTreeMap<LangTag, usize>) -> [f64; CONFIGURED_LANGUAGES] {
    let c1 = counts.get(&LangTag::Lang1).copied().unwrap_or(0);
    let c2 = counts.get(&LangTag::Lang2).copied().unwrap_or(0);
    let total = c1 + c2;
    if total == 0 {
        [0.0; CONFIGURED_LANGUAGES]
    } else {
        [c1 as f64 / total as f64, c2 as f64 / total as f64]
    }
}

/// Proportion vector of the configured languages for one tag sequence,
/// suitable as [`m_index`] input.
pub fn language_proportions(tags: &[LangTag]) -> [f64; CONFIGURED_LANGUAGES] {
    let (counts, _) = language_histogram(tags);
    configured_proportions(&counts)
}

/// All per-utterance metrics for one tag sequence.
pub fn utterance_metrics(tags: &[LangTag]) -> UtteranceMetrics {
    let (counts, independent) = language_histogram(tags);
    let n_lang: usize = counts.values().sum();
    UtteranceMetrics {
        cmi: cmi(tags),
        i_index: i_index(tags),
        entropy_bits: language_entropy(tags),
        switch_points: switch_points(tags),
        n_tokens: tags.len(),
        n_lang_tokens: n_lang,
        n_indep_tokens: independent,
    }
}

/// Where quantification takes its tags from.
pub enum LidSource<'a> {
    /// Records must already carry lid arrays.
    ExistingTags,
    /// Records lacking lid arrays are tagged with this model; existing
    /// arrays are kept.
    Model(&'a LidModel),
}

/// Compute per-record and corpus metrics, annotating each record's
/// `metrics` map with its four sampleable values.
pub fn quantify_dataset(dataset: &mut Dataset, source: LidSource<'_>) -> Result<MetricsReport> {
    match source {
        LidSource::ExistingTags => {
            if let Some(rec) = dataset.records.iter().find(|r| r.lid.is_none()) {
                return Err(Error::usage(format!(
                    "record `{}` has no lid tags and no model was supplied",
                    rec.uid
                )));
            }
        }
        LidSource::Model(model) => {
            for rec in &mut dataset.records {
                if rec.lid.is_none() && rec.tokens.is_none() {
                    rec.tokens = Some(tokenize_whitespace(&rec.text));
                }
            }
            let tagger = model.tagger();
            let filled: Vec<Option<Vec<LangTag>>> = dataset
                .records
                .par_iter()
                .map(|rec| {
                    if rec.lid.is_some() {
                        return None;
                    }
                    Some(
                        rec.tokens
                            .as_deref()
                            .unwrap_or(&[])
                            .iter()
                            .map(|token| tagger.tag_token(token).tag)
                            .collect(),
                    )
                })
                .collect();
            for (rec, lid) in dataset.records.iter_mut().zip(filled) {
                if let Some(lid) = lid {
                    rec.lid = Some(lid);
                }
            }
            dataset.refresh_tagset();
        }
    }

    let mut per_record = BTreeMap::new();
    let mut corpus_counts: BTreeMap<LangTag, usize> = BTreeMap::new();
    let mut total_tokens = 0usize;
    let mut sum_cmi = 0.0;
    let mut sum_cmi_mixed = 0.0;
    let mut mixed_records = 0usize;
    let mut sum_switches = 0usize;
    for rec in &mut dataset.records {
        let tags = rec.lid.as_deref().expect("lid filled above");
        let metrics = utterance_metrics(tags);
        for tag in tags {
            *corpus_counts.entry(tag.clone()).or_insert(0) += 1;
        }
        total_tokens += tags.len();
        sum_cmi += metrics.cmi;
        sum_switches += metrics.switch_points;
        if metrics.cmi > 0.0 {
            mixed_records += 1;
            sum_cmi_mixed += metrics.cmi;
        }
        let entry = rec.metrics.get_or_insert_with(BTreeMap::new);
        entry.insert("cmi".to_string(), metrics.cmi);
        entry.insert("i_index".to_string(), metrics.i_index);
        entry.insert("entropy_bits".to_string(), metrics.entropy_bits);
        entry.insert("switch_points".to_string(), metrics.switch_points as f64);
        per_record.insert(rec.uid.clone(), metrics);
    }

    let n = dataset.records.len();
    let lang_counts: BTreeMap<LangTag, usize> = corpus_counts
        .iter()
        .filter(|(tag, _)| tag.is_language_token())
        .map(|(tag, &c)| (tag.clone(), c))
        .collect();
    let token_share: BTreeMap<LangTag, f64> = if total_tokens == 0 {
        BTreeMap::new()
    } else {
        corpus_counts
            .iter()
            .map(|(tag, &c)| (tag.clone(), c as f64 / total_tokens as f64))
            .collect()
    };

    let corpus = CorpusMetrics {
        n_records: n,
        mean_cmi_all: if n == 0 { 0.0 } else { sum_cmi / n as f64 },
        mean_cmi_mixed: if mixed_records == 0 {
            0.0
        } else {
            sum_cmi_mixed / mixed_records as f64
        },
        fraction_mixed: if n == 0 {
            0.0
        } else {
            mixed_records as f64 / n as f64
        },
        m_index: m_index(&configured_proportions(&lang_counts)),
        language_entropy_bits: entropy_bits_from_counts(lang_counts.values().copied()),
        avg_switch_points: if n == 0 {
            0.0
        } else {
            sum_switches as f64 / n as f64
        },
        token_share,
    };

    Ok(MetricsReport { per_record, corpus })
}

/// Render the report as a JSON document with sorted keys and both the
/// `per_record` and `corpus` sections.
pub fn report_json(report: &MetricsReport) -> Result<String> {
    let value = serde_json::to_value(report).map_err(|e| Error::data(e.to_string()))?;
    serde_json::to_string_pretty(&value).map_err(|e| Error::data(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{StandardRecord, TaskKind};
    use LangTag::{Lang1 as L1, Lang2 as L2, Ne, Univ};

    #[test]
    fn histogram_counts_languages_and_independent() {
        let tags = [L1, L2, Univ, Ne, L1];
        let (counts, u) = language_histogram(&tags);
        assert_eq!(counts[&L1], 2);
        assert_eq!(counts[&L2], 1);
        assert_eq!(u, 2);

        let (counts, u) = language_histogram(&[]);
        assert!(counts.is_empty());
        assert_eq!(u, 0);

        let (counts, u) = language_histogram(&[Univ, Univ]);
        assert!(counts.is_empty());
        assert_eq!(u, 2);
    }

    #[test]
    fn cmi_examples() {
        assert_eq!(cmi(&[L1, L2, L1, L1, Univ]), 25.0);
        assert_eq!(cmi(&[L1, L1]), 0.0);
        assert_eq!(cmi(&[Univ, Univ, Univ]), 0.0);
        assert_eq!(cmi(&[]), 0.0);
    }

    #[test]
    fn switch_points_and_i_index() {
        let tags = [L1, L1, L2, L2, L1];
        assert_eq!(switch_points(&tags), 2);
        assert_eq!(i_index(&tags), 0.5);

        let tags = [L1, Univ, L2];
        assert_eq!(switch_points(&tags), 1);
        assert_eq!(i_index(&tags), 1.0);

        assert_eq!(switch_points(&[L1]), 0);
        assert_eq!(i_index(&[L1]), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(language_entropy(&[L1, L1, L2, L2]), 1.0);
        let e = language_entropy(&[L1, L1, L1, L2]);
        assert!((e - 0.811278).abs() < 1e-6);
        assert_eq!(language_entropy(&[L1, L1, L1]), 0.0);
    }

    #[test]
    fn m_index_examples() {
        assert_eq!(m_index(&[0.5, 0.5]), 1.0);
        assert_eq!(m_index(&[1.0, 0.0]), 0.0);
        assert!((m_index(&[0.75, 0.25]) - 0.6).abs() < 1e-12);
        assert_eq!(m_index(&[1.0]), 0.0);
        assert_eq!(m_index(&[0.0, 0.0]), 0.0);
    }

    fn tagged_record(uid: &str, tags: &[LangTag]) -> StandardRecord {
        let tokens: Vec<String> = (0..tags.len()).map(|i| format!("t{i}")).collect();
        let mut rec = StandardRecord::new(uid, tokens.join(" "));
        rec.tokens = Some(tokens);
        rec.lid = Some(tags.to_vec());
        rec
    }

    #[test]
    fn corpus_aggregates() {
        let mut ds = Dataset::new(TaskKind::Tagging);
        ds.records.push(tagged_record("a", &[L1, L1]));
        ds.records.push(tagged_record("b", &[L1, L2, L1, L1, Univ]));
        let report = quantify_dataset(&mut ds, LidSource::ExistingTags).unwrap();
        assert_eq!(report.corpus.mean_cmi_all, 12.5);
        assert_eq!(report.corpus.mean_cmi_mixed, 25.0);
        assert_eq!(report.corpus.fraction_mixed, 0.5);
        assert_eq!(report.corpus.n_records, 2);
        assert_eq!(report.per_record["b"].switch_points, 2);
        let share_sum: f64 = report.corpus.token_share.values().sum();
        assert!((share_sum - 1.0).abs() < 1e-9);
        // records got annotated
        let m = ds.records[1].metrics.as_ref().unwrap();
        assert_eq!(m["cmi"], 25.0);
    }

    #[test]
    fn empty_dataset_reports_zeros() {
        let mut ds = Dataset::new(TaskKind::Tagging);
        let report = quantify_dataset(&mut ds, LidSource::ExistingTags).unwrap();
        assert_eq!(report.corpus.n_records, 0);
        assert_eq!(report.corpus.mean_cmi_all, 0.0);
        assert_eq!(report.corpus.fraction_mixed, 0.0);
        assert_eq!(report.corpus.m_index, 0.0);
        assert!(report.corpus.token_share.is_empty());
    }

    #[test]
    fn monolingual_record_has_zero_metrics_and_full_share() {
        let mut ds = Dataset::new(TaskKind::Tagging);
        ds.records.push(tagged_record("a", &[L1, L1, L1]));
        let report = quantify_dataset(&mut ds, LidSource::ExistingTags).unwrap();
        assert_eq!(report.corpus.mean_cmi_all, 0.0);
        assert_eq!(report.corpus.m_index, 0.0);
        assert_eq!(report.corpus.language_entropy_bits, 0.0);
        assert_eq!(report.corpus.token_share[&L1], 1.0);
    }

    #[test]
    fn missing_lid_without_model_is_usage_error() {
        let mut ds = Dataset::new(TaskKind::Tagging);
        ds.records.push(StandardRecord::new("x", "hello"));
        let err = quantify_dataset(&mut ds, LidSource::ExistingTags).unwrap_err();
        match err {
            Error::Usage(msg) => assert!(msg.contains("`x`")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn utterance_bounds_hold() {
        let m = utterance_metrics(&[L1, L2, Univ, L1, Ne, L2]);
        assert!(m.switch_points <= m.n_lang_tokens.saturating_sub(1));
        assert!(m.cmi >= 0.0 && m.cmi <= 100.0);
        assert!(m.entropy_bits <= 1.0 + 1e-12);
        assert_eq!(m.n_tokens, 6);
        assert_eq!(m.n_lang_tokens, 4);
        assert_eq!(m.n_indep_tokens, 2);
    }
}
