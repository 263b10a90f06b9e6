//! Token-level language identification.
//!
//! A lexicon-backed character n-gram Naive Bayes tagger. Tagging a token
//! walks a three-step cascade: script rules learned from the training
//! corpus, then a case-folded lexicon lookup, then an n-gram Naive Bayes
//! score with add-alpha smoothing. Decisions are context-free per token,
//! so tagging is pure and parallelizes freely.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_script::{Script, UnicodeScript};

use crate::corpus::{tokenize_whitespace, Dataset, LangTag};
use crate::error::{Error, Result};

const MODEL_VERSION: u64 = 1;

/// A script rule is learned only when one language tag owns at least this
/// share of the script's letter occurrences in training. Keeps shared
/// scripts (e.g. Latin in romanized corpora) from acquiring a rule.
const SCRIPT_RULE_DOMINANCE: f64 = 0.95;

/// Share of a token's letters that must fall in a ruled script for the
/// rule to decide the token.
const SCRIPT_MATCH_SHARE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub alpha: f64,
    pub lexicon_min_count: u64,
}

impl Default for LidConfig {
    fn default() -> Self {
        LidConfig {
            ngram_min: 1,
            ngram_max: 3,
            alpha: 1.0,
            lexicon_min_count: 2,
        }
    }
}

impl LidConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_min < 1 {
            return Err(Error::usage("ngram_min must be >= 1"));
        }
        if self.ngram_max < self.ngram_min {
            return Err(Error::usage("ngram_max must be >= ngram_min"));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::usage("alpha must be a finite value > 0"));
        }
        if self.lexicon_min_count < 1 {
            return Err(Error::usage("lexicon_min_count must be >= 1"));
        }
        Ok(())
    }
}

type TagCounts = BTreeMap<LangTag, u64>;

/// Trained tagger state: lexicon counts, per-tag n-gram statistics,
/// tag priors and learned script rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidModel {
    pub config: LidConfig,
    pub lexicon: BTreeMap<String, TagCounts>,
    pub ngram_stats: BTreeMap<LangTag, BTreeMap<String, u64>>,
    pub script_rules: BTreeMap<String, LangTag>,
    pub tag_priors: TagCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionSource {
    ScriptRule,
    Lexicon,
    Ngram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TagPrediction {
    pub tag: LangTag,
    pub log_score: f64,
    pub source: PredictionSource,
}

/// Character n-gram tokenization: all n-grams of the `^`/`$`-padded
/// token for every order in `min..=max`, in extraction order. This is the
/// feature extraction behind the Naive Bayes path and doubles as the
/// toolkit's sub-word tokenizer.
pub fn char_ngrams(token: &str, min: usize, max: usize) -> Vec<String> {
    let padded: Vec<char> = std::iter::once('^')
        .chain(token.chars())
        .chain(std::iter::once('$'))
        .collect();
    let mut out = Vec::new();
    for n in min..=max {
        if n == 0 || n > padded.len() {
            continue;
        }
        for window in padded.windows(n) {
            out.push(window.iter().collect());
        }
    }
    out
}

fn letter_scripts(token: &str) -> (BTreeMap<&'static str, u64>, u64) {
    let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    let mut total = 0u64;
    for ch in token.chars().filter(|c| c.is_alphabetic()) {
        let script = ch.script();
        if script == Script::Common || script == Script::Inherited {
            continue;
        }
        *counts.entry(script.full_name()).or_insert(0) += 1;
        total += 1;
    }
    (counts, total)
}

/// argmax over a count map; ties go to the smaller tag.
fn argmax_counts(counts: &TagCounts) -> Option<(&LangTag, u64)> {
    let mut best: Option<(&LangTag, u64)> = None;
    for (tag, &count) in counts {
        if best.is_none_or(|(_, b)| count > b) {
            best = Some((tag, count));
        }
    }
    best
}

/// Train a model from a tagging dataset whose records carry tokens + lid.
///
/// Tokens are case-folded for the lexicon and n-gram counts; script
/// statistics use the original form. Language-independent tags contribute
/// to the lexicon and priors but never to script rules.
pub fn train(dataset: &Dataset, config: LidConfig) -> Result<LidModel> {
    config.validate()?;
    if dataset.records.is_empty() {
        return Err(Error::usage("cannot train on an empty dataset"));
    }

    let mut lexicon: BTreeMap<String, TagCounts> = BTreeMap::new();
    let mut ngram_stats: BTreeMap<LangTag, BTreeMap<String, u64>> = BTreeMap::new();
    let mut tag_priors: TagCounts = BTreeMap::new();
    let mut script_counts: BTreeMap<&'static str, TagCounts> = BTreeMap::new();
    let mut total_tokens = 0u64;

    for rec in &dataset.records {
        let (tokens, tags) = match (&rec.tokens, &rec.lid) {
            (Some(tokens), Some(tags)) if tokens.len() == tags.len() => (tokens, tags),
            (Some(_), Some(_)) => {
                return Err(Error::record(
                    rec.uid.clone(),
                    "lid length does not match token count",
                ))
            }
            _ => {
                return Err(Error::record(
                    rec.uid.clone(),
                    "training requires tokens and lid on every record",
                ))
            }
        };
        for (token, tag) in tokens.iter().zip(tags) {
            let folded = token.to_lowercase();
            *lexicon
                .entry(folded.clone())
                .or_default()
                .entry(tag.clone())
                .or_insert(0) += 1;
            *tag_priors.entry(tag.clone()).or_insert(0) += 1;
            total_tokens += 1;
            let grams = ngram_stats.entry(tag.clone()).or_default();
            for gram in char_ngrams(&folded, config.ngram_min, config.ngram_max) {
                *grams.entry(gram).or_insert(0) += 1;
            }
            if tag.is_language_token() {
                let (scripts, _) = letter_scripts(token);
                for (script, n) in scripts {
                    *script_counts
                        .entry(script)
                        .or_default()
                        .entry(tag.clone())
                        .or_insert(0) += n;
                }
            }
        }
    }

    if total_tokens == 0 {
        return Err(Error::usage("cannot train on a dataset with no tokens"));
    }

    let mut script_rules = BTreeMap::new();
    for (script, counts) in &script_counts {
        let total: u64 = counts.values().sum();
        if let Some((tag, best)) = argmax_counts(counts) {
            if best as f64 >= SCRIPT_RULE_DOMINANCE * total as f64 {
                script_rules.insert(script.to_string(), tag.clone());
            }
        }
    }

    Ok(LidModel {
        config,
        lexicon,
        ngram_stats,
        script_rules,
        tag_priors,
    })
}

/// Per-model tagging context with the Naive Bayes normalizers
/// precomputed once.
pub struct Tagger<'a> {
    model: &'a LidModel,
    total_tokens: u64,
    vocab_size: usize,
    ngram_totals: BTreeMap<&'a LangTag, u64>,
}

impl LidModel {
    pub fn tagger(&self) -> Tagger<'_> {
        let total_tokens = self.tag_priors.values().sum();
        let vocab: BTreeSet<&str> = self
            .ngram_stats
            .values()
            .flat_map(|grams| grams.keys().map(String::as_str))
            .collect();
        let ngram_totals = self
            .ngram_stats
            .iter()
            .map(|(tag, grams)| (tag, grams.values().sum()))
            .collect();
        Tagger {
            model: self,
            total_tokens,
            vocab_size: vocab.len(),
            ngram_totals,
        }
    }

    /// Convenience wrapper; building a [`Tagger`] once is cheaper when
    /// tagging many tokens.
    pub fn tag_token(&self, token: &str) -> TagPrediction {
        self.tagger().tag_token(token)
    }
}

impl Tagger<'_> {
    /// Decision cascade: script rule, then lexicon, then n-gram Naive
    /// Bayes. Empty tokens map to `univ`.
    pub fn tag_token(&self, token: &str) -> TagPrediction {
        if token.is_empty() {
            return TagPrediction {
                tag: LangTag::Univ,
                log_score: 0.0,
                source: PredictionSource::Ngram,
            };
        }

        let (scripts, total_letters) = letter_scripts(token);
        if total_letters > 0 {
            for (script, tag) in &self.model.script_rules {
                let in_script = scripts.get(script.as_str()).copied().unwrap_or(0);
                if in_script as f64 >= SCRIPT_MATCH_SHARE * total_letters as f64 {
                    return TagPrediction {
                        tag: tag.clone(),
                        log_score: 0.0,
                        source: PredictionSource::ScriptRule,
                    };
                }
            }
        }

        let folded = token.to_lowercase();
        if let Some(counts) = self.model.lexicon.get(&folded) {
            let total: u64 = counts.values().sum();
            if total >= self.model.config.lexicon_min_count {
                let (tag, best) = argmax_counts(counts).expect("lexicon entry is non-empty");
                return TagPrediction {
                    tag: tag.clone(),
                    log_score: (best as f64 / total as f64).ln(),
                    source: PredictionSource::Lexicon,
                };
            }
        }

        let (tag, log_score) = self.ngram_score(&folded);
        TagPrediction {
            tag,
            log_score,
            source: PredictionSource::Ngram,
        }
    }

    /// Naive Bayes over character n-grams: log prior plus summed
    /// add-alpha-smoothed log likelihoods over the union vocabulary.
    fn ngram_score(&self, folded: &str) -> (LangTag, f64) {
        let grams = char_ngrams(
            folded,
            self.model.config.ngram_min,
            self.model.config.ngram_max,
        );
        let alpha = self.model.config.alpha;
        let vocab = self.vocab_size as f64;

        let mut best: Option<(&LangTag, f64)> = None;
        for (tag, &prior) in &self.model.tag_priors {
            if prior == 0 {
                continue;
            }
            let mut score = (prior as f64 / self.total_tokens as f64).ln();
            if self.vocab_size > 0 {
                let tag_total = self.ngram_totals.get(tag).copied().unwrap_or(0) as f64;
                let denom = tag_total + alpha * vocab;
                let tag_grams = self.model.ngram_stats.get(tag);
                for gram in &grams {
                    let count = tag_grams.and_then(|g| g.get(gram)).copied().unwrap_or(0) as f64;
                    score += ((count + alpha) / denom).ln();
                }
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((tag, score));
            }
        }
        match best {
            Some((tag, score)) => (tag.clone(), score),
            // unreachable after training, which requires tokens
            None => (LangTag::Univ, 0.0),
        }
    }
}

/// Fill the lid array of every record, tokenizing from text where tokens
/// are absent. Pre-existing lid arrays are an error unless `overwrite`.
pub fn tag_dataset(model: &LidModel, dataset: &mut Dataset, overwrite: bool) -> Result<()> {
    if !overwrite {
        if let Some(rec) = dataset.records.iter().find(|r| r.lid.is_some()) {
            return Err(Error::usage(format!(
                "record `{}` already carries lid tags; pass the overwrite flag to replace them",
                rec.uid
            )));
        }
    }
    for rec in &mut dataset.records {
        if rec.tokens.is_none() {
            rec.tokens = Some(tokenize_whitespace(&rec.text));
        }
    }
    let tagger = model.tagger();
    let tagged: Vec<Vec<LangTag>> = dataset
        .records
        .par_iter()
        .map(|rec| {
            rec.tokens
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .map(|token| tagger.tag_token(token).tag)
                .collect()
        })
        .collect();
    for (rec, lid) in dataset.records.iter_mut().zip(tagged) {
        rec.lid = Some(lid);
    }
    dataset.refresh_tagset();
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u64,
    #[serde(flatten)]
    model: LidModel,
}

/// Serialize the model as a JSON document with sorted keys and a
/// `version` field. Identical models produce identical bytes.
pub fn save<W: Write>(model: &LidModel, mut writer: W) -> Result<()> {
    let file = ModelFile {
        version: MODEL_VERSION,
        model: model.clone(),
    };
    // round-tripping through Value sorts every object's keys
    let value = serde_json::to_value(&file).map_err(|e| Error::data(e.to_string()))?;
    serde_json::to_writer(&mut writer, &value).map_err(|e| Error::data(e.to_string()))?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn load<R: Read>(mut reader: R) -> Result<LidModel> {
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    let value: serde_json::Value = serde_json::from_str(&buf)
        .map_err(|e| Error::data(format!("malformed model file: {e}")))?;
    match value.get("version").and_then(serde_json::Value::as_u64) {
        Some(MODEL_VERSION) => {}
        Some(other) => {
            return Err(Error::data(format!(
                "unsupported model version {other} (expected {MODEL_VERSION})"
            )))
        }
        None => return Err(Error::data("model file is missing a version field")),
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::data(format!("malformed model file: {e}")))?;
    file.model.config.validate().map_err(|e| match e {
        Error::Usage(msg) => Error::data(format!("invalid model config: {msg}")),
        other => other,
    })?;
    Ok(file.model)
}
