use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{nfc, LangTag, TagSet};
use crate::error::Error;

/// One utterance in the standardized dataset format.
///
/// Optional fields are omitted (never null) when serialized, so identical
/// datasets produce byte-identical JSONL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardRecord {
    pub uid: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lid: Option<Vec<LangTag>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub views: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<BTreeMap<String, String>>,
}

impl StandardRecord {
    /// A bare record with only the required fields set.
    pub fn new(uid: impl Into<String>, text: impl Into<String>) -> Self {
        StandardRecord {
            uid: uid.into(),
            text: text.into(),
            tokens: None,
            lid: None,
            pos: None,
            ner: None,
            label: None,
            target_text: None,
            views: None,
            metrics: None,
            meta: None,
        }
    }

    /// NFC-normalize every stored text field in place. Idempotent.
    pub fn normalize(&mut self) {
        self.uid = nfc(&self.uid);
        self.text = nfc(&self.text);
        if let Some(tokens) = &mut self.tokens {
            for t in tokens.iter_mut() {
                *t = nfc(t);
            }
        }
        if let Some(label) = &mut self.label {
            *label = nfc(label);
        }
        if let Some(target) = &mut self.target_text {
            *target = nfc(target);
        }
        if let Some(views) = &mut self.views {
            *views = views.iter().map(|(k, v)| (nfc(k), nfc(v))).collect();
        }
        if let Some(meta) = &mut self.meta {
            *meta = meta.iter().map(|(k, v)| (nfc(k), nfc(v))).collect();
        }
    }

    /// True if any open tag appears in the lid array.
    pub fn has_open_tags(&self) -> bool {
        self.lid
            .as_deref()
            .is_some_and(|tags| tags.iter().any(|t| matches!(t, LangTag::Open(_))))
    }
}

/// The kind of task a dataset serves; determines which fields are required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Classification,
    Tagging,
    Generation,
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TaskKind::Classification => "classification",
            TaskKind::Tagging => "tagging",
            TaskKind::Generation => "generation",
        };
        f.write_str(s)
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "classification" => Ok(TaskKind::Classification),
            "tagging" => Ok(TaskKind::Tagging),
            "generation" => Ok(TaskKind::Generation),
            other => Err(Error::usage(format!(
                "unknown task kind `{other}` (expected classification, tagging or generation)"
            ))),
        }
    }
}

/// An ordered collection of records plus the vocabulary and task they were
/// ingested under.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<StandardRecord>,
    pub tagset: TagSet,
    pub task_kind: TaskKind,
}

impl Dataset {
    pub fn new(task_kind: TaskKind) -> Self {
        Dataset {
            records: Vec::new(),
            tagset: TagSet::Closed,
            task_kind,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Recompute the tagset marker from the records actually present.
    pub fn refresh_tagset(&mut self) {
        self.tagset = if self.records.iter().any(StandardRecord::has_open_tags) {
            TagSet::Open
        } else {
            TagSet::Closed
        };
    }
}

/// One failed invariant; violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub uid: String,
    pub field: String,
    pub reason: String,
}

impl Violation {
    fn new(uid: &str, field: &str, reason: impl Into<String>) -> Self {
        Violation {
            uid: uid.to_string(),
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "record `{}` field `{}`: {}",
            self.uid, self.field, self.reason
        )
    }
}

fn check_alignment(
    rec: &StandardRecord,
    field: &str,
    len: Option<usize>,
    out: &mut Vec<Violation>,
) {
    let Some(len) = len else { return };
    match &rec.tokens {
        None => out.push(Violation::new(
            &rec.uid,
            field,
            "tag array present without tokens",
        )),
        Some(tokens) if tokens.len() != len => out.push(Violation::new(
            &rec.uid,
            field,
            format!("length {} does not match token count {}", len, tokens.len()),
        )),
        Some(_) => {}
    }
}

/// Check the task-independent record invariants.
pub fn validate_intrinsic(rec: &StandardRecord, tagset: TagSet) -> Vec<Violation> {
    let mut out = Vec::new();
    if rec.uid.is_empty() {
        out.push(Violation::new(&rec.uid, "uid", "empty uid"));
    }
    if nfc(&rec.text).is_empty() {
        out.push(Violation::new(
            &rec.uid,
            "text",
            "empty after NFC normalization",
        ));
    }
    if let Some(tokens) = &rec.tokens {
        if tokens.iter().any(|t| t.is_empty()) {
            out.push(Violation::new(&rec.uid, "tokens", "empty token"));
        }
    }
    check_alignment(rec, "lid", rec.lid.as_ref().map(Vec::len), &mut out);
    check_alignment(rec, "pos", rec.pos.as_ref().map(Vec::len), &mut out);
    check_alignment(rec, "ner", rec.ner.as_ref().map(Vec::len), &mut out);
    if tagset == TagSet::Closed {
        if let Some(tags) = &rec.lid {
            for tag in tags {
                if let LangTag::Open(name) = tag {
                    out.push(Violation::new(
                        &rec.uid,
                        "lid",
                        format!("open tag `{name}` under a closed tagset"),
                    ));
                }
            }
        }
    }
    out
}

/// Check all invariants for one record under the given task kind.
pub fn validate_record(
    rec: &StandardRecord,
    task_kind: TaskKind,
    tagset: TagSet,
) -> Vec<Violation> {
    let mut out = validate_intrinsic(rec, tagset);
    match task_kind {
        TaskKind::Classification => {
            if rec.label.is_none() {
                out.push(Violation::new(
                    &rec.uid,
                    "label",
                    "required for a classification task",
                ));
            }
        }
        TaskKind::Tagging => {
            if rec.tokens.is_none() {
                out.push(Violation::new(
                    &rec.uid,
                    "tokens",
                    "required for a tagging task",
                ));
            }
            if rec.lid.is_none() && rec.pos.is_none() && rec.ner.is_none() {
                out.push(Violation::new(
                    &rec.uid,
                    "lid",
                    "a tagging record needs at least one tag array",
                ));
            }
        }
        TaskKind::Generation => {
            if rec.target_text.is_none() {
                out.push(Violation::new(
                    &rec.uid,
                    "target_text",
                    "required for a generation task",
                ));
            }
        }
    }
    out
}

/// Validate every record plus the dataset-level uid uniqueness invariant.
pub fn validate_dataset(ds: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for rec in &ds.records {
        out.extend(validate_record(rec, ds.task_kind, ds.tagset));
        if !seen.insert(rec.uid.as_str()) {
            out.push(Violation::new(&rec.uid, "uid", "duplicate uid"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(uid: &str, tokens: &[&str], tags: &[LangTag]) -> StandardRecord {
        let mut rec = StandardRecord::new(uid, tokens.join(" "));
        rec.tokens = Some(tokens.iter().map(|s| s.to_string()).collect());
        rec.lid = Some(tags.to_vec());
        rec
    }

    #[test]
    fn well_formed_tagging_record_passes() {
        let rec = tagged("0", &["I", "ghar"], &[LangTag::Lang2, LangTag::Lang1]);
        assert!(validate_record(&rec, TaskKind::Tagging, TagSet::Closed).is_empty());
    }

    #[test]
    fn classification_without_label_flagged() {
        let rec = StandardRecord::new("0", "kya baat");
        let violations = validate_record(&rec, TaskKind::Classification, TagSet::Closed);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "label");
    }

    #[test]
    fn tag_length_mismatch_flagged() {
        let mut rec = tagged("0", &["a", "b", "c"], &[LangTag::Lang1, LangTag::Lang2]);
        rec.label = Some("x".into());
        let violations = validate_record(&rec, TaskKind::Classification, TagSet::Closed);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "lid");
    }

    #[test]
    fn duplicate_uid_flagged() {
        let mut ds = Dataset::new(TaskKind::Tagging);
        ds.records.push(tagged("1", &["a"], &[LangTag::Lang1]));
        ds.records.push(tagged("1", &["b"], &[LangTag::Lang2]));
        let violations = validate_dataset(&ds);
        assert!(violations.iter().any(|v| v.reason == "duplicate uid"));
    }

    #[test]
    fn empty_text_flagged() {
        let rec = StandardRecord::new("0", "  \u{00a0} ".trim_matches(' '));
        // whitespace-only text normalizes to a non-empty string of spaces,
        // so build a genuinely empty one instead
        let rec = StandardRecord {
            text: String::new(),
            ..rec
        };
        let violations = validate_intrinsic(&rec, TagSet::Closed);
        assert!(violations.iter().any(|v| v.field == "text"));
    }

    #[test]
    fn normalization_is_idempotent() {
        let mut rec = StandardRecord::new("0", "nai\u{0308}ve ghar");
        rec.normalize();
        let once = rec.clone();
        rec.normalize();
        assert_eq!(rec, once);
        assert_eq!(rec.text, "na\u{00ef}ve ghar");
    }
}
