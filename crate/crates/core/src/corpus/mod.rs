//! The standardized record model, format converters and validation.
//!
//! External formats (CoNLL-style tagging files, classification TSV) are
//! parsed into [`Dataset`]s of [`StandardRecord`]s; the canonical on-disk
//! representation is JSONL with one record object per line.

mod conll;
mod jsonl;
mod record;
mod tag;
mod tsv;

pub use conll::parse_conll;
pub use jsonl::{infer_task_kind, read_jsonl, read_jsonl_as, write_jsonl, write_jsonl_string};
pub use record::{
    validate_dataset, validate_intrinsic, validate_record, Dataset, StandardRecord, TaskKind,
    Violation,
};
pub use tag::{LangTag, TagMapping, TagSet};
pub use tsv::parse_tsv_classification;

use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

/// NFC-normalize a string. Mixed-script input is rife with composed and
/// decomposed variants; every ingest path funnels through here.
pub fn nfc(text: &str) -> String {
    match is_nfc_quick(text.chars()) {
        IsNormalized::Yes => text.to_string(),
        _ => text.nfc().collect(),
    }
}

/// Split on Unicode whitespace runs. Joining the result with single spaces
/// reproduces the whitespace-collapsed input; no empty tokens.
pub fn tokenize_whitespace(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Rewrite open tags carrying `code` to `role` across every lid array.
/// Lets role-based metrics consume corpora tagged with raw language codes.
pub fn remap_open_tag(dataset: &mut Dataset, code: &str, role: LangTag) {
    let code = nfc(code.trim()).to_lowercase();
    for rec in &mut dataset.records {
        if let Some(tags) = &mut rec.lid {
            for tag in tags.iter_mut() {
                if matches!(tag, LangTag::Open(c) if *c == code) {
                    *tag = role.clone();
                }
            }
        }
    }
    dataset.refresh_tagset();
}
