//! Data augmentation: seeded spelling noise, table-driven transliteration,
//! multi-view generation and dataset merging.
//!
//! Every randomized operation draws from streams keyed by (seed, record
//! uid), so outputs are independent of record order and thread count.

mod noise;
mod translit;

pub use noise::{noise_text, NoiseKind, NoiseOp, NoisePolicy};
pub use translit::TransliterationTable;

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{validate_dataset, Dataset, StandardRecord, TagSet, TaskKind};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// How a view's text is produced from the record text.
pub enum ViewTransform<'a> {
    Identity,
    Transliterate(&'a TransliterationTable),
    Noise(&'a NoisePolicy),
}

pub struct ViewSpec<'a> {
    pub name: String,
    pub transform: ViewTransform<'a>,
}

/// Attach named views to a record. The original text is untouched;
/// existing views are only replaced under `overwrite`.
pub fn make_views(
    record: &mut StandardRecord,
    specs: &[ViewSpec<'_>],
    overwrite: bool,
) -> Result<()> {
    let mut names: BTreeSet<&str> = BTreeSet::new();
    for spec in specs {
        if !names.insert(spec.name.as_str()) {
            return Err(Error::usage(format!(
                "view `{}` requested more than once",
                spec.name
            )));
        }
        if !overwrite {
            if let Some(views) = &record.views {
                if views.contains_key(&spec.name) {
                    return Err(Error::usage(format!(
                        "record `{}` already has a view `{}`; pass the overwrite flag to replace it",
                        record.uid, spec.name
                    )));
                }
            }
        }
    }
    for spec in specs {
        let text = match &spec.transform {
            ViewTransform::Identity => record.text.clone(),
            ViewTransform::Transliterate(table) => table.apply(&record.text),
            ViewTransform::Noise(policy) => {
                policy.validate()?;
                noise_text(&record.text, policy, &record.uid)
            }
        };
        record
            .views
            .get_or_insert_with(BTreeMap::new)
            .insert(spec.name.clone(), text);
    }
    Ok(())
}

/// Attach the same views to every record of a dataset.
pub fn make_views_dataset(
    dataset: &mut Dataset,
    specs: &[ViewSpec<'_>],
    overwrite: bool,
) -> Result<()> {
    for rec in &mut dataset.records {
        make_views(rec, specs, overwrite)?;
    }
    Ok(())
}

/// Append `floor(ratio * |main|)` monolingual records to a classification
/// dataset, sampled without replacement by seeded shuffle. Labels are
/// rewritten through `label_map`; appended uids gain a `mono-` prefix.
pub fn merge_monolingual(
    main: &Dataset,
    mono: &Dataset,
    label_map: &BTreeMap<String, String>,
    ratio: f64,
    seed: u64,
) -> Result<Dataset> {
    if main.task_kind != TaskKind::Classification || mono.task_kind != TaskKind::Classification {
        return Err(Error::usage(
            "merge-monolingual requires two classification datasets",
        ));
    }
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(Error::usage("ratio must be a finite value >= 0"));
    }
    for rec in &mono.records {
        let label = rec.label.as_deref().ok_or_else(|| {
            Error::record(rec.uid.clone(), "classification record without a label")
        })?;
        if !label_map.contains_key(label) {
            return Err(Error::record(
                rec.uid.clone(),
                format!("label `{label}` is not covered by the label map"),
            ));
        }
    }

    let want = (ratio * main.records.len() as f64).floor() as usize;
    let take = want.min(mono.records.len());
    let mut indices: Vec<usize> = (0..mono.records.len()).collect();
    SeededRng::new(seed).shuffle(&mut indices);
    indices.truncate(take);
    indices.sort_unstable();

    let mut out = Dataset {
        records: main.records.clone(),
        tagset: if main.tagset == TagSet::Open || mono.tagset == TagSet::Open {
            TagSet::Open
        } else {
            TagSet::Closed
        },
        task_kind: TaskKind::Classification,
    };
    for i in indices {
        let mut rec = mono.records[i].clone();
        let label = rec.label.as_deref().expect("checked above");
        rec.label = Some(label_map[label].clone());
        rec.uid = format!("mono-{}", rec.uid);
        out.records.push(rec);
    }

    if let Some(v) = validate_dataset(&out).into_iter().next() {
        return Err(Error::record(
            v.uid,
            format!("field `{}`: {}", v.field, v.reason),
        ));
    }
    Ok(out)
}

/// Concatenate datasets of one task kind. Every uid is prefixed with its
/// source index so merged corpora cannot collide.
pub fn collate_datasets(inputs: &[Dataset]) -> Result<Dataset> {
    let Some(first) = inputs.first() else {
        return Err(Error::usage("collate needs at least one input dataset"));
    };
    if inputs.iter().any(|ds| ds.task_kind != first.task_kind) {
        return Err(Error::usage("collate inputs must share one task kind"));
    }
    let mut out = Dataset::new(first.task_kind);
    for (index, ds) in inputs.iter().enumerate() {
        for rec in &ds.records {
            let mut rec = rec.clone();
            rec.uid = format!("{index}-{}", rec.uid);
            out.records.push(rec);
        }
    }
    out.refresh_tagset();
    Ok(out)
}
