use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use super::{validate_intrinsic, validate_record, Dataset, StandardRecord, TaskKind};
use crate::error::{Error, Result};

/// Serialize a dataset as JSONL: one compact JSON object per record,
/// `\n` line endings, absent optional fields omitted.
pub fn write_jsonl<W: Write>(dataset: &Dataset, mut writer: W) -> Result<()> {
    for rec in &dataset.records {
        let line = serde_json::to_string(rec)
            .map_err(|e| Error::data(format!("record `{}`: {e}", rec.uid)))?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// `write_jsonl` into an owned string.
pub fn write_jsonl_string(dataset: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    write_jsonl(dataset, &mut buf)?;
    // serde_json only emits valid UTF-8
    Ok(String::from_utf8(buf).expect("JSONL output is UTF-8"))
}

fn read_records<R: BufRead>(reader: R) -> Result<Vec<StandardRecord>> {
    let mut records = Vec::new();
    let mut seen_uids: BTreeSet<String> = BTreeSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let mut rec: StandardRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(line_no, format!("malformed JSON: {e}")))?;
        rec.normalize();
        if !seen_uids.insert(rec.uid.clone()) {
            return Err(Error::parse(
                line_no,
                format!("duplicate uid `{}`", rec.uid),
            ));
        }
        records.push(rec);
    }
    Ok(records)
}

fn first_violation_error(violations: &[super::Violation]) -> Result<()> {
    match violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::record(
            v.uid.clone(),
            format!("field `{}`: {}", v.field, v.reason),
        )),
    }
}

/// Infer the task kind of a record collection: all-labeled reads as
/// classification, all-targeted as generation, anything else as tagging.
/// JSONL has no dataset-level header to carry the kind explicitly.
pub fn infer_task_kind(records: &[StandardRecord]) -> TaskKind {
    if !records.is_empty() && records.iter().all(|r| r.label.is_some()) {
        TaskKind::Classification
    } else if !records.is_empty() && records.iter().all(|r| r.target_text.is_some()) {
        TaskKind::Generation
    } else {
        TaskKind::Tagging
    }
}

/// Read JSONL, enforcing the task-independent record invariants. The task
/// kind is inferred from the fields present (see [`infer_task_kind`]).
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Dataset> {
    let records = read_records(reader)?;
    let mut dataset = Dataset {
        task_kind: infer_task_kind(&records),
        records,
        tagset: super::TagSet::Closed,
    };
    dataset.refresh_tagset();
    for rec in &dataset.records {
        first_violation_error(&validate_intrinsic(rec, dataset.tagset))?;
    }
    Ok(dataset)
}

/// Read JSONL and enforce the schema for an explicit task kind.
pub fn read_jsonl_as<R: BufRead>(reader: R, task_kind: TaskKind) -> Result<Dataset> {
    let records = read_records(reader)?;
    let mut dataset = Dataset {
        records,
        tagset: super::TagSet::Closed,
        task_kind,
    };
    dataset.refresh_tagset();
    for rec in &dataset.records {
        first_violation_error(&validate_record(rec, task_kind, dataset.tagset))?;
    }
    Ok(dataset)
}
