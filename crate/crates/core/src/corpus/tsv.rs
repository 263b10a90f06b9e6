use std::collections::BTreeSet;
use std::io::BufRead;

use super::{nfc, Dataset, StandardRecord, TaskKind};
use crate::error::{Error, Result};

const HEADER: &str = "uid\ttext\tlabel";

/// Parse a classification TSV: mandatory `uid<TAB>text<TAB>label` header,
/// one record per data row. All fields are NFC-normalized.
pub fn parse_tsv_classification<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut dataset = Dataset::new(TaskKind::Classification);
    let mut seen_uids: BTreeSet<String> = BTreeSet::new();
    let mut lines = reader.lines().enumerate();

    match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line != HEADER {
                return Err(Error::usage(format!(
                    "missing header line `uid<TAB>text<TAB>label`, found `{line}`"
                )));
            }
        }
        None => {
            return Err(Error::usage(
                "missing header line `uid<TAB>text<TAB>label` (empty input)",
            ))
        }
    }

    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let uid = nfc(fields[0]);
        if uid.is_empty() {
            return Err(Error::parse(line_no, "empty uid"));
        }
        if !seen_uids.insert(uid.clone()) {
            return Err(Error::parse(line_no, format!("duplicate uid `{uid}`")));
        }
        let text = nfc(fields[1]);
        if text.is_empty() {
            return Err(Error::parse(line_no, "empty text"));
        }
        let mut rec = StandardRecord::new(uid, text);
        rec.label = Some(nfc(fields[2]));
        dataset.records.push(rec);
    }

    Ok(dataset)
}
