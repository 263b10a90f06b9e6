use std::collections::BTreeSet;
use std::io::BufRead;

use super::{nfc, Dataset, LangTag, StandardRecord, TagMapping, TaskKind};
use crate::error::{Error, Result};

/// Parse a CoNLL-style tagging stream: one `token<TAB>tag` pair per line,
/// blank line between sentences, optional `# uid = X` comment before a
/// sentence. Records get the zero-based sentence index as uid unless a
/// comment overrides it.
pub fn parse_conll<R: BufRead>(reader: R, mapping: &TagMapping) -> Result<Dataset> {
    let mut dataset = Dataset::new(TaskKind::Tagging);
    let mut seen_uids: BTreeSet<String> = BTreeSet::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<LangTag> = Vec::new();
    let mut pending_uid: Option<String> = None;
    let mut sentence_index: usize = 0;

    let flush = |tokens: &mut Vec<String>,
                 tags: &mut Vec<LangTag>,
                 pending_uid: &mut Option<String>,
                 sentence_index: &mut usize,
                 seen_uids: &mut BTreeSet<String>,
                 records: &mut Vec<StandardRecord>|
     -> Result<()> {
        if tokens.is_empty() {
            return Ok(());
        }
        let uid = pending_uid
            .take()
            .unwrap_or_else(|| sentence_index.to_string());
        if !seen_uids.insert(uid.clone()) {
            return Err(Error::record(uid, "duplicate uid"));
        }
        let mut rec = StandardRecord::new(uid, tokens.join(" "));
        rec.tokens = Some(std::mem::take(tokens));
        rec.lid = Some(std::mem::take(tags));
        records.push(rec);
        *sentence_index += 1;
        Ok(())
    };

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            flush(
                &mut tokens,
                &mut tags,
                &mut pending_uid,
                &mut sentence_index,
                &mut seen_uids,
                &mut dataset.records,
            )?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "uid" {
                    pending_uid = Some(nfc(value.trim()));
                }
            }
            continue;
        }
        let mut fields = line.split('\t');
        let (token, tag) = match (fields.next(), fields.next(), fields.next()) {
            (Some(token), Some(tag), None) => (token, tag),
            _ => {
                let found = line.split('\t').count();
                return Err(Error::parse(
                    line_no,
                    format!("expected 2 tab-separated fields, found {found}"),
                ));
            }
        };
        let token = nfc(token);
        if token.is_empty() {
            return Err(Error::parse(line_no, "empty token"));
        }
        let tag = mapping
            .resolve(tag)
            .ok_or_else(|| Error::parse(line_no, format!("tag `{}` outside tagset", tag.trim())))?;
        tokens.push(token);
        tags.push(tag);
    }
    flush(
        &mut tokens,
        &mut tags,
        &mut pending_uid,
        &mut sentence_index,
        &mut seen_uids,
        &mut dataset.records,
    )?;

    dataset.refresh_tagset();
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TagSet;

    fn hien_mapping() -> TagMapping {
        TagMapping::new()
            .with_language("hi", LangTag::Lang1)
            .with_language("en", LangTag::Lang2)
    }

    #[test]
    fn two_column_sentences_parse() {
        let input = "I\ten\nghar\thi\n\n";
        let ds = parse_conll(input.as_bytes(), &hien_mapping()).unwrap();
        assert_eq!(ds.len(), 1);
        let rec = &ds.records[0];
        assert_eq!(rec.uid, "0");
        assert_eq!(rec.text, "I ghar");
        assert_eq!(rec.tokens.as_deref().unwrap(), ["I", "ghar"]);
        assert_eq!(
            rec.lid.as_deref().unwrap(),
            [LangTag::Lang2, LangTag::Lang1]
        );
    }

    #[test]
    fn empty_stream_gives_empty_dataset() {
        let ds = parse_conll("".as_bytes(), &hien_mapping()).unwrap();
        assert_eq!(ds.len(), 0);
        assert_eq!(ds.task_kind, TaskKind::Tagging);
    }

    #[test]
    fn space_delimited_line_errors_with_line_number() {
        let err = parse_conll("I en\n".as_bytes(), &hien_mapping()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn uid_comment_overrides_sentence_index() {
        let input = "# uid = tweet-42\nI\ten\n\nghar\thi\n";
        let ds = parse_conll(input.as_bytes(), &hien_mapping()).unwrap();
        assert_eq!(ds.records[0].uid, "tweet-42");
        assert_eq!(ds.records[1].uid, "1");
    }

    #[test]
    fn unknown_tag_errors_unless_open_tagset() {
        let input = "vanakkam\tta\n";
        let err = parse_conll(input.as_bytes(), &hien_mapping()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        let open = hien_mapping().with_open_tagset(true);
        let ds = parse_conll(input.as_bytes(), &open).unwrap();
        assert_eq!(
            ds.records[0].lid.as_deref().unwrap(),
            [LangTag::Open("ta".into())]
        );
        assert_eq!(ds.tagset, TagSet::Open);
    }

    #[test]
    fn duplicate_uid_comment_errors() {
        let input = "# uid = x\na\thi\n\n# uid = x\nb\ten\n";
        let err = parse_conll(input.as_bytes(), &hien_mapping()).unwrap_err();
        assert!(matches!(err, Error::Record { .. }));
    }

    #[test]
    fn consecutive_blank_lines_produce_no_empty_sentences() {
        let input = "\n\na\thi\n\n\n\nb\ten\n\n";
        let ds = parse_conll(input.as_bytes(), &hien_mapping()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.records[0].uid, "0");
        assert_eq!(ds.records[1].uid, "1");
    }
}
