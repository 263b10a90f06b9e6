use std::collections::BTreeMap;
use std::io::BufRead;

use crate::corpus::nfc;
use crate::error::{Error, Result};

/// Embedded starter table for Devanagari -> Latin romanization. A pure
/// mapping, so schwa deletion and other phonological niceties are out of
/// scope; table authors can ship their own TSV for higher fidelity.
const DEVANAGARI_LATIN_TSV: &str = include_str!("../../data/devanagari_latin.tsv");

/// An ordered source -> target mapping applied greedily, longest source
/// first (ties broken by entry order).
#[derive(Debug, Clone, PartialEq)]
pub struct TransliterationTable {
    name: String,
    entries: Vec<(String, String)>,
    /// entry indices grouped by first source char, longest source first
    by_first_char: BTreeMap<char, Vec<usize>>,
}

impl TransliterationTable {
    pub fn new(name: impl Into<String>, entries: Vec<(String, String)>) -> Result<Self> {
        let name = name.into();
        let entries: Vec<(String, String)> = entries
            .into_iter()
            .map(|(s, t)| (nfc(&s), nfc(&t)))
            .collect();
        let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
        for (source, _) in &entries {
            if source.is_empty() {
                return Err(Error::data(format!("table `{name}`: empty source string")));
            }
            if seen.insert(source, ()).is_some() {
                return Err(Error::data(format!(
                    "table `{name}`: duplicate source `{source}`"
                )));
            }
        }
        let mut by_first_char: BTreeMap<char, Vec<usize>> = BTreeMap::new();
        for (i, (source, _)) in entries.iter().enumerate() {
            let first = source.chars().next().expect("source is non-empty");
            by_first_char.entry(first).or_default().push(i);
        }
        for group in by_first_char.values_mut() {
            // stable by entry order within equal lengths
            group.sort_by_key(|&i| std::cmp::Reverse(entries[i].0.chars().count()));
        }
        Ok(TransliterationTable {
            name,
            entries,
            by_first_char,
        })
    }

    /// Parse a `source<TAB>target` TSV; `#` comment lines and blank lines
    /// are ignored. Targets may be empty (deletion mappings).
    pub fn from_tsv<R: BufRead>(name: impl Into<String>, reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (source, target) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(line_no, "expected `source<TAB>target`"))?;
            if target.contains('\t') {
                return Err(Error::parse(
                    line_no,
                    "expected exactly 2 tab-separated fields",
                ));
            }
            entries.push((source.to_string(), target.to_string()));
        }
        TransliterationTable::new(name, entries)
    }

    /// The shipped Devanagari -> Latin starter table.
    pub fn builtin_devanagari() -> Self {
        TransliterationTable::from_tsv("devanagari_latin", DEVANAGARI_LATIN_TSV.as_bytes())
            .expect("embedded table is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// True when no target contains any source as a substring, which
    /// makes `apply` idempotent.
    pub fn is_idempotent(&self) -> bool {
        self.entries.iter().all(|(_, target)| {
            self.entries
                .iter()
                .all(|(source, _)| !target.contains(source.as_str()))
        })
    }

    /// Single left-to-right pass: at each position the longest matching
    /// source wins and its target is emitted; unmatched characters are
    /// copied verbatim. The output is NFC-normalized.
    pub fn apply(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut rest = text;
        while let Some(ch) = rest.chars().next() {
            let matched = self
                .by_first_char
                .get(&ch)
                .and_then(|group| {
                    group
                        .iter()
                        .find(|&&i| rest.starts_with(self.entries[i].0.as_str()))
                })
                .copied();
            match matched {
                Some(i) => {
                    let (source, target) = &self.entries[i];
                    out.push_str(target);
                    rest = &rest[source.len()..];
                }
                None => {
                    out.push(ch);
                    rest = &rest[ch.len_utf8()..];
                }
            }
        }
        nfc(&out)
    }
}
