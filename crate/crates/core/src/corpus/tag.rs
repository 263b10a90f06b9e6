use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::nfc;

/// Token-level language tag.
///
/// The closed set follows the common two-language LID convention: `lang1`
/// and `lang2` are the mixing-language roles, while `ne` (named entity),
/// `univ` (universal: punctuation, symbols, numerals), `other` and `mixed`
/// carry no language identity. `Open` carries tags from corpora with
/// richer tagsets when open-tagset ingest is enabled.
///
/// The derived ordering (`lang1 < lang2 < ne < univ < other < mixed` with
/// open tags last) is the tie-break order used by the LID tagger.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LangTag {
    Lang1,
    Lang2,
    Ne,
    Univ,
    Other,
    Mixed,
    Open(String),
}

impl LangTag {
    /// Canonical lowercase name.
    pub fn as_str(&self) -> &str {
        match self {
            LangTag::Lang1 => "lang1",
            LangTag::Lang2 => "lang2",
            LangTag::Ne => "ne",
            LangTag::Univ => "univ",
            LangTag::Other => "other",
            LangTag::Mixed => "mixed",
            LangTag::Open(s) => s,
        }
    }

    /// True for tags that carry a language identity. `ne`, `univ`, `other`
    /// and `mixed` are language-independent; open tags are treated as
    /// language codes.
    pub fn is_language_token(&self) -> bool {
        matches!(self, LangTag::Lang1 | LangTag::Lang2 | LangTag::Open(_))
    }

    /// Normalize an external tag spelling onto the tagset. Case-insensitive;
    /// folds the synonyms public LID datasets disagree on
    /// (`other-univ`/`unk-univ` onto `univ`, `name` onto `ne`). Unknown
    /// spellings become `Open` tags.
    pub fn normalize(raw: &str) -> LangTag {
        let folded = nfc(raw.trim()).to_lowercase();
        match folded.as_str() {
            "lang1" => LangTag::Lang1,
            "lang2" => LangTag::Lang2,
            "ne" | "name" => LangTag::Ne,
            "univ" | "other-univ" | "unk-univ" => LangTag::Univ,
            "other" => LangTag::Other,
            "mixed" => LangTag::Mixed,
            _ => LangTag::Open(folded),
        }
    }

    fn is_closed(&self) -> bool {
        !matches!(self, LangTag::Open(_))
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for LangTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LangTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TagVisitor;

        impl Visitor<'_> for TagVisitor {
            type Value = LangTag;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a language tag string")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<LangTag, E> {
                if v.trim().is_empty() {
                    return Err(E::custom("empty language tag"));
                }
                Ok(LangTag::normalize(v))
            }
        }

        deserializer.deserialize_str(TagVisitor)
    }
}

/// Whether a dataset is confined to the closed six-tag vocabulary or
/// carries open tags from ingest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagSet {
    #[default]
    Closed,
    Open,
}

/// Maps external tag spellings (language codes like `hi`/`en`, plus the
/// closed-set names and their synonyms) onto the internal role-based tags.
///
/// The metrics are role-based, not language-name-based, so CoNLL ingest
/// requires the caller to say which code plays which role.
#[derive(Debug, Clone)]
pub struct TagMapping {
    by_name: BTreeMap<String, LangTag>,
    open_tagset: bool,
}

impl Default for TagMapping {
    fn default() -> Self {
        Self::new()
    }
}

impl TagMapping {
    /// Mapping seeded with the canonical names and their known synonyms.
    pub fn new() -> Self {
        TagMapping {
            by_name: BTreeMap::new(),
            open_tagset: false,
        }
    }

    /// Map an external language code (e.g. `hi`) onto a role tag.
    pub fn with_language(mut self, code: &str, role: LangTag) -> Self {
        self.by_name.insert(nfc(code.trim()).to_lowercase(), role);
        self
    }

    /// Pass unknown tags through as `Open` instead of erroring.
    pub fn with_open_tagset(mut self, open: bool) -> Self {
        self.open_tagset = open;
        self
    }

    pub fn open_tagset(&self) -> bool {
        self.open_tagset
    }

    /// Resolve a raw tag spelling. `None` means the tag is outside the
    /// vocabulary and open-tagset mode is off.
    pub fn resolve(&self, raw: &str) -> Option<LangTag> {
        let folded = nfc(raw.trim()).to_lowercase();
        if let Some(tag) = self.by_name.get(&folded) {
            return Some(tag.clone());
        }
        let tag = LangTag::normalize(raw);
        if tag.is_closed() || self.open_tagset {
            Some(tag)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_tags_round_trip_canonical_names() {
        for tag in [
            LangTag::Lang1,
            LangTag::Lang2,
            LangTag::Ne,
            LangTag::Univ,
            LangTag::Other,
            LangTag::Mixed,
        ] {
            assert_eq!(LangTag::normalize(tag.as_str()), tag);
        }
    }

    #[test]
    fn language_token_is_lang1_lang2_only_in_closed_set() {
        assert!(LangTag::Lang1.is_language_token());
        assert!(LangTag::Lang2.is_language_token());
        assert!(!LangTag::Ne.is_language_token());
        assert!(!LangTag::Univ.is_language_token());
        assert!(!LangTag::Other.is_language_token());
        assert!(!LangTag::Mixed.is_language_token());
    }

    #[test]
    fn synonyms_fold_onto_closed_set() {
        assert_eq!(LangTag::normalize("NAME"), LangTag::Ne);
        assert_eq!(LangTag::normalize("other-univ"), LangTag::Univ);
        assert_eq!(LangTag::normalize("Unk-Univ"), LangTag::Univ);
        assert_eq!(LangTag::normalize("UNIV"), LangTag::Univ);
    }

    #[test]
    fn mapping_resolves_codes_and_rejects_unknown() {
        let mapping = TagMapping::new()
            .with_language("hi", LangTag::Lang1)
            .with_language("en", LangTag::Lang2);
        assert_eq!(mapping.resolve("hi"), Some(LangTag::Lang1));
        assert_eq!(mapping.resolve("EN"), Some(LangTag::Lang2));
        assert_eq!(mapping.resolve("ne"), Some(LangTag::Ne));
        assert_eq!(mapping.resolve("ta"), None);

        let open = mapping.with_open_tagset(true);
        assert_eq!(open.resolve("ta"), Some(LangTag::Open("ta".into())));
    }

    #[test]
    fn tag_order_breaks_ties_lang1_first() {
        assert!(LangTag::Lang1 < LangTag::Lang2);
        assert!(LangTag::Lang2 < LangTag::Ne);
        assert!(LangTag::Ne < LangTag::Univ);
        assert!(LangTag::Univ < LangTag::Other);
        assert!(LangTag::Other < LangTag::Mixed);
        assert!(LangTag::Mixed < LangTag::Open("aa".into()));
    }
}
