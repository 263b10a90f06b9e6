use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::keyed_unit;

/// Spelling-variation operators over Latin vowels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    DropVowels,
    ReplaceVowels,
}

impl NoiseKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoiseKind::DropVowels => "drop_vowels",
            NoiseKind::ReplaceVowels => "replace_vowels",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop_vowels" => Ok(NoiseKind::DropVowels),
            "replace_vowels" => Ok(NoiseKind::ReplaceVowels),
            other => Err(Error::usage(format!(
                "unknown noise op `{other}` (expected drop_vowels or replace_vowels)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseOp {
    pub kind: NoiseKind,
    pub probability: f64,
}

impl NoiseOp {
    pub fn new(kind: NoiseKind, probability: f64) -> Self {
        NoiseOp { kind, probability }
    }
}

/// An ordered pipeline of noise operators plus the seed that keys every
/// per-character decision.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePolicy {
    pub ops: Vec<NoiseOp>,
    pub seed: u64,
}

impl NoisePolicy {
    pub fn new(ops: Vec<NoiseOp>, seed: u64) -> Result<Self> {
        let policy = NoisePolicy { ops, seed };
        policy.validate()?;
        Ok(policy)
    }

    /// Parse the CLI form `op:prob,op:prob`, e.g.
    /// `drop_vowels:0.1,replace_vowels:0.05`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self> {
        let mut ops = Vec::new();
        for part in spec.split(',') {
            let part = part.trim();
            let (kind, prob) = part.split_once(':').ok_or_else(|| {
                Error::usage(format!("bad noise op `{part}` (expected `op:probability`)"))
            })?;
            let kind = NoiseKind::from_str(kind.trim())?;
            let probability: f64 = prob.trim().parse().map_err(|_| {
                Error::usage(format!(
                    "bad probability `{}` in noise op `{part}`",
                    prob.trim()
                ))
            })?;
            ops.push(NoiseOp { kind, probability });
        }
        NoisePolicy::new(ops, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ops.is_empty() {
            return Err(Error::usage("noise policy needs at least one op"));
        }
        for op in &self.ops {
            if !(0.0..=1.0).contains(&op.probability) {
                return Err(Error::usage(format!(
                    "noise probability {} outside [0, 1]",
                    op.probability
                )));
            }
        }
        Ok(())
    }
}

fn vowel_index(ch: char) -> Option<usize> {
    match ch.to_ascii_lowercase() {
        'a' => Some(0),
        'e' => Some(1),
        'i' => Some(2),
        'o' => Some(3),
        'u' => Some(4),
        _ => None,
    }
}

/// a -> e -> i -> o -> u -> a, preserving case.
fn cyclic_replace(ch: char, index: usize) -> char {
    const LOWER: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
    let next = LOWER[(index + 1) % 5];
    if ch.is_ascii_uppercase() {
        next.to_ascii_uppercase()
    } else {
        next
    }
}

/// Apply the policy's ops in order. Per-character apply/skip decisions are
/// keyed by (seed, uid, op index, character index), so results do not
/// depend on record order or parallelism. Only ASCII vowels are touched;
/// everything else passes through unchanged.
pub fn noise_text(text: &str, policy: &NoisePolicy, record_uid: &str) -> String {
    let mut current: Vec<char> = text.chars().collect();
    for (op_index, op) in policy.ops.iter().enumerate() {
        let mut next = Vec::with_capacity(current.len());
        for (char_index, &ch) in current.iter().enumerate() {
            let Some(vowel) = vowel_index(ch) else {
                next.push(ch);
                continue;
            };
            let draw = keyed_unit(policy.seed, record_uid, op_index as u64, char_index as u64);
            if draw < op.probability {
                match op.kind {
                    NoiseKind::DropVowels => {}
                    NoiseKind::ReplaceVowels => next.push(cyclic_replace(ch, vowel)),
                }
            } else {
                next.push(ch);
            }
        }
        current = next;
    }
    current.into_iter().collect()
}
