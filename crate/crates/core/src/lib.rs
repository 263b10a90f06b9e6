//! Processing toolkit for code-mixed text corpora.
//!
//! Provides a standardized dataset format with converters ([`corpus`]),
//! token-level language identification ([`lid`]), per-utterance and
//! per-corpus code-mixing metrics ([`quantify`]), data augmentation
//! ([`augment`]) and metric-based sampling ([`sample`]).

pub mod augment;
pub mod corpus;
pub mod error;
pub mod lid;
pub mod quantify;
pub mod sample;

mod rng;

pub use error::{Error, Result};

/// Size the global worker pool used for per-record parallelism. 0 keeps
/// the default (one worker per core). Call at most once, before any
/// parallel work runs; outputs never depend on the pool size.
pub fn build_thread_pool(threads: usize) -> Result<()> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::usage(format!("cannot configure {threads} worker threads: {e}")))
}
