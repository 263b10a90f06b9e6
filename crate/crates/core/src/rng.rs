//! Small deterministic RNG primitives.
//!
//! Seeded outputs are part of this toolkit's file contracts, so the
//! generators are pinned here rather than borrowed from a crate whose
//! algorithms may change between releases. SplitMix64 constants are from
//! Steele, Lea & Flood (2014).

/// SplitMix64 finalizer: one well-mixed u64 from one u64.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// A uniform draw in [0, 1) keyed by (seed, uid, op index, element index).
/// Keyed draws make per-record work order- and thread-independent.
pub(crate) fn keyed_unit(seed: u64, uid: &str, op_index: u64, element_index: u64) -> f64 {
    let h = mix(seed ^ mix(fnv1a64(uid.as_bytes()) ^ mix(op_index ^ mix(element_index))));
    to_unit(h)
}

fn to_unit(x: u64) -> f64 {
    // top 53 bits -> [0, 1)
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 stream.
pub(crate) struct SeededRng {
    state: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { state: seed }
    }

    /// Stream keyed by a seed plus a stream index (e.g. a bin number).
    pub fn keyed(seed: u64, stream: u64) -> Self {
        SeededRng {
            state: mix(seed ^ mix(stream)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut x = self.state;
        x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
        x ^ (x >> 31)
    }

    fn next_below(&mut self, n: u64) -> u64 {
        // modulo bias is irrelevant at these sizes
        self.next_u64() % n
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
