//! Seed derivation. All randomness in an experiment flows from one master
//! seed through labeled, counter-indexed children, so adding runs or
//! reordering work never perturbs the streams of existing runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives independent child seeds from a master seed.
#[derive(Debug, Clone, Copy)]
pub struct SeedSplitter {
    master: u64,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in label.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl SeedSplitter {
    pub fn new(master: u64) -> Self {
        SeedSplitter { master }
    }

    /// 32-byte child seed for (label, index).
    pub fn seed(&self, label: &str, index: u64) -> [u8; 32] {
        let mut state = splitmix(self.master ^ fnv1a(label));
        state = splitmix(state ^ index.wrapping_mul(0x9e3779b97f4a7c15));
        let mut out = [0u8; 32];
        for chunk in out.chunks_mut(8) {
            state = splitmix(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        out
    }

    /// Seeded RNG for (label, index).
    pub fn rng(&self, label: &str, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.seed(label, index))
    }

    /// Child splitter, for nesting (e.g. one subtree per run).
    pub fn child(&self, label: &str, index: u64) -> SeedSplitter {
        let bytes = self.seed(label, index);
        SeedSplitter { master: u64::from_le_bytes(bytes[..8].try_into().unwrap()) }
    }
}
