//! Seed fan-out.
//!
//! Every random draw in the pipeline comes from a ChaCha8 stream whose seed
//! is derived from the master seed and a path of counters, for example
//! `[k_index, level, restart, evaluation, word]`. Derivation folds each
//! counter into the running seed with SplitMix64:
//!
//! ```text
//! s_0     = master
//! s_{j+1} = splitmix64(s_j ^ splitmix64(tag_j + 0x9E37_79B9_7F4A_7C15 * (j + 1)))
//! ```
//!
//! so any sub-computation can be replayed alone from its path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Domain tags that keep unrelated streams apart.
pub mod tag {
    pub const RESTART: u64 = 0x5245_5354;
    pub const EVALUATION: u64 = 0x4556_414c;
    pub const EXPECTATION: u64 = 0x4558_5054;
    pub const RATES: u64 = 0x5241_5445;
    pub const GRID: u64 = 0x4752_4944;
    pub const LEVEL: u64 = 0x4c45_564c;
    pub const KPOINT: u64 = 0x4b50_4e54;
    pub const FINAL: u64 = 0x4649_4e4c;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().enumerate().fold(master, |s, (j, &t)| {
        let salt = GOLDEN.wrapping_mul(j as u64 + 1);
        splitmix64(s ^ splitmix64(t.wrapping_add(salt)))
    })
}

pub fn rng_from(master: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(master, path))
}
