//! Counter-based random stream.
//!
//! Draw `index` of domain `d` under seed `s` is a pure function of
//! `(s, d, index)`: ChaCha8 keyed by the seed, stream number `d`, and word
//! position `2·index`. Any evaluation order or chunking yields identical
//! values.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Qdrift = 1,
    Shots = 2,
    StageOne = 3,
    Pilot = 4,
    Test = 99,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derived stream for a sub-experiment; `seed` and `tag` both feed the key.
    pub fn derive(&self, tag: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(0xD3_21_7E_00 ^ tag);
        Self { seed: rng.next_u64() }
    }

    /// Positioned generator: subsequent `next_u64` calls yield draws
    /// `start, start + 1, …` of this domain.
    pub fn cursor(&self, domain: Domain, start: u64) -> Cursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(domain as u64);
        rng.set_word_pos(u128::from(start) * 2);
        Cursor { rng }
    }

    /// Uniform in [0, 1) for draw `index`.
    pub fn uniform(&self, domain: Domain, index: u64) -> f64 {
        self.cursor(domain, index).uniform()
    }
}

pub struct Cursor {
    rng: ChaCha8Rng,
}

impl Cursor {
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform integer in `0..n` from one draw.
    pub fn index_below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}
