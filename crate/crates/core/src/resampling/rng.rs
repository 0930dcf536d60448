//! Counter-based random streams keyed by a [`SeedSpec`].
//!
//! Every stream is a ChaCha8 keystream whose 256-bit key is the injective
//! packing of `(master_seed, repetition_index, resample_index, source_index,
//! domain)`. Any stream can be produced directly, without stepping through
//! others, so parallel workers reproduce sequential results bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Address of one random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub repetition_index: u64,
    pub resample_index: u64,
    pub source_index: u64,
}

/// Separates stream families that share a `SeedSpec` (data generation,
/// resampling, simulation noise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum StreamDomain {
    Resample = 0,
    DataGeneration = 1,
    Simulation = 2,
    Auxiliary = 3,
}

const SOURCE_BITS: u32 = 48;

impl SeedSpec {
    pub const fn new(
        master_seed: u64,
        repetition_index: u64,
        resample_index: u64,
        source_index: u64,
    ) -> Self {
        Self {
            master_seed,
            repetition_index,
            resample_index,
            source_index,
        }
    }

    pub const fn with_source(self, source_index: u64) -> Self {
        Self {
            source_index,
            ..self
        }
    }

    pub const fn with_resample(self, resample_index: u64) -> Self {
        Self {
            resample_index,
            ..self
        }
    }

    pub const fn with_repetition(self, repetition_index: u64) -> Self {
        Self {
            repetition_index,
            ..self
        }
    }

    /// Generator for the resampling stream addressed by this spec.
    pub fn rng(&self) -> StreamRng {
        self.stream(StreamDomain::Resample)
    }

    /// Generator for this spec within `domain`.
    pub fn stream(&self, domain: StreamDomain) -> StreamRng {
        assert!(
            self.source_index < (1 << SOURCE_BITS),
            "source_index must fit in {SOURCE_BITS} bits"
        );
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.repetition_index.to_le_bytes());
        key[16..24].copy_from_slice(&self.resample_index.to_le_bytes());
        let tail = self.source_index | ((domain as u64) << SOURCE_BITS);
        key[24..32].copy_from_slice(&tail.to_le_bytes());
        StreamRng {
            inner: ChaCha8Rng::from_seed(key),
        }
    }
}

/// A deterministic generator bound to one stream address.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    /// Uniform integer in `[0, n)` by multiply-shift with rejection (Lemire),
    /// exactly unbiased.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "range must be nonempty");
        let mut m = (self.inner.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.inner.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// `n` i.i.d. uniform indices in `[0, n)` from the resampling stream of `seed`.
pub fn draw_indices(n: usize, seed: SeedSpec) -> Vec<usize> {
    assert!(n >= 1, "draw_indices needs n >= 1");
    let mut rng = seed.rng();
    (0..n).map(|_| rng.below(n as u64) as usize).collect()
}
