//! Counter-based splittable seeding.
//!
//! A stream is keyed by a 64-bit value. `RngStream::new(master, task)` keys
//! the stream with `mix(master, task)`, and `derive(task)` keys a child with
//! `mix(self.key, task)`. Children depend only on the parent key, never on
//! how many draws the parent has made, so any schedule of parallel work
//! reproduces the same draws.
//!
//! `mix(key, task) = splitmix64(splitmix64(key) ^ splitmix64(task ^ TASK_SALT))`.
//! The generator behind each key is xoshiro256++ seeded through SplitMix64.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const TASK_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// SplitMix64 finalizer applied to `z + GOLDEN`.
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a stream key with a task identifier. Not symmetric in its arguments.
pub fn mix(key: u64, task: u64) -> u64 {
    splitmix64(splitmix64(key) ^ splitmix64(task ^ TASK_SALT))
}

/// Order-sensitive 64-bit digest of a configuration.
pub fn fingerprint(x: &[i8]) -> u64 {
    let mut h = splitmix64(x.len() as u64);
    for &v in x {
        h = splitmix64(h ^ u64::from(v as u8));
    }
    h
}

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(master: u64, task: u64) -> Self {
        Self::from_key(mix(master, task))
    }

    pub fn from_key(key: u64) -> Self {
        Self { key, inner: Xoshiro256PlusPlus::seed_from_u64(key) }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream for `task`.
    pub fn derive(&self, task: u64) -> Self {
        Self::from_key(mix(self.key, task))
    }

    /// Uniform index in `0..n`. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        // Lemire multiply-shift; bias is below 2^-32 for the sizes used here.
        ((self.inner.next_u64() >> 32).wrapping_mul(n as u64) >> 32) as usize
    }

    /// `below(n)` and a fair coin from one draw: the index uses the high
    /// 32 bits and the coin the lowest bit.
    #[inline]
    pub fn below_and_coin(&mut self, n: usize) -> (usize, bool) {
        let v = self.inner.next_u64();
        (((v >> 32).wrapping_mul(n as u64) >> 32) as usize, v & 1 == 1)
    }

    /// 64 uniform bits.
    #[inline]
    pub fn next_raw(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.inner.next_u64() >> 63 == 1
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}
