//! Seeded randomness with explicit stream derivation.
//!
//! All stochastic steps in this crate (fold shuffles, bootstrap subsamples,
//! synthetic data) draw from ChaCha8 generators derived here, so a run is a
//! pure function of the seeds recorded in its configuration.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// splitmix64 finalizer; used to spread `(seed, stream)` pairs over the
/// ChaCha key space.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for logical stream `stream` of `seed`.
///
/// Streams keep concurrent work (folds, bootstrap iterations) reproducible
/// regardless of completion order: stream `i` always yields the same draws.
pub fn derive_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let a = mix(seed);
    let b = mix(seed ^ 0xD6E8_FEB8_6659_FD93);
    let c = mix(stream.wrapping_add(0x2545_F491_4F6C_DD1D));
    let d = mix(a ^ c);
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw from `0..bound` (widening-multiply method).
pub fn below<R: RngCore>(rng: &mut R, bound: usize) -> usize {
    debug_assert!(bound > 0);
    (((rng.next_u64() as u128) * (bound as u128)) >> 64) as usize
}

/// Uniform draw from `[0, 1)` with 53-bit resolution.
pub fn unit_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore>(rng: &mut R, xs: &mut [T]) {
    for i in (1..xs.len()).rev() {
        let j = below(rng, i + 1);
        xs.swap(i, j);
    }
}

/// `k` distinct indices from `0..n`, returned sorted ascending.
pub fn sample_without_replacement<R: RngCore>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_unstable();
    pool
}
