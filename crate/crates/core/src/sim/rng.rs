use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream backed by ChaCha8.
///
/// ChaCha8 output is specified bit-for-bit independent of platform and
/// endianness, so the same seed yields the same draws everywhere.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Per-node stream: seed = mix64(run_seed ^ mix64(node_id + 1)).
    ///
    /// Depends only on (run seed, node id), never on how many nodes exist.
    pub fn for_node(run_seed: u64, node_id: u32) -> Self {
        Self::new(mix64(run_seed ^ mix64(u64::from(node_id) + 1)))
    }

    /// Stream for an unordered node pair (shadowing draws are per link).
    pub fn for_link(run_seed: u64, a: u32, b: u32) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let key = (u64::from(lo) << 32) | u64::from(hi);
        Self::new(mix64(run_seed ^ mix64(key ^ 0xA5A5_5A5A_0000_0000)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform integer in `0..=max`.
    pub fn uniform_inclusive(&mut self, max: u64) -> u64 {
        self.rng.random_range(0..=max)
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
