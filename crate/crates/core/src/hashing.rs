//! Stable 64-bit hashing used for seed derivation, OOV synthesis and input
//! digests. Results never depend on the platform or the Rust version.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Incremental FNV-1a hasher.
#[derive(Debug, Clone, Copy)]
pub struct StableHasher(u64);

impl Default for StableHasher {
    fn default() -> Self {
        StableHasher(FNV_OFFSET)
    }
}

impl StableHasher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
    }

    pub fn write_u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }

    /// Raw FNV-1a value, suitable as a content digest.
    pub fn digest(&self) -> u64 {
        self.0
    }

    /// FNV-1a value passed through a splitmix64 finalizer, suitable as an RNG seed.
    pub fn finish_mixed(&self) -> u64 {
        splitmix64(self.0)
    }
}

/// splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a component seed from a base seed and a label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h = StableHasher::new();
    h.write_u64(seed);
    h.write(label.as_bytes());
    h.finish_mixed()
}

/// Derives a seed keyed on a base seed and an integer (e.g. a hidden size).
pub fn derive_seed_indexed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = StableHasher::new();
    h.write_u64(seed);
    h.write(label.as_bytes());
    h.write_u64(index);
    h.finish_mixed()
}

/// 64-bit content digest of a byte slice.
pub fn content_digest(bytes: &[u8]) -> u64 {
    let mut h = StableHasher::new();
    h.write(bytes);
    h.digest()
}
