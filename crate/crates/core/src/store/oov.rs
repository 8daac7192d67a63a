use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::hashing::StableHasher;
use crate::scalar::Scalar;

/// Gaussian out-of-vocabulary vectors keyed on `(seed, word)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OovPolicy {
    mean: f64,
    stddev: f64,
    seed: u64,
}

impl Default for OovPolicy {
    fn default() -> Self {
        OovPolicy {
            mean: 0.0,
            stddev: 0.6,
            seed: 0,
        }
    }
}

impl OovPolicy {
    /// Returns `None` unless `stddev` is positive and both moments are finite.
    pub fn new(mean: f64, stddev: f64, seed: u64) -> Option<Self> {
        (mean.is_finite() && stddev.is_finite() && stddev > 0.0).then_some(OovPolicy {
            mean,
            stddev,
            seed,
        })
    }

    pub fn with_seed(self, seed: u64) -> Self {
        OovPolicy { seed, ..self }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stddev(&self) -> f64 {
        self.stddev
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws `dim` i.i.d. normal values; a pure function of `(seed, word, dim)`.
    pub fn sample<T: Scalar>(&self, word: &str, dim: usize) -> Vec<T> {
        let mut h = StableHasher::new();
        h.write_u64(self.seed);
        h.write(word.as_bytes());
        let mut rng = ChaCha8Rng::seed_from_u64(h.finish_mixed());
        let normal = Normal::new(self.mean, self.stddev).expect("validated in constructor");
        (0..dim).map(|_| T::of(normal.sample(&mut rng))).collect()
    }
}
