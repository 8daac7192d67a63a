pub mod hashing;
pub mod scalar;
pub mod store;
pub mod analogy;
pub mod dump;
pub mod extract;
pub mod probe;
pub mod synthetic;

pub use scalar::Scalar;
pub use store::{EmbeddingMatrix, OovPolicy, StoreError, Vocabulary};

/// Single-precision matrix, the on-disk and analogy working type.
pub type Embeddings = EmbeddingMatrix<f32>;
/// Double-precision matrix used by the tagging probe.
pub type ProbeEmbeddings = EmbeddingMatrix<f64>;
/// Probe model in the precision the probe trains in.
pub type Probe = probe::ProbeModel<f64>;
