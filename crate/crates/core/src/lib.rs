pub mod characters;
pub mod error;
pub mod langlands;
pub mod metaplectic;
pub mod padic;
pub mod scalars;
pub mod shimura;
pub mod suites;
pub mod tate;
pub mod weilrep;

pub use error::{Error, Result};

/// Deterministic generator used for every sampled check.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
