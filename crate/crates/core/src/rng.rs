//! Deterministic per-task random streams.
//!
//! Every trajectory, shot or sample `index` draws from its own ChaCha stream
//! keyed by `(master_seed, index)`, so results never depend on how work is
//! split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
