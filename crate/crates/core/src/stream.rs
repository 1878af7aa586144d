//! Deterministic random streams.
//!
//! Every Monte Carlo replication owns a ChaCha8 generator seeded from
//! `(master seed, cell, replication)` alone, so results do not depend on how
//! replications are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used for all sampling.
pub type Stream = ChaCha8Rng;

/// A stream from a plain seed.
pub fn stream(seed: u64) -> Stream {
    child_rng(seed, 0, 0)
}

/// The stream of replication `rep` in cell `cell` (a budget or a sample size).
pub fn child_rng(master: u64, cell: u64, rep: u64) -> Stream {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&cell.to_le_bytes());
    seed[16..24].copy_from_slice(&rep.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}
