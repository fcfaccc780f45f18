//! Per-replication random streams.
//!
//! ChaCha is a counter-mode generator: the 256-bit key and 64-bit stream id
//! select an independent keystream. The key packs the master seed, an
//! experiment domain tag and one index verbatim, and the stream id carries the
//! second index, so distinct `(domain, major, minor)` triples never share a
//! stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Which experiment a stream belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamDomain {
    Table = 1,
    Aggregation = 2,
    StdDecline = 3,
    Simulate = 4,
}

pub fn stream_rng(master_seed: u64, domain: StreamDomain, major: u64, minor: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    key[16..24].copy_from_slice(&major.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(minor);
    rng
}

/// Stream for replication `replication` at sample size `n` of the table experiment.
pub fn replication_rng(master_seed: u64, n: usize, replication: usize) -> ChaCha8Rng {
    stream_rng(
        master_seed,
        StreamDomain::Table,
        n as u64,
        replication as u64,
    )
}
