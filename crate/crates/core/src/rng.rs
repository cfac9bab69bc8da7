//! Deterministic seed streams.
//!
//! Every random consumer gets its own ChaCha stream derived from a master
//! seed and a task name, so adding a task never shifts another task's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a, stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

pub fn derive_seed(master: u64, task: &str) -> u64 {
    splitmix(master ^ splitmix(fnv1a(task.as_bytes())))
}

pub fn derive_indexed(master: u64, task: &str, index: u64) -> u64 {
    splitmix(derive_seed(master, task) ^ splitmix(index.wrapping_add(1)))
}

pub fn task_rng(master: u64, task: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, task))
}

pub fn indexed_rng(master: u64, task: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_indexed(master, task, index))
}
