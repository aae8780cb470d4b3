//! Deterministic derivation of RNG streams from a single master seed.
//!
//! Every source of randomness in this crate is keyed by `(master, stream)`
//! through a splitmix64-style mix, so replicates and benchmark cells can run
//! in any order (or in parallel) and still reproduce bit-identical results.

/// One round of the splitmix64 output function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for stream `stream` from `master`.
///
/// Streams with distinct indices are decorrelated; the mapping is pure, so
/// callers may request streams in any order.
pub fn stream_seed(master: u64, stream: u64) -> u64 {
    mix(mix(master) ^ mix(stream.wrapping_add(1)))
}
