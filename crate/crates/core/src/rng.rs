//! Deterministic random streams.
//!
//! Every Markov chain owns one ChaCha20 stream seeded from the run seed. The
//! generator is counter based, so its full state is `(seed, stream, word_pos)`
//! and can be digested into the ensemble metadata.

use rand::{Rng, SeedableRng};
use sha2::{Digest, Sha256};

pub use rand_chacha::ChaCha20Rng as StreamRng;

/// Build the stream for `seed`.
pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

/// Independent stream for a second consumer of the same seed (e.g. a
/// parallel chain). Streams never overlap for distinct `stream` ids.
pub fn seeded_stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = StreamRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Hex digest identifying the exact position of a stream.
pub fn state_digest(seed: u64, rng: &StreamRng) -> String {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(rng.get_stream().to_le_bytes());
    h.update(rng.get_word_pos().to_le_bytes());
    hex::encode(h.finalize())
}

/// Uniform sample in the half-open interval (0, 1].
#[inline]
pub(crate) fn unit_open_low<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
