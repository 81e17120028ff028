//! Command-line surface and file formats over `geo2seq-core`: encode XYZ
//! geometries to token-sequence files and back, build vocabularies, train and
//! sample the counting-model baseline, and evaluate generated sets.

pub mod args;
pub mod commands;
pub mod report;
pub mod seqfiles;

/// Per-item seed derived from the run seed: stream `index` of a ChaCha
/// generator keyed by the run seed, so items are independent and the set of
/// streams is a pure function of the one seed.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.gen()
}
