//! Shared inputs for the benchmarks.

use analogy_core::synth::random_set;
use analogy_core::{AnalogyQuery, EmbeddingSet};

pub const DIM: usize = 300;

/// Vocabulary sizes swept by the scoring benchmarks.
pub const VOCABS: [usize; 3] = [10_000, 50_000, 100_000];

pub fn set(vocab: usize) -> EmbeddingSet {
    random_set(vocab, DIM, 7)
}

/// A query over three frequent tokens.
pub fn query(set: &EmbeddingSet) -> AnalogyQuery {
    AnalogyQuery::new(set.token(1), set.token(2), set.token(3))
}
