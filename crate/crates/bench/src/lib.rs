//! Synthetic dataset builders shared by the benchmark targets.

use biaslens_core::{
    CategoryManifest, CategoryRecord, EmbeddingVector, ManifestEntry, ScoreRange, SimConfig,
    SplitMix64,
};

/// A manifest with `n` synthetic groups in one class.
pub fn synthetic_manifest(n: usize) -> CategoryManifest {
    CategoryManifest::new(
        (0..n)
            .map(|i| ManifestEntry::new("synthetic", format!("group-{i}")))
            .collect(),
    )
    .unwrap()
}

/// The default simulation config with a chosen seed.
pub fn config(seed: u64) -> SimConfig {
    let range = ScoreRange::new(0.3, 1.0).unwrap();
    SimConfig::new(seed, 0.5, 0.05, range, range).unwrap()
}

/// `n` records with uniform random score triples.
pub fn random_records(seed: u64, n: usize) -> Vec<CategoryRecord> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|i| {
            CategoryRecord::new(
                "synthetic",
                format!("group-{i}"),
                rng.next_uniform(),
                rng.next_uniform(),
                rng.next_uniform(),
            )
            .unwrap()
        })
        .collect()
}

/// `n` random embedding vectors of dimension `dim`, components in [-1, 1].
pub fn random_vectors(seed: u64, n: usize, dim: usize) -> Vec<EmbeddingVector> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            EmbeddingVector::new((0..dim).map(|_| rng.next_uniform() * 2.0 - 1.0).collect())
                .unwrap()
        })
        .collect()
}
