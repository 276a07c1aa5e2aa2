//! Quantifies text, image, and multimodal bias scores, classifies how the
//! modalities interact (amplification, mitigation, neutral), and reduces
//! datasets to dominance-conditioned probability tables, summaries, and
//! charts.
//!
//! Scores either come in measured form (embedding vectors scored against
//! pleasant/unpleasant anchors) or from a seeded simulation with a pinned
//! generator, so every run is reproducible from its configuration.

pub mod analysis;
pub mod chart;
pub mod domain;
pub mod embed;
pub mod ingest;
pub mod report;
pub mod rng;
pub mod sim;

pub use analysis::{
    classify_dataset, conditional_table, interaction_means, interaction_mix, AnalysisError,
    InteractionMeans, InteractionMix, Label, MeanScores, ProbabilityTable, TableDirection,
    TableRow,
};
pub use chart::{render_bar_chart, ChartSeries, ChartStyle};
pub use domain::{
    classify_interaction, dominance, BiasScore, CategoryRecord, ClassifiedRecord, Dominance,
    DomainError, InteractionType, TieEpsilon,
};
pub use embed::{
    association, bias_score_from_association, cosine_similarity, modality_bias, AnchorSet,
    EmbedError, EmbeddingVector, Modality, TargetGroupEmbeddings,
};
pub use ingest::{load_embeddings, load_manifest, load_scores, IngestError, SCORES_HEADER};
pub use report::{
    dominance_chart_series, fingerprint, means_chart_series, render_summary, scores_chart_series,
    write_classified, write_scores, ReportError, RunMetadata, SimEcho, SummaryFormat,
};
pub use rng::{RandomSource, SplitMix64};
pub use sim::{
    fuse, simulate_dataset, CategoryManifest, ManifestEntry, ScoreRange, SimConfig, SimError,
    Simulation,
};
