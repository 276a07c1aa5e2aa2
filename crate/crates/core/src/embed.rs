//! Measured bias scoring from embedding vectors: cosine similarity against
//! pleasant/unpleasant anchor sets, reduced to a bounded bias score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{BiasScore, DomainError};

#[derive(Debug, Error, PartialEq)]
pub enum EmbedError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("embedding vector must not be empty")]
    EmptyVector,
    #[error("embedding vector component {index} is not finite")]
    NonFiniteComponent { index: usize },
    #[error("embedding vector has zero norm")]
    ZeroNorm,
    #[error("anchor set needs at least one {role} vector")]
    EmptyAnchorRole { role: &'static str },
    #[error("target list must not be empty")]
    EmptyTargets,
    #[error("association {value} is outside [-2, 2]")]
    AssociationOutOfRange { value: f64 },
    #[error("group {class_name}/{group_name}: {source}")]
    Group {
        class_name: String,
        group_name: String,
        source: Box<EmbedError>,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A dense embedding: finite components, length >= 1, nonzero norm.
/// Components are stored exactly as ingested; normalization happens
/// inside the cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    components: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Result<Self, EmbedError> {
        if components.is_empty() {
            return Err(EmbedError::EmptyVector);
        }
        for (index, c) in components.iter().enumerate() {
            if !c.is_finite() {
                return Err(EmbedError::NonFiniteComponent { index });
            }
        }
        if norm(&components) == 0.0 {
            return Err(EmbedError::ZeroNorm);
        }
        Ok(EmbeddingVector { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }
}

fn norm(components: &[f64]) -> f64 {
    components.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Pleasant and unpleasant sentiment anchors of a common dimension.
#[derive(Debug, Clone)]
pub struct AnchorSet {
    pleasant: Vec<EmbeddingVector>,
    unpleasant: Vec<EmbeddingVector>,
}

impl AnchorSet {
    pub fn new(
        pleasant: Vec<EmbeddingVector>,
        unpleasant: Vec<EmbeddingVector>,
    ) -> Result<Self, EmbedError> {
        if pleasant.is_empty() {
            return Err(EmbedError::EmptyAnchorRole { role: "pleasant" });
        }
        if unpleasant.is_empty() {
            return Err(EmbedError::EmptyAnchorRole { role: "unpleasant" });
        }
        let dim = pleasant[0].dim();
        for v in pleasant.iter().chain(unpleasant.iter()) {
            if v.dim() != dim {
                return Err(EmbedError::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
        }
        Ok(AnchorSet {
            pleasant,
            unpleasant,
        })
    }

    pub fn dim(&self) -> usize {
        self.pleasant[0].dim()
    }

    pub fn pleasant(&self) -> &[EmbeddingVector] {
        &self.pleasant
    }

    pub fn unpleasant(&self) -> &[EmbeddingVector] {
        &self.unpleasant
    }

    /// The same anchors with the pleasant and unpleasant roles exchanged.
    pub fn swapped(&self) -> AnchorSet {
        AnchorSet {
            pleasant: self.unpleasant.clone(),
            unpleasant: self.pleasant.clone(),
        }
    }
}

/// Which modality a group's vectors came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Text,
    Image,
}

impl Modality {
    pub fn token(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Image => "image",
        }
    }
}

/// One target group's embeddings for one modality.
#[derive(Debug, Clone)]
pub struct TargetGroupEmbeddings {
    pub class_name: String,
    pub group_name: String,
    pub modality: Modality,
    vectors: Vec<EmbeddingVector>,
}

impl TargetGroupEmbeddings {
    pub fn new(
        class_name: impl Into<String>,
        group_name: impl Into<String>,
        modality: Modality,
        vectors: Vec<EmbeddingVector>,
    ) -> Result<Self, EmbedError> {
        if vectors.is_empty() {
            return Err(EmbedError::EmptyTargets);
        }
        let dim = vectors[0].dim();
        for v in &vectors {
            if v.dim() != dim {
                return Err(EmbedError::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
        }
        Ok(TargetGroupEmbeddings {
            class_name: class_name.into(),
            group_name: group_name.into(),
            modality,
            vectors,
        })
    }

    pub fn vectors(&self) -> &[EmbeddingVector] {
        &self.vectors
    }
}

/// Cosine similarity, clamped to `[-1, 1]` to absorb last-bit overshoot
/// from the division.
pub fn cosine_similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    if u.dim() != v.dim() {
        return Err(EmbedError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let dot: f64 = u
        .components()
        .iter()
        .zip(v.components())
        .map(|(a, b)| a * b)
        .sum();
    let cos = dot / (norm(u.components()) * norm(v.components()));
    Ok(cos.clamp(-1.0, 1.0))
}

/// Association of the targets with the pleasant pole relative to the
/// unpleasant pole, in `[-2, 2]`: per-target mean cosine over each anchor
/// list, then mean over targets, then the difference of the two means.
pub fn association(targets: &[EmbeddingVector], anchors: &AnchorSet) -> Result<f64, EmbedError> {
    if targets.is_empty() {
        return Err(EmbedError::EmptyTargets);
    }
    let mut pleasant_total = 0.0;
    let mut unpleasant_total = 0.0;
    for target in targets {
        pleasant_total += mean_cosine(target, anchors.pleasant())?;
        unpleasant_total += mean_cosine(target, anchors.unpleasant())?;
    }
    let n = targets.len() as f64;
    // Summation rounding can creep past the mathematical bound when
    // every cosine sits near an extreme; clamp like the cosine does.
    Ok((pleasant_total / n - unpleasant_total / n).clamp(-2.0, 2.0))
}

fn mean_cosine(target: &EmbeddingVector, anchors: &[EmbeddingVector]) -> Result<f64, EmbedError> {
    let mut total = 0.0;
    for anchor in anchors {
        total += cosine_similarity(target, anchor)?;
    }
    Ok(total / anchors.len() as f64)
}

/// Affine bijection `[-2, 2] -> [0, 1]`; 0.5 means no asymmetry between
/// the pleasant and unpleasant poles.
pub fn bias_score_from_association(a: f64) -> Result<BiasScore, EmbedError> {
    if !a.is_finite() || a.abs() > 2.0 {
        return Err(EmbedError::AssociationOutOfRange { value: a });
    }
    Ok(BiasScore::new((a + 2.0) / 4.0)?)
}

/// Score one group's vectors against the anchors, attaching the group
/// identity to any failure.
pub fn modality_bias(
    group: &TargetGroupEmbeddings,
    anchors: &AnchorSet,
) -> Result<BiasScore, EmbedError> {
    let attach = |source: EmbedError| EmbedError::Group {
        class_name: group.class_name.clone(),
        group_name: group.group_name.clone(),
        source: Box::new(source),
    };
    let a = association(group.vectors(), anchors).map_err(attach)?;
    bias_score_from_association(a).map_err(attach)
}
