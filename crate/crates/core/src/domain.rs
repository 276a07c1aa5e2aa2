//! Domain vocabulary: bounded bias scores, interaction and dominance labels,
//! and the two pure decision rules everything else builds on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Validation failures for domain values.
#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("{field}: {value} is not a finite number")]
    NotFinite { field: &'static str, value: f64 },
    #[error("{field}: {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("tie epsilon {value} must be finite and >= 0")]
    InvalidTieEpsilon { value: f64 },
}

/// A bias magnitude for one modality, always finite and in `[0, 1]`.
///
/// Validated at construction; downstream code may assume validity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct BiasScore(f64);

impl BiasScore {
    /// Validate and wrap a raw value. The generic field name is used in
    /// error messages; prefer [`BiasScore::named`] when the caller knows
    /// which field is being built.
    pub fn new(value: f64) -> Result<Self, DomainError> {
        Self::named("score", value)
    }

    /// Validate a raw value, attributing any error to `field`.
    pub fn named(field: &'static str, value: f64) -> Result<Self, DomainError> {
        if !value.is_finite() {
            return Err(DomainError::NotFinite { field, value });
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(DomainError::OutOfRange { field, value });
        }
        Ok(BiasScore(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Clamp a finite raw value into `[0, 1]`. Fusion and sampling paths
    /// use this where the clamp is the contract, not an error.
    pub(crate) fn saturating(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        BiasScore(value.clamp(0.0, 1.0))
    }
}

impl<'de> Deserialize<'de> for BiasScore {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        BiasScore::new(value).map_err(serde::de::Error::custom)
    }
}

/// How the multimodal score relates to the two unimodal scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionType {
    Amplification,
    Mitigation,
    Neutral,
}

impl InteractionType {
    /// Fixed reporting order.
    pub const ALL: [InteractionType; 3] = [
        InteractionType::Amplification,
        InteractionType::Mitigation,
        InteractionType::Neutral,
    ];

    /// Stable machine token, used in files and summaries.
    pub fn token(self) -> &'static str {
        match self {
            InteractionType::Amplification => "amplification",
            InteractionType::Mitigation => "mitigation",
            InteractionType::Neutral => "neutral",
        }
    }

    /// Human-facing label for chart text.
    pub fn title(self) -> &'static str {
        match self {
            InteractionType::Amplification => "Amplification",
            InteractionType::Mitigation => "Mitigation",
            InteractionType::Neutral => "Neutral",
        }
    }
}

impl std::fmt::Display for InteractionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Which unimodal score is strictly larger, up to a tie tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    TextDominant,
    ImageDominant,
    Tie,
}

impl Dominance {
    /// The two strata that condition probability tables; ties are excluded.
    pub const STRATA: [Dominance; 2] = [Dominance::TextDominant, Dominance::ImageDominant];

    pub fn token(self) -> &'static str {
        match self {
            Dominance::TextDominant => "text_dominant",
            Dominance::ImageDominant => "image_dominant",
            Dominance::Tie => "tie",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Dominance::TextDominant => "Text dominant",
            Dominance::ImageDominant => "Image dominant",
            Dominance::Tie => "Tie",
        }
    }
}

impl std::fmt::Display for Dominance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Tolerance below which two unimodal scores count as tied.
///
/// The default of exactly zero means only exact equality ties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TieEpsilon(f64);

impl TieEpsilon {
    pub const ZERO: TieEpsilon = TieEpsilon(0.0);

    pub fn new(value: f64) -> Result<Self, DomainError> {
        if !value.is_finite() || value < 0.0 {
            return Err(DomainError::InvalidTieEpsilon { value });
        }
        Ok(TieEpsilon(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for TieEpsilon {
    fn default() -> Self {
        TieEpsilon::ZERO
    }
}

/// One subcategory's score triple with identity metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryRecord {
    pub class_name: String,
    pub group_name: String,
    pub s_text: BiasScore,
    pub s_image: BiasScore,
    pub s_multi: BiasScore,
}

impl CategoryRecord {
    /// Build a record from raw score values, validating each and naming
    /// the offending field on failure.
    pub fn new(
        class_name: impl Into<String>,
        group_name: impl Into<String>,
        s_text: f64,
        s_image: f64,
        s_multi: f64,
    ) -> Result<Self, DomainError> {
        Ok(CategoryRecord {
            class_name: class_name.into(),
            group_name: group_name.into(),
            s_text: BiasScore::named("s_text", s_text)?,
            s_image: BiasScore::named("s_image", s_image)?,
            s_multi: BiasScore::named("s_multi", s_multi)?,
        })
    }
}

/// A record plus the labels the decision rules assign to it.
///
/// Only constructible through [`ClassifiedRecord::classify`], so the labels
/// always agree with the record's scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedRecord {
    record: CategoryRecord,
    interaction: InteractionType,
    dominance: Dominance,
}

impl ClassifiedRecord {
    pub fn classify(record: CategoryRecord, tie_epsilon: TieEpsilon) -> Self {
        let interaction = classify_interaction(record.s_text, record.s_image, record.s_multi);
        let dominance = dominance(record.s_text, record.s_image, tie_epsilon);
        ClassifiedRecord {
            record,
            interaction,
            dominance,
        }
    }

    pub fn record(&self) -> &CategoryRecord {
        &self.record
    }

    pub fn interaction(&self) -> InteractionType {
        self.interaction
    }

    pub fn dominance(&self) -> Dominance {
        self.dominance
    }
}

/// Compare the multimodal score against the closed band spanned by the two
/// unimodal scores: above it is amplification, below it is mitigation, and
/// anything inside (boundaries included) is neutral.
pub fn classify_interaction(
    s_text: BiasScore,
    s_image: BiasScore,
    s_multi: BiasScore,
) -> InteractionType {
    let lo = s_text.value().min(s_image.value());
    let hi = s_text.value().max(s_image.value());
    let m = s_multi.value();
    if m > hi {
        InteractionType::Amplification
    } else if m < lo {
        InteractionType::Mitigation
    } else {
        InteractionType::Neutral
    }
}

/// Label which modality's score dominates, treating differences within
/// `tie_epsilon` as ties.
pub fn dominance(s_text: BiasScore, s_image: BiasScore, tie_epsilon: TieEpsilon) -> Dominance {
    let delta = s_text.value() - s_image.value();
    if delta > tie_epsilon.value() {
        Dominance::TextDominant
    } else if -delta > tie_epsilon.value() {
        Dominance::ImageDominant
    } else {
        Dominance::Tie
    }
}
