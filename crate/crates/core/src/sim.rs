//! Seeded simulation of category bias scores: uniform unimodal draws per
//! group plus weighted fusion with additive gaussian noise.
//!
//! The draw order is part of the contract: entries in manifest order, and
//! per entry one text uniform, one image uniform, then one gaussian
//! deviate, all from a single stream. Outputs are byte-reproducible per
//! seed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{BiasScore, CategoryRecord};
use crate::rng::RandomSource;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("range [{lo}, {hi}] is invalid: need 0 <= lo <= hi <= 1")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("fusion weight {value} must be in [0, 1]")]
    InvalidWeight { value: f64 },
    #[error("noise sigma {value} must be finite and >= 0")]
    InvalidSigma { value: f64 },
    #[error("duplicate group {class_name}/{group_name} in manifest")]
    DuplicateGroup {
        class_name: String,
        group_name: String,
    },
    #[error("empty manifest")]
    EmptyManifest,
}

/// Closed sampling interval inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct ScoreRange {
    lo: f64,
    hi: f64,
}

impl ScoreRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self, SimError> {
        let valid = lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= 1.0;
        if !valid {
            return Err(SimError::InvalidRange { lo, hi });
        }
        Ok(ScoreRange { lo, hi })
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Map a uniform draw in `[0, 1)` onto this range.
    fn sample(self, uniform: f64) -> f64 {
        self.lo + uniform * (self.hi - self.lo)
    }
}

impl TryFrom<[f64; 2]> for ScoreRange {
    type Error = SimError;

    fn try_from(pair: [f64; 2]) -> Result<Self, SimError> {
        ScoreRange::new(pair[0], pair[1])
    }
}

impl From<ScoreRange> for [f64; 2] {
    fn from(range: ScoreRange) -> [f64; 2] {
        [range.lo, range.hi]
    }
}

/// Simulation parameters. Echoed into report metadata so any output is
/// reproducible from its own header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    w_text: f64,
    noise_sigma: f64,
    pub text_range: ScoreRange,
    pub image_range: ScoreRange,
}

impl SimConfig {
    pub fn new(
        seed: u64,
        w_text: f64,
        noise_sigma: f64,
        text_range: ScoreRange,
        image_range: ScoreRange,
    ) -> Result<Self, SimError> {
        if !w_text.is_finite() || !(0.0..=1.0).contains(&w_text) {
            return Err(SimError::InvalidWeight { value: w_text });
        }
        if !noise_sigma.is_finite() || noise_sigma < 0.0 {
            return Err(SimError::InvalidSigma { value: noise_sigma });
        }
        Ok(SimConfig {
            seed,
            w_text,
            noise_sigma,
            text_range,
            image_range,
        })
    }

    pub fn w_text(&self) -> f64 {
        self.w_text
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

impl Default for SimConfig {
    /// Seed 0, even fusion weights, sigma 0.05, sampling ranges
    /// `[0.3, 1.0]` for both modalities.
    fn default() -> Self {
        let range = ScoreRange::new(0.3, 1.0).unwrap();
        SimConfig::new(0, 0.5, 0.05, range, range).unwrap()
    }
}

/// One group to simulate, with optional per-group sampling ranges that
/// override the config defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub class_name: String,
    pub group_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_range: Option<ScoreRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_range: Option<ScoreRange>,
}

impl ManifestEntry {
    pub fn new(class_name: impl Into<String>, group_name: impl Into<String>) -> Self {
        ManifestEntry {
            class_name: class_name.into(),
            group_name: group_name.into(),
            text_range: None,
            image_range: None,
        }
    }
}

/// Ordered list of groups with unique (class, group) identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryManifest {
    entries: Vec<ManifestEntry>,
}

impl CategoryManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self, SimError> {
        let mut seen = std::collections::HashSet::new();
        for entry in &entries {
            if !seen.insert((entry.class_name.clone(), entry.group_name.clone())) {
                return Err(SimError::DuplicateGroup {
                    class_name: entry.class_name.clone(),
                    group_name: entry.group_name.clone(),
                });
            }
        }
        Ok(CategoryManifest { entries })
    }

    /// The bundled MMBias taxonomy: 14 target groups across four classes.
    pub fn mmbias() -> Self {
        let groups: [(&str, &str); 14] = [
            ("religion", "Muslim"),
            ("religion", "Christian"),
            ("religion", "Jewish"),
            ("religion", "Buddhist"),
            ("religion", "Hindu"),
            ("nationality", "American"),
            ("nationality", "Arab"),
            ("nationality", "Chinese"),
            ("nationality", "Mexican"),
            ("disability", "Mental Disability"),
            ("disability", "Physical Disability"),
            ("disability", "Non-disabled"),
            ("sexual-orientation", "Heterosexual"),
            ("sexual-orientation", "LGBT"),
        ];
        CategoryManifest {
            entries: groups
                .iter()
                .map(|(class, group)| ManifestEntry::new(*class, *group))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Weighted fusion of the two unimodal scores plus scaled noise, clamped
/// into `[0, 1]`.
///
/// The convex part is clamped into the band spanned by the two inputs
/// first: mathematically a weighted mean cannot leave that band, and the
/// clamp removes the last-bit rounding that otherwise could.
pub fn fuse(
    s_text: BiasScore,
    s_image: BiasScore,
    config: &SimConfig,
    noise_draw: f64,
) -> BiasScore {
    debug_assert!(noise_draw.is_finite());
    let (_, fused) = fuse_parts(s_text.value(), s_image.value(), config, noise_draw);
    BiasScore::saturating(fused)
}

/// Returns (raw sum, clamped sum) so callers can count clamping events.
fn fuse_parts(s_text: f64, s_image: f64, config: &SimConfig, noise_draw: f64) -> (f64, f64) {
    let lo = s_text.min(s_image);
    let hi = s_text.max(s_image);
    let convex = (config.w_text * s_text + (1.0 - config.w_text) * s_image).clamp(lo, hi);
    let raw = convex + config.noise_sigma * noise_draw;
    (raw, raw.clamp(0.0, 1.0))
}

/// A simulated dataset plus how many fused scores hit the `[0, 1]` clamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub records: Vec<CategoryRecord>,
    pub clamp_events: usize,
}

/// Draw one record per manifest entry. Per entry: text uniform, image
/// uniform, one gaussian deviate, in that order, from a single stream
/// seeded by the config.
pub fn simulate_dataset(
    manifest: &CategoryManifest,
    config: &SimConfig,
) -> Result<Simulation, SimError> {
    if manifest.is_empty() {
        return Err(SimError::EmptyManifest);
    }
    let mut source = RandomSource::new(config.seed);
    let mut records = Vec::with_capacity(manifest.len());
    let mut clamp_events = 0;
    for entry in manifest.entries() {
        let text_range = entry.text_range.unwrap_or(config.text_range);
        let image_range = entry.image_range.unwrap_or(config.image_range);
        let s_text = text_range.sample(source.next_uniform());
        let s_image = image_range.sample(source.next_uniform());
        let noise = source.next_gaussian();
        let (raw, fused) = fuse_parts(s_text, s_image, config, noise);
        if raw != fused {
            clamp_events += 1;
        }
        records.push(CategoryRecord {
            class_name: entry.class_name.clone(),
            group_name: entry.group_name.clone(),
            s_text: BiasScore::saturating(s_text),
            s_image: BiasScore::saturating(s_image),
            s_multi: BiasScore::saturating(fused),
        });
    }
    Ok(Simulation {
        records,
        clamp_events,
    })
}
