//! Dataset-level analytics: label every record, then reduce to interaction
//! mixes, dominance-conditioned probability tables, and per-label means.

use thiserror::Error;

use crate::domain::{
    CategoryRecord, ClassifiedRecord, Dominance, InteractionType, TieEpsilon,
};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("no records")]
    EmptyDataset,
}

fn interaction_index(label: InteractionType) -> usize {
    match label {
        InteractionType::Amplification => 0,
        InteractionType::Mitigation => 1,
        InteractionType::Neutral => 2,
    }
}

/// Label every record, preserving input order.
pub fn classify_dataset(
    records: &[CategoryRecord],
    tie_epsilon: TieEpsilon,
) -> Result<Vec<ClassifiedRecord>, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    Ok(records
        .iter()
        .map(|record| ClassifiedRecord::classify(record.clone(), tie_epsilon))
        .collect())
}

/// Interaction label counts and their exact proportions of the total.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMix {
    counts: [usize; 3],
    total: usize,
}

impl InteractionMix {
    pub fn count(&self, label: InteractionType) -> usize {
        self.counts[interaction_index(label)]
    }

    /// `count / total`, computed as a single division.
    pub fn proportion(&self, label: InteractionType) -> f64 {
        self.count(label) as f64 / self.total as f64
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

pub fn interaction_mix(classified: &[ClassifiedRecord]) -> Result<InteractionMix, AnalysisError> {
    if classified.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    let mut counts = [0usize; 3];
    for record in classified {
        counts[interaction_index(record.interaction())] += 1;
    }
    Ok(InteractionMix {
        counts,
        total: classified.len(),
    })
}

/// Which way a probability table conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableDirection {
    /// P(interaction | dominance), conditioned on the dominance strata.
    InteractionGivenDominance,
    /// P(dominance | interaction), conditioned on the interaction labels.
    DominanceGivenInteraction,
}

impl TableDirection {
    pub fn token(self) -> &'static str {
        match self {
            TableDirection::InteractionGivenDominance => "interaction_given_dominance",
            TableDirection::DominanceGivenInteraction => "dominance_given_interaction",
        }
    }
}

/// A condition stratum or an outcome in a probability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Interaction(InteractionType),
    Dominance(Dominance),
}

impl Label {
    pub fn token(self) -> &'static str {
        match self {
            Label::Interaction(t) => t.token(),
            Label::Dominance(d) => d.token(),
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Label::Interaction(t) => t.title(),
            Label::Dominance(d) => d.title(),
        }
    }
}

/// One condition stratum: its record count and, when the stratum is
/// non-empty, the outcome probabilities (exact count ratios).
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    condition: Label,
    count: usize,
    probabilities: Option<Vec<(Label, f64)>>,
}

impl TableRow {
    pub fn condition(&self) -> Label {
        self.condition
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// `None` marks an undefined row (empty stratum), never zero-filled.
    pub fn probabilities(&self) -> Option<&[(Label, f64)]> {
        self.probabilities.as_deref()
    }
}

/// Row-stochastic conditional probability table over one direction.
/// Tie records are excluded from every stratum and reported separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    direction: TableDirection,
    rows: Vec<TableRow>,
    tie_count: usize,
}

impl ProbabilityTable {
    pub fn direction(&self) -> TableDirection {
        self.direction
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    pub fn tie_count(&self) -> usize {
        self.tie_count
    }

    pub fn stratum_count(&self, condition: Label) -> Option<usize> {
        self.rows
            .iter()
            .find(|row| row.condition == condition)
            .map(|row| row.count)
    }

    /// Probability of `outcome` within `condition`, or `None` when the
    /// stratum is empty or the pair does not belong to this direction.
    pub fn probability(&self, condition: Label, outcome: Label) -> Option<f64> {
        let row = self.rows.iter().find(|row| row.condition == condition)?;
        let cells = row.probabilities.as_ref()?;
        cells
            .iter()
            .find(|(label, _)| *label == outcome)
            .map(|(_, p)| *p)
    }
}

pub fn conditional_table(
    classified: &[ClassifiedRecord],
    direction: TableDirection,
) -> Result<ProbabilityTable, AnalysisError> {
    if classified.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }

    // joint[interaction][dominance] over non-tie records only.
    let mut joint = [[0usize; 2]; 3];
    let mut tie_count = 0usize;
    for record in classified {
        match record.dominance() {
            Dominance::TextDominant => joint[interaction_index(record.interaction())][0] += 1,
            Dominance::ImageDominant => joint[interaction_index(record.interaction())][1] += 1,
            Dominance::Tie => tie_count += 1,
        }
    }

    let rows = match direction {
        TableDirection::InteractionGivenDominance => Dominance::STRATA
            .iter()
            .enumerate()
            .map(|(d_idx, d)| {
                let count: usize = (0..3).map(|t_idx| joint[t_idx][d_idx]).sum();
                let probabilities = (count > 0).then(|| {
                    InteractionType::ALL
                        .iter()
                        .map(|t| {
                            let cell = joint[interaction_index(*t)][d_idx];
                            (Label::Interaction(*t), cell as f64 / count as f64)
                        })
                        .collect()
                });
                TableRow {
                    condition: Label::Dominance(*d),
                    count,
                    probabilities,
                }
            })
            .collect(),
        TableDirection::DominanceGivenInteraction => InteractionType::ALL
            .iter()
            .map(|t| {
                let t_idx = interaction_index(*t);
                let count = joint[t_idx][0] + joint[t_idx][1];
                let probabilities = (count > 0).then(|| {
                    Dominance::STRATA
                        .iter()
                        .enumerate()
                        .map(|(d_idx, d)| {
                            (Label::Dominance(*d), joint[t_idx][d_idx] as f64 / count as f64)
                        })
                        .collect()
                });
                TableRow {
                    condition: Label::Interaction(*t),
                    count,
                    probabilities,
                }
            })
            .collect(),
    };

    Ok(ProbabilityTable {
        direction,
        rows,
        tie_count,
    })
}

/// Arithmetic means of the three scores within one interaction label.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanScores {
    pub count: usize,
    pub s_text: f64,
    pub s_image: f64,
    pub s_multi: f64,
}

/// Per-label mean scores; labels with no records stay undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMeans {
    rows: [Option<MeanScores>; 3],
}

impl InteractionMeans {
    pub fn means(&self, label: InteractionType) -> Option<&MeanScores> {
        self.rows[interaction_index(label)].as_ref()
    }
}

pub fn interaction_means(
    classified: &[ClassifiedRecord],
) -> Result<InteractionMeans, AnalysisError> {
    if classified.is_empty() {
        return Err(AnalysisError::EmptyDataset);
    }
    let mut buckets: [[Vec<f64>; 3]; 3] = Default::default();
    for record in classified {
        let bucket = &mut buckets[interaction_index(record.interaction())];
        bucket[0].push(record.record().s_text.value());
        bucket[1].push(record.record().s_image.value());
        bucket[2].push(record.record().s_multi.value());
    }
    let rows = buckets.map(|mut bucket| {
        let count = bucket[0].len();
        if count == 0 {
            return None;
        }
        let mut means = [0.0; 3];
        for (slot, values) in means.iter_mut().zip(bucket.iter_mut()) {
            // Sum in sorted order so the result does not depend on input
            // order; clamp into the contributing range to absorb the
            // last-bit rounding a division can add.
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / count as f64;
            *slot = mean.clamp(values[0], values[count - 1]);
        }
        Some(MeanScores {
            count,
            s_text: means[0],
            s_image: means[1],
            s_multi: means[2],
        })
    });
    Ok(InteractionMeans { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::CategoryRecord;

    fn record(st: f64, si: f64, sm: f64) -> CategoryRecord {
        static COUNTER: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);
        let id = COUNTER.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        CategoryRecord::new("class", format!("group-{id}"), st, si, sm).unwrap()
    }

    fn classified(triples: &[(f64, f64, f64)]) -> Vec<ClassifiedRecord> {
        let records: Vec<_> = triples.iter().map(|&(a, b, c)| record(a, b, c)).collect();
        classify_dataset(&records, TieEpsilon::ZERO).unwrap()
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(
            classify_dataset(&[], TieEpsilon::ZERO),
            Err(AnalysisError::EmptyDataset)
        );
        assert_eq!(interaction_mix(&[]), Err(AnalysisError::EmptyDataset));
        assert_eq!(
            conditional_table(&[], TableDirection::InteractionGivenDominance),
            Err(AnalysisError::EmptyDataset)
        );
        assert_eq!(interaction_means(&[]), Err(AnalysisError::EmptyDataset));
    }

    #[test]
    fn classify_preserves_order_and_delegates() {
        let rows = classified(&[(0.5, 0.6, 0.7), (0.7, 0.4, 0.3), (0.5, 0.6, 0.6)]);
        let labels: Vec<_> = rows.iter().map(|r| r.interaction()).collect();
        assert_eq!(
            labels,
            vec![
                InteractionType::Amplification,
                InteractionType::Mitigation,
                InteractionType::Neutral
            ]
        );
    }

    #[test]
    fn mix_counts_and_proportions() {
        let rows = classified(&[(0.5, 0.6, 0.7), (0.4, 0.5, 0.45), (0.4, 0.5, 0.42)]);
        let mix = interaction_mix(&rows).unwrap();
        assert_eq!(mix.count(InteractionType::Amplification), 1);
        assert_eq!(mix.count(InteractionType::Neutral), 2);
        assert_eq!(mix.total(), 3);
        assert!((mix.proportion(InteractionType::Neutral) - 2.0 / 3.0).abs() < 1e-15);
        let sum: f64 = InteractionType::ALL
            .iter()
            .map(|t| mix.proportion(*t))
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_neutral_mix() {
        let rows = classified(&[(0.4, 0.6, 0.5), (0.2, 0.8, 0.7)]);
        let mix = interaction_mix(&rows).unwrap();
        assert_eq!(mix.proportion(InteractionType::Amplification), 0.0);
        assert_eq!(mix.proportion(InteractionType::Mitigation), 0.0);
        assert_eq!(mix.proportion(InteractionType::Neutral), 1.0);

        let single = classified(&[(0.5, 0.6, 0.7)]);
        let mix = interaction_mix(&single).unwrap();
        assert_eq!(mix.proportion(InteractionType::Amplification), 1.0);
    }

    #[test]
    fn table_excludes_ties_and_marks_empty_strata() {
        // One tie record, one text-dominant amplification.
        let rows = classified(&[(0.5, 0.5, 0.5), (0.7, 0.4, 0.8)]);
        let table =
            conditional_table(&rows, TableDirection::InteractionGivenDominance).unwrap();
        assert_eq!(table.tie_count(), 1);
        assert_eq!(
            table.stratum_count(Label::Dominance(Dominance::TextDominant)),
            Some(1)
        );
        assert_eq!(
            table.probability(
                Label::Dominance(Dominance::TextDominant),
                Label::Interaction(InteractionType::Amplification)
            ),
            Some(1.0)
        );
        // Image stratum is empty: present, count zero, undefined cells.
        let image_row = &table.rows()[1];
        assert_eq!(image_row.count(), 0);
        assert!(image_row.probabilities().is_none());
        assert_eq!(
            table.probability(
                Label::Dominance(Dominance::ImageDominant),
                Label::Interaction(InteractionType::Neutral)
            ),
            None
        );
    }

    #[test]
    fn both_directions_conserve_counts() {
        let rows = classified(&[
            (0.5, 0.5, 0.5),
            (0.7, 0.4, 0.8),
            (0.3, 0.6, 0.5),
            (0.8, 0.2, 0.1),
        ]);
        for direction in [
            TableDirection::InteractionGivenDominance,
            TableDirection::DominanceGivenInteraction,
        ] {
            let table = conditional_table(&rows, direction).unwrap();
            let strata: usize = table.rows().iter().map(TableRow::count).sum();
            assert_eq!(strata + table.tie_count(), rows.len());
        }
    }

    #[test]
    fn means_per_label() {
        let rows = classified(&[(0.5, 0.6, 0.7), (0.7, 0.4, 0.3), (0.4, 0.6, 0.5)]);
        let means = interaction_means(&rows).unwrap();
        let amp = means.means(InteractionType::Amplification).unwrap();
        assert_eq!((amp.s_text, amp.s_image, amp.s_multi), (0.5, 0.6, 0.7));
        assert_eq!(amp.count, 1);

        // Two neutral records averaging s_text 0.4 and 0.6.
        let rows = classified(&[(0.4, 0.6, 0.5), (0.6, 0.8, 0.7)]);
        let means = interaction_means(&rows).unwrap();
        let neutral = means.means(InteractionType::Neutral).unwrap();
        assert_eq!(neutral.s_text, 0.5);
        assert_eq!(neutral.count, 2);

        // No mitigation records: undefined, not zero.
        assert!(means.means(InteractionType::Mitigation).is_none());
    }

    #[test]
    fn means_stay_inside_contributing_range() {
        // Identical 0.1 scores: a naive sum-then-divide rounds just above
        // the inputs; the mean must not leave [min, max].
        let rows = classified(&[(0.1, 0.1, 0.1), (0.1, 0.1, 0.1), (0.1, 0.1, 0.1)]);
        let means = interaction_means(&rows).unwrap();
        let neutral = means.means(InteractionType::Neutral).unwrap();
        assert_eq!(neutral.s_text, 0.1);
        assert_eq!(neutral.s_image, 0.1);
        assert_eq!(neutral.s_multi, 0.1);
    }

    #[test]
    fn outputs_ignore_record_order() {
        let triples = [
            (0.5, 0.6, 0.7),
            (0.7, 0.4, 0.3),
            (0.4, 0.6, 0.5),
            (0.9, 0.1, 0.55),
            (0.33, 0.91, 0.6),
        ];
        let forward = classified(&triples);
        let mut reversed: Vec<(f64, f64, f64)> = triples.to_vec();
        reversed.reverse();
        let backward = classified(&reversed);

        let mix_a = interaction_mix(&forward).unwrap();
        let mix_b = interaction_mix(&backward).unwrap();
        for t in InteractionType::ALL {
            assert_eq!(mix_a.count(t), mix_b.count(t));
            assert_eq!(mix_a.proportion(t), mix_b.proportion(t));
        }

        for direction in [
            TableDirection::InteractionGivenDominance,
            TableDirection::DominanceGivenInteraction,
        ] {
            let table_a = conditional_table(&forward, direction).unwrap();
            let table_b = conditional_table(&backward, direction).unwrap();
            assert_eq!(table_a.rows(), table_b.rows());
        }

        let means_a = interaction_means(&forward).unwrap();
        let means_b = interaction_means(&backward).unwrap();
        assert_eq!(means_a, means_b);
    }
}
