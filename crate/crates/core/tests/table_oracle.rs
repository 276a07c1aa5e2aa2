//! Probability-table algebra against a brute-force oracle: 200 random
//! datasets of up to 50 records, both conditioning directions, exact
//! count agreement, row-stochastic rows, count conservation, and Bayes
//! consistency from empirical marginals.

use biaslens_core::{
    classify_dataset, conditional_table, CategoryRecord, ClassifiedRecord, Dominance,
    InteractionType, Label, SplitMix64, TableDirection, TieEpsilon,
};

fn random_dataset(rng: &mut SplitMix64, size: usize) -> Vec<CategoryRecord> {
    (0..size)
        .map(|i| {
            let s_text = (rng.next_uniform() * 10.0).round() / 10.0;
            // Coarse grid so exact ties actually occur.
            let s_image = (rng.next_uniform() * 10.0).round() / 10.0;
            let s_multi = rng.next_uniform();
            CategoryRecord::new("random", format!("group-{i}"), s_text, s_image, s_multi)
                .unwrap()
        })
        .collect()
}

/// Double-loop counter, independent of the table implementation.
fn brute_force_cell(
    classified: &[ClassifiedRecord],
    interaction: InteractionType,
    dominance: Dominance,
) -> usize {
    classified
        .iter()
        .filter(|r| r.interaction() == interaction && r.dominance() == dominance)
        .count()
}

fn brute_force_dominance_count(classified: &[ClassifiedRecord], dominance: Dominance) -> usize {
    classified.iter().filter(|r| r.dominance() == dominance).count()
}

fn brute_force_interaction_count(
    classified: &[ClassifiedRecord],
    interaction: InteractionType,
) -> usize {
    classified
        .iter()
        .filter(|r| r.interaction() == interaction && r.dominance() != Dominance::Tie)
        .count()
}

#[test]
fn tables_match_brute_force_counter_on_random_datasets() {
    let mut rng = SplitMix64::new(2024);
    for round in 0..200 {
        let size = 1 + (rng.next_u64() % 50) as usize;
        let records = random_dataset(&mut rng, size);
        let classified = classify_dataset(&records, TieEpsilon::ZERO).unwrap();

        let given_dominance =
            conditional_table(&classified, TableDirection::InteractionGivenDominance).unwrap();
        let given_interaction =
            conditional_table(&classified, TableDirection::DominanceGivenInteraction).unwrap();

        let ties = classified
            .iter()
            .filter(|r| r.dominance() == Dominance::Tie)
            .count();
        assert_eq!(given_dominance.tie_count(), ties, "round {round}");
        assert_eq!(given_interaction.tie_count(), ties, "round {round}");

        for dominance in Dominance::STRATA {
            let stratum = brute_force_dominance_count(&classified, dominance);
            assert_eq!(
                given_dominance.stratum_count(Label::Dominance(dominance)),
                Some(stratum),
                "round {round}"
            );
            for interaction in InteractionType::ALL {
                let joint = brute_force_cell(&classified, interaction, dominance);
                let got = given_dominance.probability(
                    Label::Dominance(dominance),
                    Label::Interaction(interaction),
                );
                if stratum == 0 {
                    assert_eq!(got, None, "round {round}: empty stratum must be undefined");
                } else {
                    assert_eq!(got, Some(joint as f64 / stratum as f64), "round {round}");
                }
            }
        }

        for interaction in InteractionType::ALL {
            let stratum = brute_force_interaction_count(&classified, interaction);
            assert_eq!(
                given_interaction.stratum_count(Label::Interaction(interaction)),
                Some(stratum),
                "round {round}"
            );
            for dominance in Dominance::STRATA {
                let joint = brute_force_cell(&classified, interaction, dominance);
                let got = given_interaction.probability(
                    Label::Interaction(interaction),
                    Label::Dominance(dominance),
                );
                if stratum == 0 {
                    assert_eq!(got, None, "round {round}");
                } else {
                    assert_eq!(got, Some(joint as f64 / stratum as f64), "round {round}");
                }
            }
        }
    }
}

#[test]
fn rows_are_stochastic_and_counts_conserved() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..200 {
        let size = 1 + (rng.next_u64() % 50) as usize;
        let records = random_dataset(&mut rng, size);
        let classified = classify_dataset(&records, TieEpsilon::ZERO).unwrap();
        for direction in [
            TableDirection::InteractionGivenDominance,
            TableDirection::DominanceGivenInteraction,
        ] {
            let table = conditional_table(&classified, direction).unwrap();
            let stratum_total: usize = table.rows().iter().map(|row| row.count()).sum();
            assert_eq!(stratum_total + table.tie_count(), classified.len());
            for row in table.rows() {
                if let Some(cells) = row.probabilities() {
                    let sum: f64 = cells.iter().map(|(_, p)| p).sum();
                    assert!((sum - 1.0).abs() <= 1e-12, "row sum {sum}");
                } else {
                    assert_eq!(row.count(), 0);
                }
            }
        }
    }
}

#[test]
fn bayes_consistency_from_empirical_marginals() {
    let mut rng = SplitMix64::new(4242);
    for round in 0..200 {
        let size = 1 + (rng.next_u64() % 50) as usize;
        let records = random_dataset(&mut rng, size);
        let classified = classify_dataset(&records, TieEpsilon::ZERO).unwrap();

        let given_dominance =
            conditional_table(&classified, TableDirection::InteractionGivenDominance).unwrap();
        let given_interaction =
            conditional_table(&classified, TableDirection::DominanceGivenInteraction).unwrap();

        // Marginals over the tie-free sub-dataset that both tables share.
        let active = classified.len() - given_dominance.tie_count();
        if active == 0 {
            continue;
        }
        for dominance in Dominance::STRATA {
            let p_d = given_dominance
                .stratum_count(Label::Dominance(dominance))
                .unwrap() as f64
                / active as f64;
            for interaction in InteractionType::ALL {
                let p_i = given_interaction
                    .stratum_count(Label::Interaction(interaction))
                    .unwrap() as f64
                    / active as f64;
                let p_i_given_d = given_dominance
                    .probability(Label::Dominance(dominance), Label::Interaction(interaction));
                let p_d_given_i = given_interaction
                    .probability(Label::Interaction(interaction), Label::Dominance(dominance));
                match (p_i_given_d, p_d_given_i) {
                    (Some(a), Some(b)) => {
                        assert!(
                            (a * p_d - b * p_i).abs() <= 1e-12,
                            "round {round}: P(i|d)P(d) = {} vs P(d|i)P(i) = {}",
                            a * p_d,
                            b * p_i
                        );
                    }
                    // An undefined row means the matching marginal is zero,
                    // so the other side of the identity must vanish too.
                    (None, Some(b)) => assert_eq!(b * p_i, 0.0),
                    (Some(a), None) => assert_eq!(a * p_d, 0.0),
                    (None, None) => {}
                }
            }
        }
    }
}
