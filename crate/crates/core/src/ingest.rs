//! Loaders for the three input formats: comma-delimited score tables,
//! line-delimited JSON embedding bundles, and JSON category manifests.
//! Every rejection carries a 1-based line number where one applies.

use std::collections::HashMap;
use std::io::BufRead;

use serde::Deserialize;
use thiserror::Error;

use crate::domain::{BiasScore, CategoryRecord, DomainError};
use crate::embed::{AnchorSet, EmbedError, EmbeddingVector, Modality, TargetGroupEmbeddings};
use crate::sim::{CategoryManifest, ManifestEntry, ScoreRange, SimError};

/// Fixed header of the scores file format.
pub const SCORES_HEADER: &str = "class,group,s_text,s_image,s_multi";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("no records")]
    NoRecords,
    #[error("line 1: malformed header: expected `{SCORES_HEADER}`, found `{found}`")]
    MalformedHeader { found: String },
    #[error("line {line}: expected {expected} comma-separated fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column} ({field}): cannot parse `{text}` as a number")]
    NumberParse {
        line: usize,
        column: usize,
        field: &'static str,
        text: String,
    },
    #[error("line {line}: {source}")]
    Score { line: usize, source: DomainError },
    #[error("line {line}: duplicate group {class_name}/{group_name} (first seen on line {first_line})")]
    DuplicateGroup {
        line: usize,
        first_line: usize,
        class_name: String,
        group_name: String,
    },
    #[error("line {line}: invalid record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid modality `{token}` (expected text, image, anchor_pleasant or anchor_unpleasant)")]
    InvalidModality { line: usize, token: String },
    #[error("line {line}: vector dimension {dim} does not match dimension {expected} from line {first_line}")]
    DimensionMismatch {
        line: usize,
        dim: usize,
        expected: usize,
        first_line: usize,
    },
    #[error("line {line}: anchor records must leave class and group empty")]
    AnchorIdentity { line: usize },
    #[error("line {line}: {source}")]
    Vector { line: usize, source: EmbedError },
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("manifest: {source}")]
    Manifest { source: SimError },
    #[error("manifest: {message}")]
    ManifestSyntax { message: String },
}

impl IngestError {
    /// The 1-based input line the error points at, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            IngestError::MalformedHeader { .. } => Some(1),
            IngestError::FieldCount { line, .. }
            | IngestError::NumberParse { line, .. }
            | IngestError::Score { line, .. }
            | IngestError::DuplicateGroup { line, .. }
            | IngestError::Malformed { line, .. }
            | IngestError::InvalidModality { line, .. }
            | IngestError::DimensionMismatch { line, .. }
            | IngestError::AnchorIdentity { line, .. }
            | IngestError::Vector { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Parse a scores file: fixed header, then one record per line. Scores
/// must be finite reals in `[0, 1]` and (class, group) pairs unique.
pub fn load_scores(reader: impl BufRead) -> Result<Vec<CategoryRecord>, IngestError> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        None => return Err(IngestError::NoRecords),
        Some(line) => line?,
    };
    if header.trim_end_matches('\r') != SCORES_HEADER {
        return Err(IngestError::MalformedHeader {
            found: header.trim_end_matches('\r').to_string(),
        });
    }

    const SCORE_FIELDS: [&str; 3] = ["s_text", "s_image", "s_multi"];
    let mut records = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for (index, line) in lines.enumerate() {
        let line_no = index + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(IngestError::FieldCount {
                line: line_no,
                expected: 5,
                found: fields.len(),
            });
        }
        let mut scores = [0.0f64; 3];
        for (i, slot) in scores.iter_mut().enumerate() {
            let text = fields[i + 2];
            *slot = text.parse().map_err(|_| IngestError::NumberParse {
                line: line_no,
                column: i + 3,
                field: SCORE_FIELDS[i],
                text: text.to_string(),
            })?;
        }
        let parse_score = |field_index: usize| {
            BiasScore::named(SCORE_FIELDS[field_index], scores[field_index])
                .map_err(|source| IngestError::Score { line: line_no, source })
        };
        let s_text = parse_score(0)?;
        let s_image = parse_score(1)?;
        let s_multi = parse_score(2)?;

        let key = (fields[0].to_string(), fields[1].to_string());
        if let Some(&first_line) = seen.get(&key) {
            return Err(IngestError::DuplicateGroup {
                line: line_no,
                first_line,
                class_name: key.0,
                group_name: key.1,
            });
        }
        seen.insert(key, line_no);

        records.push(CategoryRecord {
            class_name: fields[0].to_string(),
            group_name: fields[1].to_string(),
            s_text,
            s_image,
            s_multi,
        });
    }

    if records.is_empty() {
        return Err(IngestError::NoRecords);
    }
    Ok(records)
}

#[derive(Deserialize)]
struct EmbeddingRow {
    #[serde(default)]
    class: String,
    #[serde(default)]
    group: String,
    modality: String,
    vector: Vec<f64>,
}

/// Parse an embeddings bundle: one JSON object per line with keys
/// `class`, `group`, `modality`, `vector`. All vectors must share one
/// dimension; at least one pleasant and one unpleasant anchor must be
/// present.
pub fn load_embeddings(
    reader: impl BufRead,
) -> Result<(AnchorSet, Vec<TargetGroupEmbeddings>), IngestError> {
    let mut pleasant = Vec::new();
    let mut unpleasant = Vec::new();
    // Group vectors keyed by (class, group, modality), first-seen order.
    let mut group_order: Vec<(String, String, Modality)> = Vec::new();
    let mut group_vectors: HashMap<(String, String, Modality), Vec<EmbeddingVector>> =
        HashMap::new();
    let mut reference: Option<(usize, usize)> = None; // (dim, line)

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: EmbeddingRow =
            serde_json::from_str(&line).map_err(|err| IngestError::Malformed {
                line: line_no,
                message: err.to_string(),
            })?;

        let dim = row.vector.len();
        match reference {
            None => reference = Some((dim, line_no)),
            Some((expected, first_line)) => {
                if dim != expected {
                    return Err(IngestError::DimensionMismatch {
                        line: line_no,
                        dim,
                        expected,
                        first_line,
                    });
                }
            }
        }
        let vector = EmbeddingVector::new(row.vector)
            .map_err(|source| IngestError::Vector { line: line_no, source })?;

        match row.modality.as_str() {
            "anchor_pleasant" | "anchor_unpleasant" => {
                if !row.class.is_empty() || !row.group.is_empty() {
                    return Err(IngestError::AnchorIdentity { line: line_no });
                }
                if row.modality == "anchor_pleasant" {
                    pleasant.push(vector);
                } else {
                    unpleasant.push(vector);
                }
            }
            "text" | "image" => {
                let modality = if row.modality == "text" {
                    Modality::Text
                } else {
                    Modality::Image
                };
                let key = (row.class, row.group, modality);
                match group_vectors.get_mut(&key) {
                    Some(vectors) => vectors.push(vector),
                    None => {
                        group_order.push(key.clone());
                        group_vectors.insert(key, vec![vector]);
                    }
                }
            }
            other => {
                return Err(IngestError::InvalidModality {
                    line: line_no,
                    token: other.to_string(),
                });
            }
        }
    }

    if reference.is_none() {
        return Err(IngestError::NoRecords);
    }
    let anchors = AnchorSet::new(pleasant, unpleasant)?;
    let groups = group_order
        .into_iter()
        .map(|key| {
            let vectors = group_vectors.remove(&key).unwrap();
            TargetGroupEmbeddings::new(key.0, key.1, key.2, vectors).map_err(IngestError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((anchors, groups))
}

#[derive(Deserialize)]
struct ManifestDoc {
    classes: Vec<ManifestClass>,
}

#[derive(Deserialize)]
struct ManifestClass {
    name: String,
    groups: Vec<ManifestGroup>,
}

#[derive(Deserialize)]
struct ManifestGroup {
    name: String,
    #[serde(default)]
    text_range: Option<[f64; 2]>,
    #[serde(default)]
    image_range: Option<[f64; 2]>,
}

/// Parse a category manifest: a JSON document with a top-level `classes`
/// list, each class holding named groups with optional sampling ranges.
pub fn load_manifest(reader: impl BufRead) -> Result<CategoryManifest, IngestError> {
    let doc: ManifestDoc =
        serde_json::from_reader(reader).map_err(|err| IngestError::ManifestSyntax {
            message: err.to_string(),
        })?;
    let mut entries = Vec::new();
    for class in doc.classes {
        for group in class.groups {
            let mut entry = ManifestEntry::new(class.name.clone(), group.name);
            if let Some([lo, hi]) = group.text_range {
                entry.text_range =
                    Some(ScoreRange::new(lo, hi).map_err(|source| IngestError::Manifest { source })?);
            }
            if let Some([lo, hi]) = group.image_range {
                entry.image_range =
                    Some(ScoreRange::new(lo, hi).map_err(|source| IngestError::Manifest { source })?);
            }
            entries.push(entry);
        }
    }
    CategoryManifest::new(entries).map_err(|source| IngestError::Manifest { source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scores_file(body: &str) -> String {
        format!("{SCORES_HEADER}\n{body}")
    }

    #[test]
    fn loads_extreme_in_range_scores() {
        let input = scores_file(
            "nationality,American,0.994,0.60,0.80\nnationality,Mexican,0.65,0.300,0.45\n",
        );
        let records = load_scores(input.as_bytes()).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].s_text.value(), 0.994);
        assert_eq!(records[1].s_image.value(), 0.300);
    }

    #[test]
    fn header_must_match_exactly() {
        let err = load_scores("class,group,st,si,sm\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::MalformedHeader { .. }));
        assert_eq!(err.line(), Some(1));
    }

    #[test]
    fn empty_stream_reports_no_records() {
        assert!(matches!(
            load_scores("".as_bytes()),
            Err(IngestError::NoRecords)
        ));
        assert!(matches!(
            load_scores(format!("{SCORES_HEADER}\n").as_bytes()),
            Err(IngestError::NoRecords)
        ));
    }

    #[test]
    fn out_of_range_score_cites_line_and_field() {
        let input = scores_file("religion,Hindu,0.5,0.5,0.5\nreligion,Muslim,1.2,0.5,0.5\n");
        match load_scores(input.as_bytes()).unwrap_err() {
            IngestError::Score { line, source } => {
                assert_eq!(line, 3);
                assert_eq!(
                    source,
                    DomainError::OutOfRange {
                        field: "s_text",
                        value: 1.2
                    }
                );
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unparseable_number_cites_line_and_column() {
        let input = scores_file("religion,Hindu,0.5,abc,0.5\n");
        match load_scores(input.as_bytes()).unwrap_err() {
            IngestError::NumberParse {
                line,
                column,
                field,
                text,
            } => {
                assert_eq!((line, column), (2, 4));
                assert_eq!(field, "s_image");
                assert_eq!(text, "abc");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn nan_text_is_rejected_as_not_finite() {
        // `NaN` parses as a float but fails score validation.
        let input = scores_file("religion,Hindu,NaN,0.5,0.5\n");
        match load_scores(input.as_bytes()).unwrap_err() {
            IngestError::Score { line, source } => {
                assert_eq!(line, 2);
                assert!(matches!(source, DomainError::NotFinite { field: "s_text", .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_group_cites_both_lines() {
        let input =
            scores_file("religion,Hindu,0.5,0.5,0.5\nreligion,Jewish,0.4,0.4,0.4\nreligion,Hindu,0.6,0.6,0.6\n");
        match load_scores(input.as_bytes()).unwrap_err() {
            IngestError::DuplicateGroup {
                line, first_line, ..
            } => {
                assert_eq!((first_line, line), (2, 4));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn wrong_field_count_is_rejected() {
        let input = scores_file("religion,Hindu,0.5,0.5\n");
        match load_scores(input.as_bytes()).unwrap_err() {
            IngestError::FieldCount { line, found, .. } => {
                assert_eq!((line, found), (2, 4));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn anchor_line(role: &str, vector: &str) -> String {
        format!(r#"{{"class":"","group":"","modality":"{role}","vector":{vector}}}"#)
    }

    fn group_line(class: &str, group: &str, modality: &str, vector: &str) -> String {
        format!(r#"{{"class":"{class}","group":"{group}","modality":"{modality}","vector":{vector}}}"#)
    }

    #[test]
    fn loads_minimal_embedding_bundle() {
        let input = [
            anchor_line("anchor_pleasant", "[1.0, 0.0]"),
            anchor_line("anchor_pleasant", "[0.8, 0.1]"),
            anchor_line("anchor_unpleasant", "[0.0, 1.0]"),
            anchor_line("anchor_unpleasant", "[0.1, 0.9]"),
            group_line("religion", "Hindu", "text", "[0.5, 0.5]"),
            group_line("religion", "Hindu", "text", "[0.4, 0.6]"),
            group_line("religion", "Hindu", "image", "[0.2, 0.9]"),
        ]
        .join("\n");
        let (anchors, groups) = load_embeddings(input.as_bytes()).unwrap();
        assert_eq!(anchors.pleasant().len(), 2);
        assert_eq!(anchors.unpleasant().len(), 2);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].vectors().len(), 2);
        assert_eq!(groups[0].modality, Modality::Text);
        assert_eq!(groups[1].modality, Modality::Image);
    }

    #[test]
    fn embedding_dimension_mismatch_cites_both_lines() {
        let input = [
            anchor_line("anchor_pleasant", "[1.0, 0.0]"),
            anchor_line("anchor_unpleasant", "[0.0, 1.0]"),
            group_line("c", "g", "text", "[1.0, 2.0, 3.0]"),
        ]
        .join("\n");
        match load_embeddings(input.as_bytes()).unwrap_err() {
            IngestError::DimensionMismatch {
                line,
                dim,
                expected,
                first_line,
            } => {
                assert_eq!((line, dim, expected, first_line), (3, 3, 2, 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_anchor_role_is_rejected() {
        let input = [
            anchor_line("anchor_pleasant", "[1.0, 0.0]"),
            group_line("c", "g", "text", "[1.0, 2.0]"),
        ]
        .join("\n");
        match load_embeddings(input.as_bytes()).unwrap_err() {
            IngestError::Embed(EmbedError::EmptyAnchorRole { role }) => {
                assert_eq!(role, "unpleasant");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn invalid_modality_is_rejected_with_line() {
        let input = group_line("c", "g", "audio", "[1.0]");
        match load_embeddings(input.as_bytes()).unwrap_err() {
            IngestError::InvalidModality { line, token } => {
                assert_eq!(line, 1);
                assert_eq!(token, "audio");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn anchor_rows_must_be_anonymous() {
        let input = group_line("c", "g", "anchor_pleasant", "[1.0]");
        match load_embeddings(input.as_bytes()).unwrap_err() {
            IngestError::AnchorIdentity { line } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn default_manifest_document_round_trips() {
        let doc = r#"{
            "classes": [
                {"name": "religion", "groups": [{"name": "Hindu"}, {"name": "Muslim"}]},
                {"name": "nationality", "groups": [
                    {"name": "American", "text_range": [0.5, 0.9]}
                ]}
            ]
        }"#;
        let manifest = load_manifest(doc.as_bytes()).unwrap();
        assert_eq!(manifest.len(), 3);
        assert_eq!(
            manifest.entries()[2].text_range,
            Some(ScoreRange::new(0.5, 0.9).unwrap())
        );
    }

    #[test]
    fn manifest_duplicate_and_inverted_range_are_rejected() {
        let dup = r#"{"classes": [{"name": "religion", "groups": [{"name": "Hindu"}, {"name": "Hindu"}]}]}"#;
        match load_manifest(dup.as_bytes()).unwrap_err() {
            IngestError::Manifest { source } => {
                assert!(matches!(source, SimError::DuplicateGroup { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }

        let inverted = r#"{"classes": [{"name": "religion", "groups": [{"name": "Hindu", "text_range": [0.8, 0.2]}]}]}"#;
        match load_manifest(inverted.as_bytes()).unwrap_err() {
            IngestError::Manifest { source } => {
                assert_eq!(source, SimError::InvalidRange { lo: 0.8, hi: 0.2 });
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    proptest! {
        // Any single corrupted data line is rejected with that exact line
        // number.
        #[test]
        fn corruption_is_located_precisely(
            target in 0usize..6,
            kind in 0usize..3,
        ) {
            let mut lines: Vec<String> = (0..6)
                .map(|i| format!("class,group-{i},0.5,0.5,0.5"))
                .collect();
            let expected_line = target + 2;
            lines[target] = match kind {
                0 => format!("class,group-{target},0.5,oops,0.5"),
                1 => format!("class,group-{target},1.7,0.5,0.5"),
                _ => format!("class,group-{target},0.5,0.5"),
            };
            let input = format!("{SCORES_HEADER}\n{}\n", lines.join("\n"));
            let err = load_scores(input.as_bytes()).unwrap_err();
            prop_assert_eq!(err.line(), Some(expected_line));
        }
    }
}
