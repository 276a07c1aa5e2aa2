//! Deterministic machine-readable summaries and score exports.
//!
//! Documents carry a run-metadata block so any output is reproducible
//! from its own header. In deterministic mode (the default) no wall-clock
//! field is emitted; byte-identical inputs give byte-identical documents.
//! Numbers are serialized with 17 significant digits so every value
//! round-trips exactly.

use thiserror::Error;

use crate::analysis::{InteractionMeans, InteractionMix, Label, ProbabilityTable};
use crate::domain::{ClassifiedRecord, CategoryRecord, InteractionType, TieEpsilon};
use crate::sim::SimConfig;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("chart series is empty")]
    EmptySeries,
    #[error("series `{name}` has {len} values for {labels} labels")]
    LengthMismatch {
        name: String,
        len: usize,
        labels: usize,
    },
    #[error("series `{name}` value {value} must be finite and in [0, 1]")]
    InvalidValue { name: String, value: f64 },
    #[error("{field} `{value}` must not contain commas or line breaks")]
    InvalidName { field: &'static str, value: String },
}

/// FNV-1a over the raw input bytes; stable across platforms.
pub fn fingerprint(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &byte in bytes {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Simulation parameters echoed into a report, plus how many fused
/// scores hit the `[0, 1]` clamp during the run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEcho {
    pub config: SimConfig,
    pub clamp_events: usize,
}

/// Provenance block present in every emitted document.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub version: String,
    pub input_fingerprint: u64,
    pub tie_epsilon: TieEpsilon,
    pub sim: Option<SimEcho>,
    /// Unix seconds as text; only set outside deterministic mode.
    pub timestamp: Option<String>,
}

impl RunMetadata {
    pub fn new(input_fingerprint: u64, tie_epsilon: TieEpsilon) -> Self {
        RunMetadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_fingerprint,
            tie_epsilon,
            sim: None,
            timestamp: None,
        }
    }

    pub fn with_sim(mut self, echo: SimEcho) -> Self {
        self.sim = Some(echo);
        self
    }

    pub fn with_timestamp(mut self, timestamp: String) -> Self {
        self.timestamp = Some(timestamp);
        self
    }
}

/// Output encodings of the summary document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryFormat {
    /// A single JSON document with fixed key order.
    Structured,
    /// `section,key,value` rows mirroring the scores-file conventions.
    Delimited,
}

/// 17 significant digits; round-trips any f64 exactly.
fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn json_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Render the analysis results plus metadata as one document.
pub fn render_summary(
    mix: &InteractionMix,
    tables: &[ProbabilityTable],
    means: &InteractionMeans,
    meta: &RunMetadata,
    format: SummaryFormat,
) -> String {
    match format {
        SummaryFormat::Structured => render_structured(mix, tables, means, meta),
        SummaryFormat::Delimited => render_delimited(mix, tables, means, meta),
    }
}

fn render_structured(
    mix: &InteractionMix,
    tables: &[ProbabilityTable],
    means: &InteractionMeans,
    meta: &RunMetadata,
) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"meta\": {\n");
    out.push_str(&format!(
        "    \"version\": \"{}\",\n",
        json_escape(&meta.version)
    ));
    out.push_str(&format!(
        "    \"input_fingerprint\": \"{:016x}\",\n",
        meta.input_fingerprint
    ));
    out.push_str(&format!(
        "    \"tie_epsilon\": {},\n",
        fmt_f64(meta.tie_epsilon.value())
    ));
    match &meta.sim {
        None => out.push_str("    \"sim\": null,\n"),
        Some(echo) => {
            out.push_str("    \"sim\": {\n");
            out.push_str(&format!("      \"seed\": {},\n", echo.config.seed));
            out.push_str(&format!(
                "      \"w_text\": {},\n",
                fmt_f64(echo.config.w_text())
            ));
            out.push_str(&format!(
                "      \"noise_sigma\": {},\n",
                fmt_f64(echo.config.noise_sigma())
            ));
            out.push_str(&format!(
                "      \"text_range\": [{}, {}],\n",
                fmt_f64(echo.config.text_range.lo()),
                fmt_f64(echo.config.text_range.hi())
            ));
            out.push_str(&format!(
                "      \"image_range\": [{}, {}],\n",
                fmt_f64(echo.config.image_range.lo()),
                fmt_f64(echo.config.image_range.hi())
            ));
            out.push_str(&format!(
                "      \"clamp_events\": {}\n",
                echo.clamp_events
            ));
            out.push_str("    },\n");
        }
    }
    match &meta.timestamp {
        None => out.push_str("    \"timestamp\": null\n"),
        Some(ts) => out.push_str(&format!("    \"timestamp\": \"{}\"\n", json_escape(ts))),
    }
    out.push_str("  },\n");

    out.push_str("  \"interaction_mix\": {\n");
    out.push_str(&format!("    \"total\": {},\n", mix.total()));
    out.push_str("    \"counts\": {");
    push_interaction_map(&mut out, |t| mix.count(t).to_string());
    out.push_str("},\n    \"proportions\": {");
    push_interaction_map(&mut out, |t| fmt_f64(mix.proportion(t)));
    out.push_str("}\n  },\n");

    out.push_str("  \"tables\": [\n");
    for (i, table) in tables.iter().enumerate() {
        out.push_str("    {\n");
        out.push_str(&format!(
            "      \"direction\": \"{}\",\n",
            table.direction().token()
        ));
        out.push_str(&format!("      \"tie_count\": {},\n", table.tie_count()));
        out.push_str("      \"rows\": [\n");
        for (j, row) in table.rows().iter().enumerate() {
            out.push_str("        {");
            out.push_str(&format!(
                "\"condition\": \"{}\", \"count\": {}, \"probabilities\": ",
                row.condition().token(),
                row.count()
            ));
            match row.probabilities() {
                None => out.push_str("null"),
                Some(cells) => {
                    out.push('{');
                    for (k, (label, p)) in cells.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&format!("\"{}\": {}", label.token(), fmt_f64(*p)));
                    }
                    out.push('}');
                }
            }
            out.push('}');
            if j + 1 < table.rows().len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("      ]\n    }");
        if i + 1 < tables.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ],\n");

    out.push_str("  \"interaction_means\": {\n");
    for (i, label) in InteractionType::ALL.iter().enumerate() {
        out.push_str(&format!("    \"{}\": ", label.token()));
        match means.means(*label) {
            None => out.push_str("null"),
            Some(m) => out.push_str(&format!(
                "{{\"count\": {}, \"s_text\": {}, \"s_image\": {}, \"s_multi\": {}}}",
                m.count,
                fmt_f64(m.s_text),
                fmt_f64(m.s_image),
                fmt_f64(m.s_multi)
            )),
        }
        if i + 1 < InteractionType::ALL.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  }\n}\n");
    out
}

fn push_interaction_map(out: &mut String, mut value: impl FnMut(InteractionType) -> String) {
    for (i, label) in InteractionType::ALL.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("\"{}\": {}", label.token(), value(*label)));
    }
}

fn render_delimited(
    mix: &InteractionMix,
    tables: &[ProbabilityTable],
    means: &InteractionMeans,
    meta: &RunMetadata,
) -> String {
    let mut out = String::from("section,key,value\n");
    out.push_str(&format!("meta,version,{}\n", meta.version));
    out.push_str(&format!(
        "meta,input_fingerprint,{:016x}\n",
        meta.input_fingerprint
    ));
    out.push_str(&format!(
        "meta,tie_epsilon,{}\n",
        fmt_f64(meta.tie_epsilon.value())
    ));
    if let Some(echo) = &meta.sim {
        out.push_str(&format!("meta,sim.seed,{}\n", echo.config.seed));
        out.push_str(&format!(
            "meta,sim.w_text,{}\n",
            fmt_f64(echo.config.w_text())
        ));
        out.push_str(&format!(
            "meta,sim.noise_sigma,{}\n",
            fmt_f64(echo.config.noise_sigma())
        ));
        out.push_str(&format!(
            "meta,sim.text_range,{} {}\n",
            fmt_f64(echo.config.text_range.lo()),
            fmt_f64(echo.config.text_range.hi())
        ));
        out.push_str(&format!(
            "meta,sim.image_range,{} {}\n",
            fmt_f64(echo.config.image_range.lo()),
            fmt_f64(echo.config.image_range.hi())
        ));
        out.push_str(&format!("meta,sim.clamp_events,{}\n", echo.clamp_events));
    }
    if let Some(ts) = &meta.timestamp {
        out.push_str(&format!("meta,timestamp,{ts}\n"));
    }

    out.push_str(&format!("mix,total,{}\n", mix.total()));
    for label in InteractionType::ALL {
        out.push_str(&format!("mix,count.{},{}\n", label.token(), mix.count(label)));
    }
    for label in InteractionType::ALL {
        out.push_str(&format!(
            "mix,proportion.{},{}\n",
            label.token(),
            fmt_f64(mix.proportion(label))
        ));
    }

    for table in tables {
        let section = format!("table.{}", table.direction().token());
        out.push_str(&format!("{section},tie_count,{}\n", table.tie_count()));
        for row in table.rows() {
            out.push_str(&format!(
                "{section},count.{},{}\n",
                row.condition().token(),
                row.count()
            ));
            match row.probabilities() {
                None => out.push_str(&format!(
                    "{section},p.{},undefined\n",
                    row.condition().token()
                )),
                Some(cells) => {
                    for (label, p) in cells {
                        out.push_str(&format!(
                            "{section},p.{}.{},{}\n",
                            row.condition().token(),
                            label.token(),
                            fmt_f64(*p)
                        ));
                    }
                }
            }
        }
    }

    for label in InteractionType::ALL {
        match means.means(label) {
            None => out.push_str(&format!("means,{},undefined\n", label.token())),
            Some(m) => {
                out.push_str(&format!("means,{}.count,{}\n", label.token(), m.count));
                out.push_str(&format!(
                    "means,{}.s_text,{}\n",
                    label.token(),
                    fmt_f64(m.s_text)
                ));
                out.push_str(&format!(
                    "means,{}.s_image,{}\n",
                    label.token(),
                    fmt_f64(m.s_image)
                ));
                out.push_str(&format!(
                    "means,{}.s_multi,{}\n",
                    label.token(),
                    fmt_f64(m.s_multi)
                ));
            }
        }
    }
    out
}

fn check_name(field: &'static str, value: &str) -> Result<(), ReportError> {
    if value.contains(',') || value.contains('\n') || value.contains('\r') {
        return Err(ReportError::InvalidName {
            field,
            value: value.to_string(),
        });
    }
    Ok(())
}

/// Export records in the scores-file format; `load_scores` reads the
/// result back value-exactly.
pub fn write_scores(records: &[CategoryRecord]) -> Result<String, ReportError> {
    let mut out = String::from(crate::ingest::SCORES_HEADER);
    out.push('\n');
    for record in records {
        check_name("class", &record.class_name)?;
        check_name("group", &record.group_name)?;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            record.class_name,
            record.group_name,
            record.s_text.value(),
            record.s_image.value(),
            record.s_multi.value()
        ));
    }
    Ok(out)
}

/// Export labeled records: the scores columns plus interaction and
/// dominance labels.
pub fn write_classified(classified: &[ClassifiedRecord]) -> Result<String, ReportError> {
    let mut out = String::from("class,group,s_text,s_image,s_multi,interaction,dominance\n");
    for row in classified {
        let record = row.record();
        check_name("class", &record.class_name)?;
        check_name("group", &record.group_name)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            record.class_name,
            record.group_name,
            record.s_text.value(),
            record.s_image.value(),
            record.s_multi.value(),
            row.interaction().token(),
            row.dominance().token()
        ));
    }
    Ok(out)
}

/// Chart row data for the dominance-by-interaction figure: one label per
/// defined interaction stratum, with text/image probabilities as series.
pub fn dominance_chart_series(table: &ProbabilityTable) -> Result<crate::chart::ChartSeries, ReportError> {
    let mut labels = Vec::new();
    let mut text = Vec::new();
    let mut image = Vec::new();
    for row in table.rows() {
        if let Some(cells) = row.probabilities() {
            labels.push(row.condition().title().to_string());
            for (label, p) in cells {
                match label {
                    Label::Dominance(crate::domain::Dominance::TextDominant) => text.push(*p),
                    Label::Dominance(crate::domain::Dominance::ImageDominant) => image.push(*p),
                    _ => {}
                }
            }
        }
    }
    crate::chart::ChartSeries::new(
        "Proportion of cases by text vs image dominance",
        labels,
        vec![
            ("text dominant".to_string(), text),
            ("image dominant".to_string(), image),
        ],
    )
}

/// Chart row data for the per-category score figure: one label per
/// record, three series (text, image, multimodal).
pub fn scores_chart_series(records: &[CategoryRecord]) -> Result<crate::chart::ChartSeries, ReportError> {
    let labels: Vec<String> = records.iter().map(|r| r.group_name.clone()).collect();
    let take = |f: fn(&CategoryRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    crate::chart::ChartSeries::new(
        "Bias scores across categories",
        labels,
        vec![
            ("text".to_string(), take(|r| r.s_text.value())),
            ("image".to_string(), take(|r| r.s_image.value())),
            ("multimodal".to_string(), take(|r| r.s_multi.value())),
        ],
    )
}

/// Chart row data for the average-scores-by-interaction figure, covering
/// the labels that have records.
pub fn means_chart_series(means: &InteractionMeans) -> Result<crate::chart::ChartSeries, ReportError> {
    let mut labels = Vec::new();
    let mut text = Vec::new();
    let mut image = Vec::new();
    let mut multi = Vec::new();
    for label in InteractionType::ALL {
        if let Some(m) = means.means(label) {
            labels.push(label.title().to_string());
            text.push(m.s_text);
            image.push(m.s_image);
            multi.push(m.s_multi);
        }
    }
    crate::chart::ChartSeries::new(
        "Average bias scores by interaction type",
        labels,
        vec![
            ("text".to_string(), text),
            ("image".to_string(), image),
            ("multimodal".to_string(), multi),
        ],
    )
}
