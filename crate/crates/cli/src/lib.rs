//! Command-line front-end wiring ingest, scoring or simulation, analysis,
//! and reporting into composable subcommands.
//!
//! Exit codes: 0 on success, 1 on validation errors, 2 on I/O errors.
//! Diagnostics go to stderr; data goes to files or stdout only.

use std::collections::HashMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use biaslens_core::{
    classify_dataset, conditional_table, dominance_chart_series, fingerprint, interaction_means,
    interaction_mix, load_embeddings, load_manifest, load_scores, means_chart_series, modality_bias,
    render_bar_chart, render_summary, scores_chart_series, simulate_dataset, write_classified,
    write_scores, CategoryManifest, CategoryRecord, ChartStyle, ClassifiedRecord, IngestError,
    Modality, RunMetadata, ScoreRange, SimConfig, SimEcho, SummaryFormat, TableDirection,
    TieEpsilon,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad input data or arguments; exit code 1.
    Validation(String),
    /// Filesystem failures; exit code 2.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(message) | CliError::Io(message) => message,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        match err {
            IngestError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::Validation(err.to_string())
            }
        })*
    };
}

validation_from!(
    biaslens_core::DomainError,
    biaslens_core::SimError,
    biaslens_core::AnalysisError,
    biaslens_core::ReportError,
    biaslens_core::EmbedError
);

#[derive(Parser, Debug)]
#[command(
    name = "biaslens",
    version,
    about = "Audit bias interactions between text and image modalities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a scores dataset from a category manifest
    Simulate(SimulateArgs),
    /// Score an embeddings bundle into a scores dataset
    Score(ScoreArgs),
    /// Annotate a scores dataset with interaction and dominance labels
    Classify(ClassifyArgs),
    /// Reduce a scores dataset to a summary document
    Analyze(AnalyzeArgs),
    /// Render bar charts from a scores dataset
    Chart(ChartArgs),
    /// Full chain: simulate, classify, analyze, chart
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Manifest path, or `default` for the bundled 14-group taxonomy
    #[arg(long, default_value = "default")]
    pub manifest: String,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Text weight in the fusion rule; image weight is its complement
    #[arg(long = "w-text", default_value_t = 0.5)]
    pub w_text: f64,
    /// Standard deviation of the additive fusion noise
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Output directory for scores.csv (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Embeddings bundle (one JSON object per line)
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Derive s_multi with the weighted fusion rule
    #[arg(long, conflicts_with = "scores")]
    pub fuse: bool,
    /// Take s_multi from this scores file, matched by (class, group)
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Text weight for --fuse
    #[arg(long = "w-text", default_value_t = 0.5)]
    pub w_text: f64,
    /// Noise sigma for --fuse (0 keeps scoring purely measured)
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Seed for --fuse noise draws when sigma > 0
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for scores.csv (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Scores dataset to annotate
    #[arg(long)]
    pub scores: PathBuf,
    /// Tolerance below which the unimodal scores count as tied
    #[arg(long = "tie-epsilon", default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Output directory for classified.csv (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Scores dataset to analyze
    #[arg(long)]
    pub scores: PathBuf,
    /// Tolerance below which the unimodal scores count as tied
    #[arg(long = "tie-epsilon", default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Which conditional table direction(s) to include
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    pub direction: DirectionArg,
    /// Summary encoding
    #[arg(long, value_enum, default_value_t = FormatArg::Structured)]
    pub format: FormatArg,
    /// Omit wall-clock metadata so identical runs are byte-identical (default)
    #[arg(long, conflicts_with = "timestamps")]
    pub deterministic: bool,
    /// Stamp the summary with the wall-clock time
    #[arg(long)]
    pub timestamps: bool,
    /// Output directory for the summary (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ChartArgs {
    /// Scores dataset to chart
    #[arg(long)]
    pub scores: PathBuf,
    /// Tolerance below which the unimodal scores count as tied
    #[arg(long = "tie-epsilon", default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Output directory for the SVG files
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Manifest path, or `default` for the bundled 14-group taxonomy
    #[arg(long, default_value = "default")]
    pub manifest: String,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Text weight in the fusion rule; image weight is its complement
    #[arg(long = "w-text", default_value_t = 0.5)]
    pub w_text: f64,
    /// Standard deviation of the additive fusion noise
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    /// Tolerance below which the unimodal scores count as tied
    #[arg(long = "tie-epsilon", default_value_t = 0.0)]
    pub tie_epsilon: f64,
    /// Which conditional table direction(s) to include
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    pub direction: DirectionArg,
    /// Summary encoding
    #[arg(long, value_enum, default_value_t = FormatArg::Structured)]
    pub format: FormatArg,
    /// Omit wall-clock metadata so identical runs are byte-identical (default)
    #[arg(long, conflicts_with = "timestamps")]
    pub deterministic: bool,
    /// Stamp the summary with the wall-clock time
    #[arg(long)]
    pub timestamps: bool,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionArg {
    /// P(interaction | dominance) only
    GivenDominance,
    /// P(dominance | interaction) only
    GivenInteraction,
    /// Both directions, dominance-conditioned first
    Both,
}

impl DirectionArg {
    fn directions(self) -> Vec<TableDirection> {
        match self {
            DirectionArg::GivenDominance => vec![TableDirection::InteractionGivenDominance],
            DirectionArg::GivenInteraction => vec![TableDirection::DominanceGivenInteraction],
            DirectionArg::Both => vec![
                TableDirection::InteractionGivenDominance,
                TableDirection::DominanceGivenInteraction,
            ],
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Structured,
    Delimited,
}

impl FormatArg {
    fn format(self) -> SummaryFormat {
        match self {
            FormatArg::Structured => SummaryFormat::Structured,
            FormatArg::Delimited => SummaryFormat::Delimited,
        }
    }

    fn summary_file_name(self) -> &'static str {
        match self {
            FormatArg::Structured => "summary.json",
            FormatArg::Delimited => "summary.csv",
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Score(args) => run_score(args),
        Command::Classify(args) => run_classify(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Chart(args) => run_chart(args),
        Command::Audit(args) => run_audit(args),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|err| CliError::Io(format!("cannot read {}: {err}", path.display())))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|err| CliError::Io(format!("cannot create {}: {err}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|err| CliError::Io(format!("cannot write {}: {err}", path.display())))
}

fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => write_output(dir, name, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Manifest source plus the fingerprint of the bytes that define it.
fn resolve_manifest(source: &str) -> Result<(CategoryManifest, u64), CliError> {
    if source == "default" {
        Ok((CategoryManifest::mmbias(), fingerprint(b"manifest:default")))
    } else {
        let bytes = read_file(Path::new(source))?;
        let manifest = load_manifest(BufReader::new(bytes.as_slice()))?;
        Ok((manifest, fingerprint(&bytes)))
    }
}

fn sim_config(seed: u64, w_text: f64, sigma: f64) -> Result<SimConfig, CliError> {
    let range = ScoreRange::new(0.3, 1.0).expect("bundled default range");
    Ok(SimConfig::new(seed, w_text, sigma, range, range)?)
}

fn tie_epsilon(value: f64) -> Result<TieEpsilon, CliError> {
    Ok(TieEpsilon::new(value)?)
}

fn scores_from_file(path: &Path) -> Result<(Vec<CategoryRecord>, u64), CliError> {
    let bytes = read_file(path)?;
    let records = load_scores(BufReader::new(bytes.as_slice()))?;
    Ok((records, fingerprint(&bytes)))
}

fn unix_timestamp() -> String {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|_| "0".to_string())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (manifest, _) = resolve_manifest(&args.manifest)?;
    let config = sim_config(args.seed, args.w_text, args.sigma)?;
    let sim = simulate_dataset(&manifest, &config)?;
    let text = write_scores(&sim.records)?;
    emit(args.out.as_deref(), "scores.csv", &text)
}

fn run_score(args: ScoreArgs) -> Result<(), CliError> {
    let bytes = read_file(&args.embeddings)?;
    let (anchors, groups) = load_embeddings(BufReader::new(bytes.as_slice()))?;

    // Collate per-(class, group) modality scores in first-appearance order.
    let mut order: Vec<(String, String)> = Vec::new();
    let mut by_group: HashMap<(String, String), (Option<f64>, Option<f64>)> = HashMap::new();
    for group in &groups {
        let key = (group.class_name.clone(), group.group_name.clone());
        let entry = match by_group.get_mut(&key) {
            Some(entry) => entry,
            None => {
                order.push(key.clone());
                by_group.entry(key).or_insert((None, None))
            }
        };
        let score = modality_bias(group, &anchors)?.value();
        match group.modality {
            Modality::Text => entry.0 = Some(score),
            Modality::Image => entry.1 = Some(score),
        }
    }

    let multi_source: Option<HashMap<(String, String), f64>> = match &args.scores {
        None => None,
        Some(path) => {
            let (donors, _) = scores_from_file(path)?;
            Some(
                donors
                    .into_iter()
                    .map(|r| ((r.class_name, r.group_name), r.s_multi.value()))
                    .collect(),
            )
        }
    };
    if !args.fuse && multi_source.is_none() {
        return Err(CliError::Validation(
            "no multimodal source: pass --fuse to derive s_multi, or --scores FILE to supply it"
                .into(),
        ));
    }

    let fuse_config = sim_config(args.seed, args.w_text, args.sigma)?;
    let mut noise = biaslens_core::RandomSource::new(args.seed);
    let mut records = Vec::with_capacity(order.len());
    for (class_name, group_name) in order {
        let (text, image) = by_group[&(class_name.clone(), group_name.clone())];
        let s_text = text.ok_or_else(|| {
            CliError::Validation(format!("group {class_name}/{group_name} has no text vectors"))
        })?;
        let s_image = image.ok_or_else(|| {
            CliError::Validation(format!(
                "group {class_name}/{group_name} has no image vectors"
            ))
        })?;
        let s_multi = match &multi_source {
            Some(donor) => *donor
                .get(&(class_name.clone(), group_name.clone()))
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "scores file has no s_multi for {class_name}/{group_name}"
                    ))
                })?,
            None => {
                let draw = if args.sigma > 0.0 { noise.next_gaussian() } else { 0.0 };
                biaslens_core::fuse(
                    biaslens_core::BiasScore::new(s_text)?,
                    biaslens_core::BiasScore::new(s_image)?,
                    &fuse_config,
                    draw,
                )
                .value()
            }
        };
        records.push(CategoryRecord::new(
            class_name, group_name, s_text, s_image, s_multi,
        )?);
    }

    let text = write_scores(&records)?;
    emit(args.out.as_deref(), "scores.csv", &text)
}

fn run_classify(args: ClassifyArgs) -> Result<(), CliError> {
    let (records, _) = scores_from_file(&args.scores)?;
    let classified = classify_dataset(&records, tie_epsilon(args.tie_epsilon)?)?;
    let text = write_classified(&classified)?;
    emit(args.out.as_deref(), "classified.csv", &text)
}

fn build_summary(
    classified: &[ClassifiedRecord],
    directions: &[TableDirection],
    meta: &RunMetadata,
    format: SummaryFormat,
) -> Result<String, CliError> {
    let mix = interaction_mix(classified)?;
    let tables = directions
        .iter()
        .map(|direction| conditional_table(classified, *direction))
        .collect::<Result<Vec<_>, _>>()?;
    let means = interaction_means(classified)?;
    Ok(render_summary(&mix, &tables, &means, meta, format))
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let (records, input_fingerprint) = scores_from_file(&args.scores)?;
    let eps = tie_epsilon(args.tie_epsilon)?;
    let classified = classify_dataset(&records, eps)?;
    let mut meta = RunMetadata::new(input_fingerprint, eps);
    if args.timestamps {
        meta = meta.with_timestamp(unix_timestamp());
    }
    let summary = build_summary(
        &classified,
        &args.direction.directions(),
        &meta,
        args.format.format(),
    )?;
    emit(args.out.as_deref(), args.format.summary_file_name(), &summary)
}

fn render_charts(
    records: &[CategoryRecord],
    classified: &[ClassifiedRecord],
    out: &Path,
) -> Result<(), CliError> {
    let style = ChartStyle::default();
    let scores = scores_chart_series(records)?;
    write_output(out, "bias_scores.svg", &render_bar_chart(&scores, &style))?;

    let means = interaction_means(classified)?;
    let means_series = means_chart_series(&means)?;
    write_output(
        out,
        "interaction_means.svg",
        &render_bar_chart(&means_series, &style),
    )?;

    let table = conditional_table(classified, TableDirection::DominanceGivenInteraction)?;
    if table.rows().iter().all(|row| row.count() == 0) {
        return Err(CliError::Validation(
            "dominance chart is undefined: every record is a dominance tie".into(),
        ));
    }
    let dominance = dominance_chart_series(&table)?;
    write_output(out, "dominance.svg", &render_bar_chart(&dominance, &style))
}

fn run_chart(args: ChartArgs) -> Result<(), CliError> {
    let (records, _) = scores_from_file(&args.scores)?;
    let classified = classify_dataset(&records, tie_epsilon(args.tie_epsilon)?)?;
    render_charts(&records, &classified, &args.out)
}

fn run_audit(args: AuditArgs) -> Result<(), CliError> {
    let (manifest, input_fingerprint) = resolve_manifest(&args.manifest)?;
    let config = sim_config(args.seed, args.w_text, args.sigma)?;
    let sim = simulate_dataset(&manifest, &config)?;
    let eps = tie_epsilon(args.tie_epsilon)?;
    let classified = classify_dataset(&sim.records, eps)?;

    let mut meta = RunMetadata::new(input_fingerprint, eps).with_sim(SimEcho {
        config: config.clone(),
        clamp_events: sim.clamp_events,
    });
    if args.timestamps {
        meta = meta.with_timestamp(unix_timestamp());
    }

    write_output(&args.out, "scores.csv", &write_scores(&sim.records)?)?;
    let summary = build_summary(
        &classified,
        &args.direction.directions(),
        &meta,
        args.format.format(),
    )?;
    write_output(&args.out, args.format.summary_file_name(), &summary)?;
    render_charts(&sim.records, &classified, &args.out)
}
