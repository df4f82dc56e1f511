//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when `metrics` finds a low-cohesion class,
//! 2 for usage and input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use classplit_core::clustering::{agglomerate, render_dendrogram, DendrogramFormat, Linkage};
use classplit_core::cohesion::{assess, CohesionThresholds, TccMode, View};
use classplit_core::merging::MergeOptions;
use classplit_core::pipeline::{run_matrix_pipeline, run_pipeline, AnalysisConfig};
use classplit_core::similarity::{similarity_matrix, SimilarityMatrix};
use classplit_core::ClassGraph;

use crate::ingest::{parse_input, Input, InputFormat};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_LOW_COHESION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "classplit",
    version,
    about = "Find concept clusters in low-cohesion classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Screen the class and, if it lacks cohesion, propose extracted classes.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        clustering: ClusterArgs,
        #[command(flatten)]
        cohesion: CohesionArgs,
        /// Smallest cluster kept without merging.
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        /// Decompose even when the class passes the cohesion screen.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Report LCOM, TCC and the cohesion verdict.
    Metrics {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cohesion: CohesionArgs,
        #[arg(long, value_enum, default_value_t = DataFormat::Text)]
        format: DataFormat,
    },
    /// Cluster members at a threshold, without merging.
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        clustering: ClusterArgs,
        #[arg(long, value_enum, default_value_t = DataFormat::Text)]
        format: DataFormat,
    },
    /// Print the merge tree.
    Dendrogram {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        clustering: ClusterArgs,
        #[arg(long, value_enum, default_value_t = TreeFormat::Text)]
        format: TreeFormat,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file: .cdl, .json graph or .csv similarity matrix.
    file: PathBuf,
    /// Override the format implied by the file extension.
    #[arg(long, value_enum)]
    input_format: Option<FormatArg>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    /// Similarity cut-off in [0, 1].
    #[arg(long, default_value_t = 0.2)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = LinkageArg::Complete)]
    linkage: LinkageArg,
}

#[derive(Debug, Args)]
struct CohesionArgs {
    /// LCOM above this value counts as low cohesion.
    #[arg(long, default_value_t = 0)]
    lcom_threshold: usize,
    /// TCC below this value counts as low cohesion.
    #[arg(long, default_value_t = 0.5)]
    tcc_threshold: f64,
    #[arg(long, value_enum, default_value_t = TccModeArg::Direct)]
    tcc_mode: TccModeArg,
}

impl CohesionArgs {
    fn thresholds(&self) -> CohesionThresholds {
        CohesionThresholds {
            lcom: self.lcom_threshold,
            tcc: self.tcc_threshold,
            mode: match self.tcc_mode {
                TccModeArg::Direct => TccMode::Direct,
                TccModeArg::Closure => TccMode::Closure,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Cdl,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LinkageArg {
    Single,
    Complete,
    Average,
    Weighted,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Self {
        match l {
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Average => Linkage::Average,
            LinkageArg::Weighted => Linkage::Weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TccModeArg {
    Direct,
    Closure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeFormat {
    Text,
    Dot,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ingest {
        path: String,
        source: crate::ingest::IngestError,
    },
    #[error(transparent)]
    Analysis(#[from] classplit_core::Error),
    #[error("{0}")]
    Usage(String),
}

struct Outcome {
    text: String,
    status: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            status: EXIT_OK,
        }
    }
}

fn load(args: &InputArgs) -> Result<Input, CliError> {
    let path = args.file.display().to_string();
    let format = match args.input_format {
        Some(FormatArg::Cdl) => InputFormat::Cdl,
        Some(FormatArg::Json) => InputFormat::Json,
        Some(FormatArg::Csv) => InputFormat::Csv,
        None => InputFormat::from_path(&args.file).ok_or_else(|| {
            CliError::Usage(format!(
                "{path}: cannot tell the input format from the extension; use --input-format"
            ))
        })?,
    };
    let text = std::fs::read_to_string(&args.file).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    parse_input(&text, format).map_err(|source| CliError::Ingest { path, source })
}

fn class_name_from(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("Matrix")
        .to_string()
}

fn matrix_of(input: &Input) -> Result<SimilarityMatrix, CliError> {
    match input {
        Input::Graph(g) => Ok(similarity_matrix(g)?),
        Input::Matrix(m) => Ok(m.clone()),
    }
}

fn require_graph(input: Input, what: &str) -> Result<ClassGraph, CliError> {
    match input {
        Input::Graph(g) => Ok(g),
        Input::Matrix(_) => Err(CliError::Usage(format!(
            "{what} needs a member graph (.cdl or .json), not a similarity matrix"
        ))),
    }
}

fn execute(command: &Command) -> Result<(Outcome, &InputArgs), CliError> {
    match command {
        Command::Analyze {
            input,
            clustering,
            cohesion,
            min_size,
            force,
            format,
        } => {
            let config = AnalysisConfig {
                threshold: clustering.threshold,
                linkage: clustering.linkage.into(),
                merge: MergeOptions {
                    min_size: *min_size,
                    ..MergeOptions::default()
                },
                cohesion: cohesion.thresholds(),
                force: *force,
            };
            config.validate()?;
            let loaded = load(input)?;
            if *format == ReportFormat::Dot {
                let matrix = matrix_of(&loaded)?;
                let cut = agglomerate(&matrix, config.linkage, config.threshold)?;
                return Ok((
                    Outcome::ok(render_dendrogram(&cut.dendrogram, DendrogramFormat::Dot)),
                    input,
                ));
            }
            let report = match &loaded {
                Input::Graph(g) => run_pipeline(g, &config)?,
                Input::Matrix(m) => run_matrix_pipeline(&class_name_from(&input.file), m, &config)?,
            };
            let text = match format {
                ReportFormat::Json => report::to_json(&report),
                _ => report::render_text(&report),
            };
            Ok((Outcome::ok(text), input))
        }
        Command::Metrics {
            input,
            cohesion,
            format,
        } => {
            let thresholds = cohesion.thresholds();
            if !(0.0..=1.0).contains(&thresholds.tcc) {
                return Err(classplit_core::Error::InvalidThreshold(thresholds.tcc).into());
            }
            let graph = require_graph(load(input)?, "metrics")?;
            let result = assess(View::whole(&graph), &thresholds);
            let text = match format {
                DataFormat::Text => report::metrics_text(graph.class_name(), &result),
                DataFormat::Json => report::to_json(&serde_json::json!({
                    "schema": classplit_core::pipeline::REPORT_SCHEMA,
                    "class_name": graph.class_name(),
                    "cohesion": result,
                })),
            };
            let status = if result.is_low() {
                EXIT_LOW_COHESION
            } else {
                EXIT_OK
            };
            Ok((Outcome { text, status }, input))
        }
        Command::Cluster {
            input,
            clustering,
            format,
        } => {
            let loaded = load(input)?;
            let matrix = matrix_of(&loaded)?;
            let cut = agglomerate(&matrix, clustering.linkage.into(), clustering.threshold)?;
            let clusters: Vec<Vec<&str>> = cut
                .partition
                .clusters()
                .iter()
                .map(|c| {
                    c.members
                        .iter()
                        .map(|&m| matrix.label(m).name.as_str())
                        .collect()
                })
                .collect();
            let text = match format {
                DataFormat::Text => {
                    let mut out = format!(
                        "{} clusters at threshold {:.2} ({} linkage)\n",
                        clusters.len(),
                        cut.threshold,
                        cut.linkage
                    );
                    for (c, names) in cut.partition.clusters().iter().zip(&clusters) {
                        out.push_str(&format!("  cluster {}: {}\n", c.id, names.join(", ")));
                    }
                    out
                }
                DataFormat::Json => report::to_json(&serde_json::json!({
                    "schema": classplit_core::pipeline::REPORT_SCHEMA,
                    "threshold": cut.threshold,
                    "linkage": cut.linkage,
                    "clusters": cut.partition.clusters().iter().zip(&clusters)
                        .map(|(c, names)| serde_json::json!({"id": c.id, "members": names}))
                        .collect::<Vec<_>>(),
                })),
            };
            Ok((Outcome::ok(text), input))
        }
        Command::Dendrogram {
            input,
            clustering,
            format,
        } => {
            let matrix = matrix_of(&load(input)?)?;
            let cut = agglomerate(&matrix, clustering.linkage.into(), clustering.threshold)?;
            let format = match format {
                TreeFormat::Text => DendrogramFormat::Text,
                TreeFormat::Dot => DendrogramFormat::Dot,
            };
            Ok((
                Outcome::ok(render_dendrogram(&cut.dendrogram, format)),
                input,
            ))
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((outcome, input)) => {
            let written = match &input.out {
                Some(path) => std::fs::write(path, &outcome.text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                }),
                None => stdout
                    .write_all(outcome.text.as_bytes())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    }),
            };
            match written {
                Ok(()) => outcome.status,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_ERROR
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
