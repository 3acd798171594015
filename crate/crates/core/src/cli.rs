//! Command-line front end.
//!
//! Every subcommand reads explicit input paths, writes its artifacts
//! atomically (temp file + rename in the target directory) and returns a
//! short summary for stdout. Reports are pretty-printed JSON with a fixed
//! key order, so identical inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::network::{self, GraphStats, LabeledVectors, Measure, Pruning};
use crate::plot::{self, LayerSeries};
use crate::semmap::{
    self, FunctionMatrix, MapDocument, MapScore, MatrixDocument, Provenance, SemanticMap,
};
use crate::store::{self, BundleManifest, Split, TokenRole};
use crate::wic::{
    self, Centering, EvalOptions, LayerEvaluation, RoleComparison, ThresholdGrid, WicPair,
};
use crate::{Error, Result};

/// Environment variable that caps the worker pool size.
pub const WORKERS_ENV: &str = "LEXPROBE_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "lexprobe",
    version,
    about = "Layer-wise lexical semantics probes"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a bundle directory and print its manifest summary.
    BundleCheck {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-layer WiC threshold probe.
    EvalWic {
        #[arg(long)]
        bundle: PathBuf,
        #[command(flatten)]
        data: WicInputs,
        #[command(flatten)]
        probe: ProbeFlags,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compare a target-role bundle with a prev- or final-role bundle.
    CompareRoles {
        #[arg(long)]
        target_bundle: PathBuf,
        #[arg(long)]
        other_bundle: PathBuf,
        #[command(flatten)]
        data: WicInputs,
        #[command(flatten)]
        probe: ProbeFlags,
        #[arg(long)]
        output: PathBuf,
    },
    /// Build a pruned similarity graph over word vectors.
    NetworkBuild {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = 0)]
        layer: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum, default_value_t = MeasureArg::Cosine)]
        measure: MeasureArg,
        #[arg(long)]
        edges_out: PathBuf,
        #[arg(long)]
        stats_out: PathBuf,
    },
    /// Rank words by similarity to b - a + c.
    NetworkAnalogy {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = 0)]
        layer: usize,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 5)]
        topk: usize,
        #[arg(long, value_enum, default_value_t = MeasureArg::Cosine)]
        measure: MeasureArg,
        #[arg(long)]
        output: PathBuf,
    },
    /// Infer a semantic map from a gram/function matrix.
    SemmapInfer {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Greedy)]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = semmap::DEFAULT_MAX_EXACT_FUNCTIONS)]
        max_functions: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score a predicted map against a gold map.
    SemmapScore {
        #[arg(long)]
        predicted: PathBuf,
        /// Gold map file. Defaults to the matrix's gold_edges.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Draw layer-wise accuracy curves from one or more reports.
    PlotLayers {
        #[arg(long = "report", required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::BundleCheck { .. } => "bundle-check",
            Command::EvalWic { .. } => "eval-wic",
            Command::CompareRoles { .. } => "compare-roles",
            Command::NetworkBuild { .. } => "network-build",
            Command::NetworkAnalogy { .. } => "network-analogy",
            Command::SemmapInfer { .. } => "semmap-infer",
            Command::SemmapScore { .. } => "semmap-score",
            Command::PlotLayers { .. } => "plot-layers",
        }
    }
}

#[derive(Debug, Args)]
pub struct WicInputs {
    #[arg(long)]
    pub dev_data: PathBuf,
    #[arg(long)]
    pub dev_gold: PathBuf,
    #[arg(long, requires = "test_gold")]
    pub test_data: Option<PathBuf>,
    #[arg(long, requires = "test_data")]
    pub test_gold: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeFlags {
    /// Subtract the per-layer bundle mean before scoring.
    #[arg(long)]
    pub centered: bool,
    #[arg(long, default_value_t = wic::DEFAULT_GRID_STEP)]
    pub grid_step: f64,
    /// Extend the threshold grid down to -1 (only meaningful with --centered).
    #[arg(long)]
    pub negative_grid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Knn,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Cosine,
    CenteredCosine,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Cosine => Measure::Cosine,
            MeasureArg::CenteredCosine => Measure::CenteredCosine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub manifest: BundleManifest,
    pub records_per_split: BTreeMap<String, usize>,
    pub complete_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub manifest: BundleManifest,
    pub evaluation: LayerEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub target_manifest: BundleManifest,
    pub other_manifest: BundleManifest,
    pub comparison: RoleComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub manifest: BundleManifest,
    pub layer: usize,
    pub construction: network::Construction,
    pub stats: GraphStats,
    /// Component sizes, largest first.
    pub component_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyReport {
    pub layer: usize,
    pub measure: Measure,
    pub a: String,
    pub b: String,
    pub c: String,
    pub hits: Vec<network::AnalogyHit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub predicted_provenance: Provenance,
    pub predicted_edges: usize,
    pub gold_edges: usize,
    pub score: MapScore,
    pub connectivity_violations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum AnyLayerReport {
    Eval(EvalReport),
    Compare(Box<CompareReport>),
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    text
}

/// Writes all files or none: every payload is staged in a temp file next to
/// its destination before any rename happens.
pub fn write_atomic(outputs: &[(&Path, &[u8])]) -> Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    let mut staged = Vec::with_capacity(outputs.len());
    for &(path, bytes) in outputs {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io(path))?;
        tmp.write_all(bytes).map_err(io(path))?;
        tmp.flush().map_err(io(path))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e.error,
        })?;
    }
    Ok(())
}

fn load_pairs(data: &WicInputs) -> Result<Vec<WicPair>> {
    let mut pairs = wic::load_wic(&data.dev_data, Some(&data.dev_gold), Split::Dev)?;
    if let (Some(test), Some(gold)) = (&data.test_data, &data.test_gold) {
        pairs.extend(wic::load_wic(test, Some(gold), Split::Test)?);
    }
    Ok(pairs)
}

fn eval_options(probe: &ProbeFlags) -> Result<EvalOptions> {
    let grid = ThresholdGrid::new(probe.grid_step)?.with_negative(probe.negative_grid);
    if probe.negative_grid && !probe.centered {
        return Err(Error::Usage("--negative-grid requires --centered".into()));
    }
    Ok(EvalOptions {
        centering: if probe.centered {
            Centering::BundleMean
        } else {
            Centering::Off
        },
        grid,
    })
}

fn fmt_acc(v: f64) -> String {
    format!("{:.3}", v)
}

/// Series label: setting, token role when not the target, and a marker for
/// runs without centering.
pub fn series_name(eval: &LayerEvaluation) -> String {
    let mut name = eval.setting.to_string();
    if eval.token_role != TokenRole::Target {
        name.push('_');
        name.push_str(&eval.token_role.to_string());
    }
    if !eval.centered {
        name.push_str(" (uncentered)");
    }
    name
}

/// Test accuracy per layer, falling back to dev accuracy for dev-only runs.
pub fn layer_series(eval: &LayerEvaluation) -> LayerSeries {
    LayerSeries {
        name: series_name(eval),
        points: eval
            .layers
            .iter()
            .map(|r| (r.layer, r.test_accuracy.unwrap_or(r.dev_accuracy)))
            .collect(),
    }
}

fn summarize_eval(eval: &LayerEvaluation) -> String {
    let mut out = format!(
        "best layer by dev accuracy: {} ({})",
        eval.best_by_dev.layer,
        fmt_acc(eval.best_by_dev.accuracy)
    );
    if let Some(best) = eval.best_by_test {
        out.push_str(&format!(
            "\nbest layer by test accuracy (diagnostic): {} ({})",
            best.layer,
            fmt_acc(best.accuracy)
        ));
    }
    out
}

/// Executes one subcommand and returns the text to print on stdout.
pub fn run(config: &RunConfig) -> Result<String> {
    match &config.command {
        Command::BundleCheck { bundle, output } => {
            let b = store::load_bundle(bundle)?;
            let mut per_split = BTreeMap::new();
            for r in &b.records {
                *per_split.entry(r.split.to_string()).or_insert(0) += 1;
            }
            let index = wic::PairRows::new(&b);
            let mut ids: Vec<_> = b
                .records
                .iter()
                .map(|r| (r.split, r.pair_id.as_str()))
                .collect();
            ids.sort();
            ids.dedup();
            let complete_pairs = ids
                .iter()
                .filter(|(split, id)| index.rows(*split, id).is_ok())
                .count();
            let m = &b.manifest;
            let summary = BundleSummary {
                manifest: m.clone(),
                records_per_split: per_split,
                complete_pairs,
            };
            if let Some(path) = output {
                write_atomic(&[(path, to_json(&summary).as_bytes())])?;
            }
            Ok(format!(
                "ok model={} setting={} token_role={} dim={} num_layers={} num_records={} complete_pairs={}",
                m.model_name, m.setting, m.token_role, m.dim, m.num_layers, m.num_records, complete_pairs
            ))
        }
        Command::EvalWic {
            bundle,
            data,
            probe,
            output,
        } => {
            let options = eval_options(probe)?;
            let b = store::load_bundle(bundle)?;
            let pairs = load_pairs(data)?;
            let evaluation = wic::evaluate_layers(&b, &pairs, &options)?;
            let summary = summarize_eval(&evaluation);
            let report = EvalReport {
                manifest: b.manifest,
                evaluation,
            };
            write_atomic(&[(output, to_json(&report).as_bytes())])?;
            Ok(summary)
        }
        Command::CompareRoles {
            target_bundle,
            other_bundle,
            data,
            probe,
            output,
        } => {
            let options = eval_options(probe)?;
            let target = store::load_bundle(target_bundle)?;
            let other = store::load_bundle(other_bundle)?;
            let pairs = load_pairs(data)?;
            let comparison = wic::compare_token_roles(&target, &other, &pairs, &options)?;
            let mut summary = String::from("layer\tdev_delta\ttest_delta");
            for d in &comparison.deltas {
                summary.push_str(&format!(
                    "\n{}\t{:+.3}\t{}",
                    d.layer,
                    d.dev_delta,
                    d.test_delta.map_or("-".into(), |t| format!("{t:+.3}"))
                ));
            }
            let report = CompareReport {
                target_manifest: target.manifest,
                other_manifest: other.manifest,
                comparison,
            };
            write_atomic(&[(output, to_json(&report).as_bytes())])?;
            Ok(summary)
        }
        Command::NetworkBuild {
            bundle,
            layer,
            mode,
            k,
            epsilon,
            measure,
            edges_out,
            stats_out,
        } => {
            let pruning = match (mode, k, epsilon) {
                (ModeArg::Knn, Some(k), None) => Pruning::Knn { k: *k },
                (ModeArg::Threshold, None, Some(e)) => Pruning::Threshold { epsilon: *e },
                (ModeArg::Knn, _, _) => {
                    return Err(Error::Usage("--mode knn takes --k and no --epsilon".into()))
                }
                (ModeArg::Threshold, _, _) => {
                    return Err(Error::Usage(
                        "--mode threshold takes --epsilon and no --k".into(),
                    ))
                }
            };
            let b = store::load_bundle(bundle)?;
            let vectors = LabeledVectors::from_bundle(&b, *layer)?;
            let graph = network::build_graph(&vectors, pruning, (*measure).into())?;
            let stats = network::graph_stats(&graph);
            let mut sizes: Vec<usize> = network::connected_components(&graph)
                .iter()
                .map(Vec::len)
                .collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            let report = NetworkReport {
                manifest: b.manifest,
                layer: *layer,
                construction: graph
                    .construction
                    .expect("built graphs record construction"),
                stats,
                component_sizes: sizes,
            };
            write_atomic(&[
                (edges_out, graph.to_edge_list().as_bytes()),
                (stats_out, to_json(&report).as_bytes()),
            ])?;
            Ok(format!(
                "nodes={} edges={} components={} mean_clustering={:.4}",
                report.stats.num_nodes,
                report.stats.num_edges,
                report.stats.num_components,
                report.stats.mean_clustering
            ))
        }
        Command::NetworkAnalogy {
            bundle,
            layer,
            a,
            b,
            c,
            topk,
            measure,
            output,
        } => {
            let bundle = store::load_bundle(bundle)?;
            let mut vectors = LabeledVectors::from_bundle(&bundle, *layer)?;
            if *measure == MeasureArg::CenteredCosine {
                vectors = vectors.centered();
            }
            let hits = network::analogy(&vectors, a, b, c, *topk)?;
            let summary = hits
                .iter()
                .enumerate()
                .map(|(i, h)| format!("{}\t{}\t{:.4}", i + 1, h.label, h.similarity))
                .collect::<Vec<_>>()
                .join("\n");
            let report = AnalogyReport {
                layer: *layer,
                measure: (*measure).into(),
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
                hits,
            };
            write_atomic(&[(output, to_json(&report).as_bytes())])?;
            Ok(summary)
        }
        Command::SemmapInfer {
            matrix,
            algorithm,
            max_functions,
            output,
        } => {
            let doc: MatrixDocument = read_json(matrix)?;
            let m = FunctionMatrix::from_document(&doc)?;
            let map = match algorithm {
                AlgorithmArg::Greedy => semmap::infer_map_greedy(&m),
                AlgorithmArg::Exact => semmap::infer_map_exact(&m, *max_functions)?,
            };
            let violations = semmap::connectivity_violations(&map, &m)?;
            write_atomic(&[(output, to_json(&map.to_document()).as_bytes())])?;
            Ok(format!(
                "algorithm={} edges={} violations={}",
                map.provenance,
                map.num_edges(),
                violations
            ))
        }
        Command::SemmapScore {
            predicted,
            gold,
            matrix,
            output,
        } => {
            let predicted = SemanticMap::from_document(&read_json::<MapDocument>(predicted)?)?;
            let matrix_doc: Option<MatrixDocument> =
                matrix.as_deref().map(read_json).transpose()?;
            let gold = match (gold, &matrix_doc) {
                (Some(path), _) => SemanticMap::from_document(&read_json::<MapDocument>(path)?)?,
                (None, Some(doc)) => {
                    let edges = doc.gold_edges.as_ref().ok_or_else(|| {
                        Error::Usage("matrix has no gold_edges and no --gold was given".into())
                    })?;
                    SemanticMap::from_labeled_edges(doc.functions.clone(), edges, Provenance::Gold)?
                }
                (None, None) => {
                    return Err(Error::Usage("semmap-score needs --gold or --matrix".into()))
                }
            };
            let violations = matrix_doc
                .as_ref()
                .map(|doc| {
                    FunctionMatrix::from_document(doc)
                        .and_then(|m| semmap::connectivity_violations(&predicted, &m))
                })
                .transpose()?;
            let score = semmap::compare_maps(&predicted, &gold)?;
            let report = ScoreReport {
                predicted_provenance: predicted.provenance,
                predicted_edges: predicted.num_edges(),
                gold_edges: gold.num_edges(),
                score,
                connectivity_violations: violations,
            };
            write_atomic(&[(output, to_json(&report).as_bytes())])?;
            Ok(format!(
                "precision={:.4} recall={:.4} f1={:.4}",
                score.edge_precision, score.edge_recall, score.edge_f1
            ))
        }
        Command::PlotLayers { reports, output } => {
            let mut series = Vec::new();
            for path in reports {
                match read_json::<AnyLayerReport>(path)? {
                    AnyLayerReport::Eval(r) => series.push(layer_series(&r.evaluation)),
                    AnyLayerReport::Compare(r) => {
                        series.push(layer_series(&r.comparison.target));
                        series.push(layer_series(&r.comparison.other));
                    }
                }
            }
            let svg = plot::render_svg(&series)?;
            write_atomic(&[(output, svg.as_bytes())])?;
            Ok(format!("series={}", series.len()))
        }
    }
}

/// One-line JSON error record for stderr.
pub fn error_line(subcommand: &str, err: &Error) -> String {
    serde_json::json!({
        "error": {
            "subcommand": subcommand,
            "kind": err.kind(),
            "message": err.to_string(),
        }
    })
    .to_string()
}

/// Reads the worker-count override, if any.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!(
                "{WORKERS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}
