//! Word-in-Context threshold probing.
//!
//! Each WiC pair contributes two rows to a bundle (side 1 and side 2). For a
//! given layer the probe scores the pair by the cosine of the two target-word
//! vectors, optionally after subtracting the layer mean, and predicts "same
//! sense" when the score reaches a threshold. The threshold is chosen on the
//! dev split by exhaustive grid search and then applied unchanged to test.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, CenteringStats, GeometryError};
use crate::store::{EmbeddingBundle, Pos, Setting, Side, Split, StoreError, TokenRole};

pub const DEFAULT_GRID_STEP: f64 = 0.05;

#[derive(Debug, Error)]
pub enum WicError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(
        "line {line}: index {index} out of range for sentence {sentence} with {tokens} tokens"
    )]
    IndexOutOfRange {
        line: usize,
        sentence: u8,
        index: usize,
        tokens: usize,
    },
    #[error("gold file has {gold} labels but data file has {data} pairs")]
    GoldLengthMismatch { data: usize, gold: usize },
    #[error("gold line {line}: expected T or F, got {value:?}")]
    InvalidGold { line: usize, value: String },
    #[error("bundle has no record for pair {pair_id:?} side {side} in split {split}")]
    MissingSide {
        pair_id: String,
        side: Side,
        split: Split,
    },
    #[error("pair {pair_id:?} has no gold label")]
    MissingGold { pair_id: String },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("grid step must be in (0, 1], got {0}")]
    InvalidGridStep(f64),
    #[error("no dev pairs to tune thresholds on")]
    NoDevPairs,
    #[error("layer count mismatch: {left} vs {right}")]
    LayerCountMismatch { left: usize, right: usize },
    #[error("bundles cover different records: {0}")]
    CoverageMismatch(String),
    #[error("second bundle must have token_role prev or final, got {0}")]
    InvalidRole(TokenRole),
    #[error("expected {expected} centering entries (one per layer), got {found}")]
    CenteringShape { expected: usize, found: usize },
    #[error("pair {pair_id:?} at layer {layer}: {source}")]
    Similarity {
        pair_id: String,
        layer: usize,
        #[source]
        source: GeometryError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One WiC instance: a target lemma used in two sentences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WicPair {
    pub pair_id: String,
    pub word: String,
    pub pos: Pos,
    pub sentence1: String,
    pub sentence2: String,
    pub index1: usize,
    pub index2: usize,
    pub gold: Option<bool>,
    pub split: Split,
}

/// Pair ids are `{split}-{line}` with `line` the 0-based position in the
/// data file. Bundles produced for a WiC file use the same ids.
pub fn pair_id_for(split: Split, line: usize) -> String {
    format!("{split}-{line}")
}

/// Parses the official tab-separated layout:
/// `word <TAB> N|V <TAB> i-j <TAB> sentence1 <TAB> sentence2`.
pub fn parse_wic(data: &str, gold: Option<&str>, split: Split) -> Result<Vec<WicPair>, WicError> {
    let mut pairs = Vec::new();
    for (idx, line) in data.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let malformed = |message: String| WicError::Malformed {
            line: lineno,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(malformed(format!(
                "expected 5 columns, found {}",
                cols.len()
            )));
        }
        let pos = match cols[1] {
            "N" => Pos::N,
            "V" => Pos::V,
            other => return Err(malformed(format!("unknown POS {other:?}"))),
        };
        let (i, j) = cols[2]
            .split_once('-')
            .ok_or_else(|| malformed(format!("bad index field {:?}", cols[2])))?;
        let parse_index = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| malformed(format!("bad index field {:?}", cols[2])))
        };
        let (index1, index2) = (parse_index(i)?, parse_index(j)?);
        for (sentence, text, index) in [(1u8, cols[3], index1), (2u8, cols[4], index2)] {
            let tokens = text.split_whitespace().count();
            if index >= tokens {
                return Err(WicError::IndexOutOfRange {
                    line: lineno,
                    sentence,
                    index,
                    tokens,
                });
            }
        }
        pairs.push(WicPair {
            pair_id: pair_id_for(split, pairs.len()),
            word: cols[0].to_string(),
            pos,
            sentence1: cols[3].to_string(),
            sentence2: cols[4].to_string(),
            index1,
            index2,
            gold: None,
            split,
        });
    }

    if let Some(gold) = gold {
        let labels = gold
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(idx, l)| match l.trim() {
                "T" => Ok(true),
                "F" => Ok(false),
                other => Err(WicError::InvalidGold {
                    line: idx + 1,
                    value: other.to_string(),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if labels.len() != pairs.len() {
            return Err(WicError::GoldLengthMismatch {
                data: pairs.len(),
                gold: labels.len(),
            });
        }
        for (pair, label) in pairs.iter_mut().zip(labels) {
            pair.gold = Some(label);
        }
    }
    Ok(pairs)
}

pub fn load_wic(
    data_path: impl AsRef<Path>,
    gold_path: Option<&Path>,
    split: Split,
) -> Result<Vec<WicPair>, WicError> {
    let read = |p: &Path| {
        fs::read_to_string(p).map_err(|source| WicError::Io {
            path: p.to_path_buf(),
            source,
        })
    };
    let data = read(data_path.as_ref())?;
    let gold = gold_path.map(read).transpose()?;
    parse_wic(&data, gold.as_deref(), split)
}

/// Inclusive: a similarity equal to the threshold counts as "same sense".
pub fn classify(similarity: f64, threshold: f64) -> bool {
    similarity >= threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub overall: f64,
    pub noun: Option<f64>,
    pub verb: Option<f64>,
}

pub fn accuracy(
    predictions: &[bool],
    golds: &[bool],
    pos_tags: Option<&[Pos]>,
) -> Result<Accuracy, WicError> {
    if predictions.len() != golds.len() {
        return Err(WicError::LengthMismatch {
            left: predictions.len(),
            right: golds.len(),
        });
    }
    if predictions.is_empty() {
        return Err(WicError::EmptyInput);
    }
    let overall = fraction_correct(predictions.iter().zip(golds));
    let (noun, verb) = match pos_tags {
        None => (None, None),
        Some(tags) => {
            if tags.len() != golds.len() {
                return Err(WicError::LengthMismatch {
                    left: tags.len(),
                    right: golds.len(),
                });
            }
            let by_tag = |want: Pos| {
                let selected: Vec<_> = predictions
                    .iter()
                    .zip(golds)
                    .zip(tags)
                    .filter(|(_, &t)| t == want)
                    .map(|(pg, _)| pg)
                    .collect();
                (!selected.is_empty()).then(|| fraction_correct(selected.into_iter()))
            };
            (by_tag(Pos::N), by_tag(Pos::V))
        }
    };
    Ok(Accuracy {
        overall,
        noun,
        verb,
    })
}

fn fraction_correct<'a>(it: impl Iterator<Item = (&'a bool, &'a bool)>) -> f64 {
    let (mut hits, mut total) = (0usize, 0usize);
    for (p, g) in it {
        hits += (p == g) as usize;
        total += 1;
    }
    hits as f64 / total as f64
}

/// Threshold candidates `lower, lower + step, ..., 1`, where `lower` is 0 or
/// (for centered runs that opt in) -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub step: f64,
    pub include_negative: bool,
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self {
            step: DEFAULT_GRID_STEP,
            include_negative: false,
        }
    }
}

impl ThresholdGrid {
    pub fn new(step: f64) -> Result<Self, WicError> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(WicError::InvalidGridStep(step));
        }
        Ok(Self {
            step,
            include_negative: false,
        })
    }

    pub fn with_negative(mut self, include_negative: bool) -> Self {
        self.include_negative = include_negative;
        self
    }

    /// Grid points in ascending order. Values are `k * step` rounded to
    /// 1e-9 so that reported thresholds print cleanly.
    pub fn points(&self) -> Vec<f64> {
        let top = (1.0 / self.step + 1e-9).floor() as i64;
        let bottom = if self.include_negative { -top } else { 0 };
        (bottom..=top)
            .map(|k| ((k as f64 * self.step) * 1e9).round() / 1e9)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub accuracy: f64,
}

/// Scores every grid point and keeps the most accurate one, preferring the
/// smallest threshold on ties.
pub fn search_threshold(
    similarities: &[f64],
    golds: &[bool],
    grid: &ThresholdGrid,
) -> Result<ThresholdChoice, WicError> {
    if similarities.len() != golds.len() {
        return Err(WicError::LengthMismatch {
            left: similarities.len(),
            right: golds.len(),
        });
    }
    if similarities.is_empty() {
        return Err(WicError::EmptyInput);
    }
    if !(grid.step > 0.0 && grid.step <= 1.0) {
        return Err(WicError::InvalidGridStep(grid.step));
    }

    // Sorting lets each grid point be scored with one pass over the
    // similarities overall instead of one pass per point.
    let mut order: Vec<(f64, bool)> = similarities
        .iter()
        .copied()
        .zip(golds.iter().copied())
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total_true = golds.iter().filter(|&&g| g).count();
    let n = golds.len();

    let mut best: Option<(usize, f64)> = None;
    let mut below = 0usize;
    let mut true_below = 0usize;
    for t in grid.points() {
        while below < n && order[below].0 < t {
            true_below += order[below].1 as usize;
            below += 1;
        }
        // below threshold -> predicted false; correct when gold is false
        let correct = (below - true_below) + (total_true - true_below);
        if best.is_none_or(|(c, _)| correct > c) {
            best = Some((correct, t));
        }
    }
    let (correct, threshold) = best.expect("grid is never empty");
    Ok(ThresholdChoice {
        threshold,
        accuracy: correct as f64 / n as f64,
    })
}

/// How vectors are recentered before scoring.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Centering {
    #[default]
    Off,
    /// Subtract the per-layer mean over every record of the bundle.
    BundleMean,
    /// Subtract caller-supplied means, one per layer in layer order.
    External(Vec<CenteringStats>),
}

impl Centering {
    pub fn is_on(&self) -> bool {
        !matches!(self, Centering::Off)
    }

    fn stats_for(&self, bundle: &EmbeddingBundle) -> Result<Option<Vec<CenteringStats>>, WicError> {
        match self {
            Centering::Off => Ok(None),
            Centering::BundleMean => Ok(Some(geometry::bundle_means(bundle)?)),
            Centering::External(stats) => {
                if stats.len() != bundle.num_layers() {
                    return Err(WicError::CenteringShape {
                        expected: bundle.num_layers(),
                        found: stats.len(),
                    });
                }
                Ok(Some(stats.clone()))
            }
        }
    }
}

/// Maps `(split, pair_id)` to the two bundle rows of a pair.
#[derive(Debug, Clone)]
pub struct PairRows {
    index: HashMap<(Split, String, Side), usize>,
}

impl PairRows {
    pub fn new(bundle: &EmbeddingBundle) -> Self {
        let index = bundle
            .records
            .iter()
            .map(|r| ((r.split, r.pair_id.clone(), r.side), r.row))
            .collect();
        Self { index }
    }

    pub fn rows(&self, split: Split, pair_id: &str) -> Result<(usize, usize), WicError> {
        let find = |side| {
            self.index
                .get(&(split, pair_id.to_string(), side))
                .copied()
                .ok_or_else(|| WicError::MissingSide {
                    pair_id: pair_id.to_string(),
                    side,
                    split,
                })
        };
        Ok((find(Side::First)?, find(Side::Second)?))
    }
}

fn scored_similarity(
    bundle: &EmbeddingBundle,
    layer: usize,
    rows: (usize, usize),
    stats: Option<&CenteringStats>,
    pair_id: &str,
) -> Result<f64, WicError> {
    let u = bundle.get_vector(layer, rows.0)?;
    let v = bundle.get_vector(layer, rows.1)?;
    let sim = match stats {
        None => geometry::cosine(u, v),
        Some(stats) => geometry::center(u, stats)
            .and_then(|cu| geometry::center(v, stats).map(|cv| (cu, cv)))
            .and_then(|(cu, cv)| geometry::cosine(&cu, &cv)),
    };
    sim.map_err(|source| WicError::Similarity {
        pair_id: pair_id.to_string(),
        layer,
        source,
    })
}

/// Cosine of a pair's two target vectors at `layer`, optionally centered by
/// the bundle's layer mean.
pub fn pair_similarity(
    bundle: &EmbeddingBundle,
    layer: usize,
    split: Split,
    pair_id: &str,
    centered: bool,
) -> Result<f64, WicError> {
    let rows = PairRows::new(bundle).rows(split, pair_id)?;
    let stats = if centered {
        Some(geometry::layer_mean(bundle, layer, |_| true)?)
    } else {
        None
    };
    scored_similarity(bundle, layer, rows, stats.as_ref(), pair_id)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerEvalResult {
    pub layer: usize,
    pub threshold: f64,
    pub dev_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub accuracy_noun: Option<f64>,
    pub accuracy_verb: Option<f64>,
    pub centered: bool,
    pub setting: Setting,
    pub token_role: TokenRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestLayer {
    pub layer: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerEvaluation {
    pub setting: Setting,
    pub token_role: TokenRole,
    pub centered: bool,
    pub grid: ThresholdGrid,
    pub num_dev: usize,
    pub num_test: usize,
    pub layers: Vec<LayerEvalResult>,
    /// Layer chosen by dev accuracy.
    pub best_by_dev: BestLayer,
    /// Diagnostic only: chosen by looking at test labels.
    pub best_by_test: Option<BestLayer>,
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub centering: Centering,
    pub grid: ThresholdGrid,
}

struct Scored<'a> {
    pair: &'a WicPair,
    rows: (usize, usize),
}

fn argmax(values: impl Iterator<Item = (usize, f64)>) -> Option<BestLayer> {
    values.fold(
        None,
        |best: Option<BestLayer>, (layer, accuracy)| match best {
            Some(b) if b.accuracy >= accuracy => Some(b),
            _ => Some(BestLayer { layer, accuracy }),
        },
    )
}

/// Tunes a threshold per layer on the dev pairs and applies it to the test
/// pairs. Train pairs are ignored.
pub fn evaluate_layers(
    bundle: &EmbeddingBundle,
    pairs: &[WicPair],
    options: &EvalOptions,
) -> Result<LayerEvaluation, WicError> {
    ThresholdGrid::new(options.grid.step)?;
    let index = PairRows::new(bundle);
    let select = |split: Split| -> Result<Vec<Scored<'_>>, WicError> {
        pairs
            .iter()
            .filter(|p| p.split == split)
            .map(|pair| {
                if pair.gold.is_none() {
                    return Err(WicError::MissingGold {
                        pair_id: pair.pair_id.clone(),
                    });
                }
                Ok(Scored {
                    pair,
                    rows: index.rows(split, &pair.pair_id)?,
                })
            })
            .collect()
    };
    let dev = select(Split::Dev)?;
    let test = select(Split::Test)?;
    if dev.is_empty() {
        return Err(WicError::NoDevPairs);
    }
    let stats = options.centering.stats_for(bundle)?;
    let setting = bundle.manifest.setting;
    let token_role = bundle.manifest.token_role;
    let centered = options.centering.is_on();

    let layers = (0..bundle.num_layers())
        .into_par_iter()
        .map(|layer| {
            let layer_stats = stats.as_ref().map(|s| &s[layer]);
            let sims = |set: &[Scored<'_>]| -> Result<Vec<f64>, WicError> {
                set.iter()
                    .map(|s| scored_similarity(bundle, layer, s.rows, layer_stats, &s.pair.pair_id))
                    .collect()
            };
            let golds = |set: &[Scored<'_>]| -> Vec<bool> {
                set.iter()
                    .map(|s| s.pair.gold.unwrap_or_default())
                    .collect()
            };

            let choice = search_threshold(&sims(&dev)?, &golds(&dev), &options.grid)?;
            let test_acc = if test.is_empty() {
                None
            } else {
                let preds: Vec<bool> = sims(&test)?
                    .into_iter()
                    .map(|s| classify(s, choice.threshold))
                    .collect();
                let tags: Vec<Pos> = test.iter().map(|s| s.pair.pos).collect();
                Some(accuracy(&preds, &golds(&test), Some(&tags))?)
            };
            Ok(LayerEvalResult {
                layer,
                threshold: choice.threshold,
                dev_accuracy: choice.accuracy,
                test_accuracy: test_acc.map(|a| a.overall),
                accuracy_noun: test_acc.and_then(|a| a.noun),
                accuracy_verb: test_acc.and_then(|a| a.verb),
                centered,
                setting,
                token_role,
            })
        })
        .collect::<Result<Vec<_>, WicError>>()?;

    let best_by_dev = argmax(layers.iter().map(|r| (r.layer, r.dev_accuracy)))
        .expect("bundles have at least one layer");
    let best_by_test = argmax(
        layers
            .iter()
            .filter_map(|r| r.test_accuracy.map(|a| (r.layer, a))),
    );
    Ok(LayerEvaluation {
        setting,
        token_role,
        centered,
        grid: options.grid,
        num_dev: dev.len(),
        num_test: test.len(),
        layers,
        best_by_dev,
        best_by_test,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerDelta {
    pub layer: usize,
    /// `other - target` on dev.
    pub dev_delta: f64,
    pub test_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoleComparison {
    pub target: LayerEvaluation,
    pub other: LayerEvaluation,
    pub deltas: Vec<LayerDelta>,
}

/// Evaluates a target-role bundle against a prev- or final-role bundle built
/// from the same pairs, and reports per-layer accuracy differences.
pub fn compare_token_roles(
    target: &EmbeddingBundle,
    other: &EmbeddingBundle,
    pairs: &[WicPair],
    options: &EvalOptions,
) -> Result<RoleComparison, WicError> {
    if !matches!(
        other.manifest.token_role,
        TokenRole::Prev | TokenRole::Final
    ) {
        return Err(WicError::InvalidRole(other.manifest.token_role));
    }
    if target.num_layers() != other.num_layers() {
        return Err(WicError::LayerCountMismatch {
            left: target.num_layers(),
            right: other.num_layers(),
        });
    }
    let keys = |b: &EmbeddingBundle| {
        let mut k: Vec<_> = b
            .records
            .iter()
            .map(|r| (r.split, r.pair_id.clone(), r.side))
            .collect();
        k.sort();
        k
    };
    let (kt, ko) = (keys(target), keys(other));
    if kt != ko {
        let first = kt
            .iter()
            .zip(&ko)
            .find(|(a, b)| a != b)
            .map(|(a, _)| format!("first difference at pair {:?} side {}", a.1, a.2))
            .unwrap_or_else(|| format!("{} vs {} records", kt.len(), ko.len()));
        return Err(WicError::CoverageMismatch(first));
    }

    let target_eval = evaluate_layers(target, pairs, options)?;
    let other_eval = evaluate_layers(other, pairs, options)?;
    let deltas = target_eval
        .layers
        .iter()
        .zip(&other_eval.layers)
        .map(|(t, o)| LayerDelta {
            layer: t.layer,
            dev_delta: o.dev_accuracy - t.dev_accuracy,
            test_delta: o.test_accuracy.zip(t.test_accuracy).map(|(o, t)| o - t),
        })
        .collect();
    Ok(RoleComparison {
        target: target_eval,
        other: other_eval,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{BundleManifest, RecordMeta};

    #[test]
    fn parses_official_layout() {
        let data = "bed\tN\t4-2\tI sat on the bed .\tThe river bed was dry .\n";
        let pairs = parse_wic(data, Some("F\n"), Split::Dev).unwrap();
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!(p.word, "bed");
        assert_eq!(p.pos, Pos::N);
        assert_eq!((p.index1, p.index2), (4, 2));
        assert_eq!(p.gold, Some(false));
        assert_eq!(p.pair_id, "dev-0");
    }

    #[test]
    fn index_past_sentence_end_rejected() {
        let data = "bed\tN\t2-6\tI sat on the bed .\tThe river bed was dry .\n";
        assert!(matches!(
            parse_wic(data, None, Split::Dev),
            Err(WicError::IndexOutOfRange {
                sentence: 2,
                index: 6,
                tokens: 6,
                ..
            })
        ));
    }

    #[test]
    fn gold_handling() {
        let data = "a\tV\t0-0\tx y\tz\nb\tN\t1-0\tx y\tz\n";
        let pairs = parse_wic(data, None, Split::Test).unwrap();
        assert!(pairs.iter().all(|p| p.gold.is_none()));
        assert!(matches!(
            parse_wic(data, Some("T\n"), Split::Test),
            Err(WicError::GoldLengthMismatch { data: 2, gold: 1 })
        ));
        assert!(matches!(
            parse_wic(data, Some("T\nX\n"), Split::Test),
            Err(WicError::InvalidGold { line: 2, .. })
        ));
        assert!(matches!(
            parse_wic("a\tV\t0-0\tx\n", None, Split::Dev),
            Err(WicError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_wic("a\tADJ\t0-0\tx\ty\n", None, Split::Dev),
            Err(WicError::Malformed { .. })
        ));
    }

    #[test]
    fn classify_is_inclusive() {
        assert!(classify(0.40, 0.35));
        assert!(classify(0.35, 0.35));
        assert!(!classify(0.10, 0.35));
    }

    #[test]
    fn accuracy_examples() {
        let (t, f) = (true, false);
        assert_eq!(
            accuracy(&[t, t, f, f], &[t, f, f, t], None)
                .unwrap()
                .overall,
            0.5
        );
        assert_eq!(accuracy(&[t, f], &[t, f], None).unwrap().overall, 1.0);
        let preds = [t, t, t, t, t, t, t, t];
        let golds = [t, t, t, t, f, f, f, f];
        let tags = [
            Pos::N,
            Pos::N,
            Pos::N,
            Pos::N,
            Pos::V,
            Pos::V,
            Pos::V,
            Pos::V,
        ];
        let acc = accuracy(&preds, &golds, Some(&tags)).unwrap();
        assert_eq!(
            (acc.overall, acc.noun, acc.verb),
            (0.5, Some(1.0), Some(0.0))
        );
        assert!(matches!(
            accuracy(&[t], &[t, f], None),
            Err(WicError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn threshold_search_examples() {
        let grid = ThresholdGrid::default();
        let c =
            search_threshold(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false], &grid).unwrap();
        assert_eq!(c.threshold, 0.25);
        assert_eq!(c.accuracy, 1.0);
        let c = search_threshold(&[0.9, 0.1, 0.5], &[true, true, true], &grid).unwrap();
        assert_eq!((c.threshold, c.accuracy), (0.0, 1.0));
        assert!(matches!(
            search_threshold(&[], &[], &grid),
            Err(WicError::EmptyInput)
        ));
        assert!(ThresholdGrid::new(0.0).is_err());
        assert!(ThresholdGrid::new(1.5).is_err());
    }

    #[test]
    fn grid_points() {
        let pts = ThresholdGrid::default().points();
        assert_eq!(pts.len(), 21);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[3], 0.15);
        assert_eq!(*pts.last().unwrap(), 1.0);
        let neg = ThresholdGrid::new(0.5)
            .unwrap()
            .with_negative(true)
            .points();
        assert_eq!(neg, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(
            ThresholdGrid::new(0.3).unwrap().points(),
            vec![0.0, 0.3, 0.6, 0.9]
        );
    }

    fn two_record_bundle(a: [f32; 2], b: [f32; 2]) -> EmbeddingBundle {
        let rec = |row, side| RecordMeta {
            row,
            pair_id: "dev-0".into(),
            side,
            word: "w".into(),
            pos: Pos::N,
            split: Split::Dev,
        };
        EmbeddingBundle::new(
            BundleManifest::new("t", Setting::Base, TokenRole::Target, 2, 1, 2),
            vec![rec(0, Side::First), rec(1, Side::Second)],
            vec![vec![a[0], a[1], b[0], b[1]]],
        )
        .unwrap()
    }

    #[test]
    fn pair_similarity_examples() {
        let same = two_record_bundle([0.3, 0.4], [0.3, 0.4]);
        assert_eq!(
            pair_similarity(&same, 0, Split::Dev, "dev-0", false).unwrap(),
            1.0
        );
        let orth = two_record_bundle([1.0, 0.0], [0.0, 1.0]);
        assert_eq!(
            pair_similarity(&orth, 0, Split::Dev, "dev-0", false).unwrap(),
            0.0
        );
        assert_eq!(
            pair_similarity(&orth, 0, Split::Dev, "dev-0", true).unwrap(),
            -1.0
        );
        assert!(matches!(
            pair_similarity(&orth, 0, Split::Dev, "dev-9", false),
            Err(WicError::MissingSide { .. })
        ));
        // both sides equal the mean after centering
        assert!(matches!(
            pair_similarity(&same, 0, Split::Dev, "dev-0", true),
            Err(WicError::Similarity {
                source: GeometryError::ZeroNorm,
                ..
            })
        ));
    }
}
