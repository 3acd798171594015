//! On-disk embedding bundles.
//!
//! A bundle is a directory holding per-layer hidden states for a list of
//! word occurrences:
//!
//! ```text
//! manifest.json   format_version, model_name, setting, token_role, dim,
//!                 num_layers, num_records, dtype ("f32le")
//! records.jsonl   one {row, pair_id, side, word, pos, split} object per line
//! layer_{L}.bin   num_records * dim little-endian binary32 values, row-major
//! ```
//!
//! Layer 0 is the embedding layer that feeds the first transformer block.
//! Record `i` describes row `i` of every layer file.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE: &str = "f32le";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECORDS_FILE: &str = "records.jsonl";

pub fn layer_file_name(layer: usize) -> String {
    format!("layer_{layer}.bin")
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("missing layer file for layer {layer} ({})", .path.display())]
    MissingLayer { layer: usize, path: PathBuf },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("unsupported dtype {0:?} (expected \"{DTYPE}\")")]
    UnsupportedDtype(String),
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("malformed record on line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("manifest declares {declared} records but {found} were found")]
    RecordCountMismatch { declared: usize, found: usize },
    #[error("duplicate row index {row}")]
    DuplicateRow { row: usize },
    #[error("row index {found} at position {position} (rows must be 0..n-1 in order)")]
    RowOutOfOrder { position: usize, found: usize },
    #[error("duplicate record for pair {pair_id:?} side {side} in split {split}")]
    DuplicatePairSide {
        pair_id: String,
        side: Side,
        split: Split,
    },
    #[error("layer {layer} has {found} bytes, expected {expected}")]
    LayerSizeMismatch {
        layer: usize,
        expected: u64,
        found: u64,
    },
    #[error("layer {layer} holds {found} values, expected {expected}")]
    LayerShapeMismatch {
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at layer {layer}, row {row}, column {col}")]
    NonFinite {
        layer: usize,
        row: usize,
        col: usize,
    },
    #[error("layer {layer} out of range (bundle has {num_layers} layers)")]
    LayerOutOfRange { layer: usize, num_layers: usize },
    #[error("row {row} out of range (bundle has {num_records} records)")]
    RowOutOfRange { row: usize, num_records: usize },
    #[error("I/O error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| {
        if source.kind() == io::ErrorKind::NotFound {
            StoreError::MissingFile(path.to_path_buf())
        } else {
            StoreError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

/// Input transformation applied before the model saw the sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Base,
    Repeat,
    Prompt,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Base => "base",
            Setting::Repeat => "repeat",
            Setting::Prompt => "prompt",
        })
    }
}

/// Which position's hidden state was read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenRole {
    Target,
    Prev,
    Final,
}

impl fmt::Display for TokenRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenRole::Target => "target",
            TokenRole::Prev => "prev",
            TokenRole::Final => "final",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    N,
    V,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::N => "N",
            Pos::V => "V",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        })
    }
}

/// Sentence 1 or sentence 2 of a pair. Serialized as the integer 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Side {
    First,
    Second,
}

impl TryFrom<u8> for Side {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Side::First),
            2 => Ok(Side::Second),
            other => Err(format!("side must be 1 or 2, got {other}")),
        }
    }
}

impl From<Side> for u8 {
    fn from(side: Side) -> u8 {
        match side {
            Side::First => 1,
            Side::Second => 2,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleManifest {
    pub format_version: u32,
    pub model_name: String,
    pub setting: Setting,
    pub token_role: TokenRole,
    pub dim: usize,
    pub num_layers: usize,
    pub num_records: usize,
    pub dtype: String,
}

impl BundleManifest {
    pub fn new(
        model_name: impl Into<String>,
        setting: Setting,
        token_role: TokenRole,
        dim: usize,
        num_layers: usize,
        num_records: usize,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            model_name: model_name.into(),
            setting,
            token_role,
            dim,
            num_layers,
            num_records,
            dtype: DTYPE.to_string(),
        }
    }

    fn validate(&self) -> Result<(), StoreError> {
        if self.format_version != FORMAT_VERSION {
            return Err(StoreError::UnsupportedVersion(self.format_version));
        }
        if self.dtype != DTYPE {
            return Err(StoreError::UnsupportedDtype(self.dtype.clone()));
        }
        if self.dim == 0 {
            return Err(StoreError::InvalidManifest("dim must be at least 1".into()));
        }
        if self.num_layers == 0 {
            return Err(StoreError::InvalidManifest(
                "num_layers must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Metadata for one matrix row. For word-level bundles `pair_id` carries the
/// word label and `side` is always 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordMeta {
    pub row: usize,
    pub pair_id: String,
    pub side: Side,
    pub word: String,
    pub pos: Pos,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBundle {
    pub manifest: BundleManifest,
    pub records: Vec<RecordMeta>,
    /// One flat row-major `num_records x dim` matrix per layer.
    pub layers: Vec<Vec<f32>>,
}

impl EmbeddingBundle {
    /// Assembles a bundle and checks every invariant.
    pub fn new(
        manifest: BundleManifest,
        records: Vec<RecordMeta>,
        layers: Vec<Vec<f32>>,
    ) -> Result<Self, StoreError> {
        let bundle = Self {
            manifest,
            records,
            layers,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn dim(&self) -> usize {
        self.manifest.dim
    }

    pub fn num_layers(&self) -> usize {
        self.manifest.num_layers
    }

    pub fn num_records(&self) -> usize {
        self.manifest.num_records
    }

    pub fn get_vector(&self, layer: usize, row: usize) -> Result<&[f32], StoreError> {
        if layer >= self.num_layers() {
            return Err(StoreError::LayerOutOfRange {
                layer,
                num_layers: self.num_layers(),
            });
        }
        if row >= self.num_records() {
            return Err(StoreError::RowOutOfRange {
                row,
                num_records: self.num_records(),
            });
        }
        let dim = self.dim();
        Ok(&self.layers[layer][row * dim..(row + 1) * dim])
    }

    /// Iterates over the rows of one layer.
    pub fn layer_rows(&self, layer: usize) -> Result<std::slice::ChunksExact<'_, f32>, StoreError> {
        let matrix = self.layers.get(layer).ok_or(StoreError::LayerOutOfRange {
            layer,
            num_layers: self.num_layers(),
        })?;
        Ok(matrix.chunks_exact(self.dim()))
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        self.manifest.validate()?;
        validate_records(&self.records, self.manifest.num_records)?;
        if self.layers.len() != self.manifest.num_layers {
            return Err(StoreError::MissingLayer {
                layer: self.layers.len().min(self.manifest.num_layers),
                path: PathBuf::from(layer_file_name(self.layers.len())),
            });
        }
        let expected = self.manifest.num_records * self.manifest.dim;
        for (layer, matrix) in self.layers.iter().enumerate() {
            if matrix.len() != expected {
                return Err(StoreError::LayerShapeMismatch {
                    layer,
                    expected,
                    found: matrix.len(),
                });
            }
            check_finite(layer, matrix, self.manifest.dim)?;
        }
        Ok(())
    }
}

fn validate_records(records: &[RecordMeta], declared: usize) -> Result<(), StoreError> {
    let mut seen_rows = HashSet::with_capacity(records.len());
    for (position, record) in records.iter().enumerate() {
        if !seen_rows.insert(record.row) {
            return Err(StoreError::DuplicateRow { row: record.row });
        }
        if record.row != position {
            return Err(StoreError::RowOutOfOrder {
                position,
                found: record.row,
            });
        }
    }
    if records.len() != declared {
        return Err(StoreError::RecordCountMismatch {
            declared,
            found: records.len(),
        });
    }
    let mut seen_sides = HashSet::with_capacity(records.len());
    for record in records {
        if !seen_sides.insert((record.split, record.pair_id.as_str(), record.side)) {
            return Err(StoreError::DuplicatePairSide {
                pair_id: record.pair_id.clone(),
                side: record.side,
                split: record.split,
            });
        }
    }
    Ok(())
}

fn check_finite(layer: usize, matrix: &[f32], dim: usize) -> Result<(), StoreError> {
    match matrix.iter().position(|x| !x.is_finite()) {
        Some(idx) => Err(StoreError::NonFinite {
            layer,
            row: idx / dim,
            col: idx % dim,
        }),
        None => Ok(()),
    }
}

pub fn load_bundle(dir: impl AsRef<Path>) -> Result<EmbeddingBundle, StoreError> {
    let dir = dir.as_ref();

    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: BundleManifest = serde_json::from_str(&manifest_text)
        .map_err(|e| StoreError::InvalidManifest(e.to_string()))?;
    manifest.validate()?;

    let records_path = dir.join(RECORDS_FILE);
    let file = fs::File::open(&records_path).map_err(io_err(&records_path))?;
    let mut records = Vec::with_capacity(manifest.num_records);
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(&records_path))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RecordMeta =
            serde_json::from_str(&line).map_err(|e| StoreError::MalformedRecord {
                line: idx + 1,
                message: e.to_string(),
            })?;
        records.push(record);
    }
    validate_records(&records, manifest.num_records)?;

    let expected_bytes = (manifest.num_records * manifest.dim * 4) as u64;
    let mut layers = Vec::with_capacity(manifest.num_layers);
    for layer in 0..manifest.num_layers {
        let path = dir.join(layer_file_name(layer));
        let bytes = match fs::read(&path) {
            Ok(bytes) => bytes,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::MissingLayer { layer, path })
            }
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        if bytes.len() as u64 != expected_bytes {
            return Err(StoreError::LayerSizeMismatch {
                layer,
                expected: expected_bytes,
                found: bytes.len() as u64,
            });
        }
        let matrix: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        check_finite(layer, &matrix, manifest.dim)?;
        layers.push(matrix);
    }

    Ok(EmbeddingBundle {
        manifest,
        records,
        layers,
    })
}

/// Writes the bundle into `dir`, creating it if needed. The bundle is
/// validated before anything touches the filesystem.
pub fn write_bundle(bundle: &EmbeddingBundle, dir: impl AsRef<Path>) -> Result<(), StoreError> {
    bundle.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let manifest_path = dir.join(MANIFEST_FILE);
    let mut manifest_text = serde_json::to_string_pretty(&bundle.manifest)
        .expect("manifest serialization is infallible");
    manifest_text.push('\n');
    fs::write(&manifest_path, manifest_text).map_err(io_err(&manifest_path))?;

    let records_path = dir.join(RECORDS_FILE);
    let mut records_text = String::new();
    for record in &bundle.records {
        records_text
            .push_str(&serde_json::to_string(record).expect("record serialization is infallible"));
        records_text.push('\n');
    }
    fs::write(&records_path, records_text).map_err(io_err(&records_path))?;

    for (layer, matrix) in bundle.layers.iter().enumerate() {
        let path = dir.join(layer_file_name(layer));
        let mut out = io::BufWriter::new(fs::File::create(&path).map_err(io_err(&path))?);
        for value in matrix {
            out.write_all(&value.to_le_bytes()).map_err(io_err(&path))?;
        }
        out.flush().map_err(io_err(&path))?;
    }
    Ok(())
}
