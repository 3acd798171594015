//! Layer-wise probing of contextual word representations.
//!
//! The crate reads per-layer hidden states from an on-disk bundle
//! ([`store`]) and runs three families of analysis on them:
//!
//! * [`wic`]: Word-in-Context threshold probing, with optional
//!   mean-centering ([`geometry`]) and dev-tuned thresholds per layer.
//! * [`network`]: pruned word-similarity graphs, graph statistics and
//!   analogy queries.
//! * [`semmap`]: semantic map inference under the connectivity hypothesis,
//!   greedy and exact, with edge-level scoring against a gold map.
//!
//! [`cli`] wires these into the `lexprobe` binary and [`plot`] draws
//! layer-wise accuracy curves. [`synthetic`] builds bundles with planted
//! geometry for tests and examples.

pub mod cli;
pub mod geometry;
pub mod network;
pub mod plot;
pub mod semmap;
pub mod store;
pub mod synthetic;
pub mod unionfind;
pub mod wic;

use std::path::PathBuf;

pub use geometry::{center, cosine, layer_mean, CenteringStats};
pub use network::{analogy, build_graph, connected_components, graph_stats, SimilarityGraph};
pub use semmap::{
    compare_maps, connectivity_violations, infer_map_exact, infer_map_greedy, FunctionMatrix,
    SemanticMap,
};
pub use store::{load_bundle, write_bundle, BundleManifest, EmbeddingBundle, RecordMeta};
pub use wic::{evaluate_layers, load_wic, search_threshold, LayerEvalResult, WicPair};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Store(#[from] store::StoreError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Wic(#[from] wic::WicError),
    #[error(transparent)]
    Graph(#[from] network::GraphError),
    #[error(transparent)]
    Semmap(#[from] semmap::SemmapError),
    #[error(transparent)]
    Plot(#[from] plot::PlotError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", .path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Store(_) => "store",
            Error::Geometry(_) => "geometry",
            Error::Wic(_) => "wic",
            Error::Graph(_) => "graph",
            Error::Semmap(_) => "semmap",
            Error::Plot(_) => "plot",
            Error::Io { .. } => "io",
            Error::Json { .. } => "json",
            Error::Usage(_) => "usage",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
