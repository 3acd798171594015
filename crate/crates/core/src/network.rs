//! Word networks: pruned similarity graphs over word vectors, zoom-out
//! statistics, and zoom-in analogy queries.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError};
use crate::store::{EmbeddingBundle, StoreError};
use crate::unionfind::DisjointSet;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("need at least 2 vectors, got {0}")]
    TooFewVectors(usize),
    #[error("k = {k} out of range for {nodes} nodes")]
    KOutOfRange { k: usize, nodes: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("topk must be at least 1")]
    InvalidTopK,
    #[error("analogy query vector has zero norm")]
    ZeroQuery,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Labeled dense vectors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVectors {
    labels: Vec<String>,
    dim: usize,
    data: Vec<f32>,
    lookup: HashMap<String, usize>,
}

impl LabeledVectors {
    pub fn new(dim: usize, entries: Vec<(String, Vec<f32>)>) -> Result<Self, GraphError> {
        let mut labels = Vec::with_capacity(entries.len());
        let mut data = Vec::with_capacity(entries.len() * dim);
        let mut lookup = HashMap::with_capacity(entries.len());
        for (label, v) in entries {
            if v.len() != dim {
                return Err(GraphError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if lookup.insert(label.clone(), labels.len()).is_some() {
                return Err(GraphError::DuplicateLabel(label));
            }
            labels.push(label);
            data.extend(v);
        }
        Ok(Self {
            labels,
            dim,
            data,
            lookup,
        })
    }

    /// One vector per record at `layer`, labeled by the record's `pair_id`.
    pub fn from_bundle(bundle: &EmbeddingBundle, layer: usize) -> Result<Self, GraphError> {
        let entries = bundle
            .records
            .iter()
            .zip(bundle.layer_rows(layer)?)
            .map(|(r, v)| (r.pair_id.clone(), v.to_vec()))
            .collect();
        Self::new(bundle.dim(), entries)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vector(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    fn get(&self, label: &str) -> Result<&[f32], GraphError> {
        self.index_of(label)
            .map(|i| self.vector(i))
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    /// Copy with the mean vector subtracted from every row.
    pub fn centered(&self) -> Self {
        let n = self.len().max(1) as f64;
        let mut mean = vec![0.0f64; self.dim];
        for row in self.data.chunks_exact(self.dim) {
            for (m, &x) in mean.iter_mut().zip(row) {
                *m += x as f64;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let data = self
            .data
            .chunks_exact(self.dim)
            .flat_map(|row| row.iter().zip(&mean).map(|(&x, &m)| (x as f64 - m) as f32))
            .collect();
        Self {
            data,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Cosine,
    CenteredCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Pruning {
    Knn { k: usize },
    Threshold { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub pruning: Pruning,
    pub measure: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph over labeled nodes; edges are stored with
/// `i < j`, sorted, without duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub construction: Option<Construction>,
}

impl SimilarityGraph {
    /// Builds a graph from explicit edges. Self-loops are dropped and
    /// duplicates collapse to the first occurrence.
    pub fn from_edges(
        nodes: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut seen = HashSet::new();
        let mut list: Vec<Edge> = edges
            .into_iter()
            .filter(|&(i, j, _)| i != j)
            .map(|(i, j, w)| if i < j { (i, j, w) } else { (j, i, w) })
            .filter(|&(i, j, _)| seen.insert((i, j)))
            .map(|(i, j, weight)| Edge { i, j, weight })
            .collect();
        list.sort_by_key(|e| (e.i, e.j));
        Self {
            nodes,
            edges: list,
            construction: None,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// `label_i <TAB> label_j <TAB> weight`, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                self.nodes[e.i], self.nodes[e.j], e.weight
            );
        }
        out
    }
}

fn similarity_rows(vectors: &LabeledVectors, usable: &[bool]) -> Vec<Vec<Option<f64>>> {
    let n = vectors.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j || !usable[i] || !usable[j] {
                        None
                    } else {
                        geometry::cosine(vectors.vector(i), vectors.vector(j)).ok()
                    }
                })
                .collect()
        })
        .collect()
}

/// Descending similarity, then ascending label.
fn rank_order(labels: &[String], a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| labels[a.0].cmp(&labels[b.0]))
}

/// Builds a pruned similarity graph. Zero-norm vectors become isolated nodes.
pub fn build_graph(
    vectors: &LabeledVectors,
    pruning: Pruning,
    measure: Measure,
) -> Result<SimilarityGraph, GraphError> {
    let n = vectors.len();
    if n < 2 {
        return Err(GraphError::TooFewVectors(n));
    }
    if let Pruning::Knn { k } = pruning {
        if k == 0 || k >= n {
            return Err(GraphError::KOutOfRange { k, nodes: n });
        }
    }
    let working;
    let vectors = match measure {
        Measure::Cosine => vectors,
        Measure::CenteredCosine => {
            working = vectors.centered();
            &working
        }
    };
    let usable: Vec<bool> = (0..n)
        .map(|i| geometry::norm(vectors.vector(i)) > 0.0)
        .collect();
    let sims = similarity_rows(vectors, &usable);
    let labels = vectors.labels();

    let mut edges = BTreeSet::new();
    match pruning {
        Pruning::Knn { k } => {
            for (i, row) in sims.iter().enumerate() {
                let mut candidates: Vec<(usize, f64)> = row
                    .iter()
                    .enumerate()
                    .filter_map(|(j, s)| s.map(|s| (j, s)))
                    .collect();
                candidates.sort_by(|&a, &b| rank_order(labels, a, b));
                for &(j, _) in candidates.iter().take(k) {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
        Pruning::Threshold { epsilon } => {
            for (i, row) in sims.iter().enumerate() {
                for (j, s) in row.iter().enumerate().skip(i + 1) {
                    if matches!(s, Some(s) if *s >= epsilon) {
                        edges.insert((i, j));
                    }
                }
            }
        }
    }
    let mut graph = SimilarityGraph::from_edges(
        labels.to_vec(),
        edges
            .into_iter()
            .map(|(i, j)| (i, j, sims[i][j].expect("edge endpoints are usable"))),
    );
    graph.construction = Some(Construction { pruning, measure });
    Ok(graph)
}

/// Components as sorted node-index lists, ordered by smallest member.
pub fn connected_components(graph: &SimilarityGraph) -> Vec<Vec<usize>> {
    let n = graph.num_nodes();
    let mut sets = DisjointSet::new(n);
    for e in &graph.edges {
        sets.union(e.i, e.j);
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for node in 0..n {
        by_root.entry(sets.find(node)).or_default().push(node);
    }
    let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub num_components: usize,
    pub largest_component: usize,
    /// `degree_histogram[d]` = number of nodes with degree `d`.
    pub degree_histogram: Vec<usize>,
    /// Mean local clustering coefficient; nodes of degree < 2 count as 0.
    pub mean_clustering: f64,
}

pub fn local_clustering(graph: &SimilarityGraph) -> Vec<f64> {
    let adj = graph.adjacency();
    let neighbor_sets: Vec<HashSet<usize>> =
        adj.iter().map(|l| l.iter().copied().collect()).collect();
    adj.iter()
        .map(|nbrs| {
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (a_pos, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[a_pos + 1..] {
                    links += neighbor_sets[a].contains(&b) as usize;
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

pub fn graph_stats(graph: &SimilarityGraph) -> GraphStats {
    let comps = connected_components(graph);
    let degrees = graph.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0; max_degree + 1];
    for d in degrees {
        histogram[d] += 1;
    }
    let clustering = local_clustering(graph);
    let mean_clustering = if clustering.is_empty() {
        0.0
    } else {
        clustering.iter().sum::<f64>() / clustering.len() as f64
    };
    GraphStats {
        num_nodes: graph.num_nodes(),
        num_edges: graph.num_edges(),
        num_components: comps.len(),
        largest_component: comps.iter().map(Vec::len).max().unwrap_or(0),
        degree_histogram: histogram,
        mean_clustering,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogyHit {
    pub label: String,
    pub similarity: f64,
}

/// Solves `a : b :: c : ?` by ranking every other label against
/// `v_b - v_a + v_c`. Zero-norm candidates are skipped.
pub fn analogy(
    vectors: &LabeledVectors,
    a: &str,
    b: &str,
    c: &str,
    topk: usize,
) -> Result<Vec<AnalogyHit>, GraphError> {
    if topk == 0 {
        return Err(GraphError::InvalidTopK);
    }
    let (va, vb, vc) = (vectors.get(a)?, vectors.get(b)?, vectors.get(c)?);
    let query: Vec<f32> = va
        .iter()
        .zip(vb)
        .zip(vc)
        .map(|((&x, &y), &z)| (y as f64 - x as f64 + z as f64) as f32)
        .collect();
    if geometry::norm(&query) == 0.0 {
        return Err(GraphError::ZeroQuery);
    }
    let excluded = [a, b, c];
    let labels = vectors.labels();
    let mut scored: Vec<(usize, f64)> = (0..vectors.len())
        .into_par_iter()
        .filter(|&i| !excluded.contains(&labels[i].as_str()))
        .filter_map(|i| {
            geometry::cosine(&query, vectors.vector(i))
                .ok()
                .map(|s| (i, s))
        })
        .collect();
    scored.sort_by(|&x, &y| rank_order(labels, x, y));
    Ok(scored
        .into_iter()
        .take(topk)
        .map(|(i, similarity)| AnalogyHit {
            label: labels[i].clone(),
            similarity,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(entries: &[(&str, &[f32])]) -> LabeledVectors {
        let dim = entries[0].1.len();
        LabeledVectors::new(
            dim,
            entries
                .iter()
                .map(|(l, v)| (l.to_string(), v.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    fn pairs(g: &SimilarityGraph) -> Vec<(&str, &str)> {
        g.edges
            .iter()
            .map(|e| (g.nodes[e.i].as_str(), g.nodes[e.j].as_str()))
            .collect()
    }

    #[test]
    fn orthogonal_vectors_threshold_half() {
        let v = vecs(&[
            ("x", &[1.0, 0.0, 0.0]),
            ("y", &[0.0, 1.0, 0.0]),
            ("z", &[0.0, 0.0, 1.0]),
        ]);
        let g = build_graph(&v, Pruning::Threshold { epsilon: 0.5 }, Measure::Cosine).unwrap();
        assert_eq!(g.num_edges(), 0);
        let g = build_graph(&v, Pruning::Threshold { epsilon: 0.0 }, Measure::Cosine).unwrap();
        assert_eq!(g.num_edges(), 3);
    }

    #[test]
    fn knn_tie_breaks_by_label() {
        let v = vecs(&[("c", &[0.0, 1.0]), ("b", &[1.0, 0.0]), ("a", &[1.0, 0.0])]);
        let g = build_graph(&v, Pruning::Knn { k: 1 }, Measure::Cosine).unwrap();
        // c is equally far from a and b; a wins on label order
        let mut got = pairs(&g);
        got.iter_mut().for_each(|p| {
            if p.0 > p.1 {
                *p = (p.1, p.0)
            }
        });
        got.sort();
        assert_eq!(got, vec![("a", "b"), ("a", "c")]);
    }

    #[test]
    fn knn_bounds() {
        let v = vecs(&[("a", &[1.0]), ("b", &[2.0])]);
        assert!(matches!(
            build_graph(&v, Pruning::Knn { k: 2 }, Measure::Cosine),
            Err(GraphError::KOutOfRange { k: 2, nodes: 2 })
        ));
        let one = vecs(&[("a", &[1.0])]);
        assert!(matches!(
            build_graph(&one, Pruning::Knn { k: 1 }, Measure::Cosine),
            Err(GraphError::TooFewVectors(1))
        ));
    }

    #[test]
    fn zero_vectors_isolated() {
        let v = vecs(&[("a", &[1.0, 0.0]), ("b", &[0.9, 0.1]), ("z", &[0.0, 0.0])]);
        let g = build_graph(&v, Pruning::Knn { k: 1 }, Measure::Cosine).unwrap();
        assert_eq!(g.degrees(), vec![1, 1, 0]);
    }

    #[test]
    fn components_examples() {
        let names = |n: usize| (0..n).map(|i| format!("n{i}")).collect::<Vec<_>>();
        let empty = SimilarityGraph::from_edges(names(4), []);
        assert_eq!(connected_components(&empty).len(), 4);
        let path = SimilarityGraph::from_edges(names(4), [(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(connected_components(&path), vec![vec![0, 1, 2], vec![3]]);
        let complete = SimilarityGraph::from_edges(
            names(4),
            (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, 1.0))),
        );
        assert_eq!(connected_components(&complete).len(), 1);
    }

    #[test]
    fn stats_triangle_and_path() {
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        let tri =
            SimilarityGraph::from_edges(names.clone(), [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]);
        let s = graph_stats(&tri);
        assert_eq!(s.mean_clustering, 1.0);
        assert_eq!(s.num_components, 1);
        assert_eq!(tri.degrees(), vec![2, 2, 2]);
        assert_eq!(s.degree_histogram, vec![0, 0, 3]);
        let path = SimilarityGraph::from_edges(names, [(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(graph_stats(&path).mean_clustering, 0.0);
    }

    #[test]
    fn from_edges_normalizes() {
        let g = SimilarityGraph::from_edges(
            vec!["a".into(), "b".into()],
            [(1, 0, 0.5), (0, 1, 0.7), (1, 1, 1.0)],
        );
        assert_eq!(
            g.edges,
            vec![Edge {
                i: 0,
                j: 1,
                weight: 0.5
            }]
        );
        assert_eq!(g.to_edge_list(), "a\tb\t0.5\n");
    }

    #[test]
    fn analogy_exact_construction() {
        let man = [1.0f32, 0.0, 0.0, 0.2];
        let king = [1.0f32, 1.0, 0.0, 0.1];
        let woman = [0.0f32, 0.0, 1.0, 0.3];
        let queen: Vec<f32> = (0..4).map(|i| king[i] - man[i] + woman[i]).collect();
        let v = vecs(&[
            ("man", &man),
            ("king", &king),
            ("woman", &woman),
            ("queen", &queen),
            ("apple", &[0.0, -1.0, 0.2, 1.0]),
            ("prince", &[0.9, 0.8, 0.1, 0.1]),
        ]);
        let hits = analogy(&v, "man", "king", "woman", 3).unwrap();
        assert_eq!(hits[0].label, "queen");
        assert!((hits[0].similarity - 1.0).abs() < 1e-6);
        assert!(hits
            .iter()
            .all(|h| !["man", "king", "woman"].contains(&h.label.as_str())));
    }

    #[test]
    fn analogy_cancellation_and_errors() {
        let v = vecs(&[
            ("a", &[1.0, 0.0]),
            ("c", &[0.0, 1.0]),
            ("d", &[0.1, 1.0]),
            ("e", &[1.0, 1.0]),
        ]);
        let hits = analogy(&v, "a", "a", "c", 1).unwrap();
        assert_eq!(hits[0].label, "d");
        assert!(matches!(
            analogy(&v, "a", "zz", "c", 1),
            Err(GraphError::UnknownLabel(_))
        ));
        assert!(matches!(
            analogy(&v, "a", "a", "c", 0),
            Err(GraphError::InvalidTopK)
        ));
        let w = vecs(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0]), ("c", &[-1.0, 1.0])]);
        assert!(matches!(
            analogy(&w, "b", "a", "c", 1),
            Err(GraphError::ZeroQuery)
        ));
    }
}
