//! Semantic map inference under the connectivity hypothesis.
//!
//! A semantic map is a graph over functions (senses). A gram (a
//! language-specific form) expresses a set of functions, and the map
//! respects the gram when those functions induce a connected subgraph. The
//! inference target is a map with as few edges as possible that respects
//! every gram. [`infer_map_greedy`] scales to realistic inventories;
//! [`infer_map_exact`] enumerates edge subsets and serves as the reference
//! on small instances.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError};
use crate::store::{EmbeddingBundle, StoreError};
use crate::unionfind::DisjointSet;

pub const DEFAULT_MAX_EXACT_FUNCTIONS: usize = 7;

#[derive(Debug, Error)]
pub enum SemmapError {
    #[error("matrix declares no grams")]
    NoGrams,
    #[error("duplicate function label {0:?}")]
    DuplicateFunction(String),
    #[error("duplicate gram ({language}, {gram})")]
    DuplicateGram { language: String, gram: String },
    #[error("gram ({language}, {gram}) has an empty function set")]
    EmptyGram { language: String, gram: String },
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("edge joins {0:?} to itself")]
    SelfLoop(String),
    #[error("instance has {functions} functions, exact search allows at most {max}")]
    InstanceTooLarge { functions: usize, max: usize },
    #[error("maps are over different function sets")]
    NodeSetMismatch,
    #[error("function group {0:?} is empty")]
    EmptyGroup(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gram {
    pub language: String,
    pub gram: String,
    pub functions: Vec<String>,
}

/// Cross-linguistic gram-to-function incidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionMatrix {
    functions: Vec<String>,
    grams: Vec<Gram>,
    /// Function indices per gram, sorted and deduplicated.
    members: Vec<Vec<usize>>,
}

/// On-disk layout of a matrix file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub functions: Vec<String>,
    pub grams: Vec<Gram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_edges: Option<Vec<[String; 2]>>,
}

fn function_index(functions: &[String]) -> Result<HashMap<&str, usize>, SemmapError> {
    let mut index = HashMap::with_capacity(functions.len());
    for (i, f) in functions.iter().enumerate() {
        if index.insert(f.as_str(), i).is_some() {
            return Err(SemmapError::DuplicateFunction(f.clone()));
        }
    }
    Ok(index)
}

impl FunctionMatrix {
    pub fn new(functions: Vec<String>, grams: Vec<Gram>) -> Result<Self, SemmapError> {
        if grams.is_empty() {
            return Err(SemmapError::NoGrams);
        }
        let index = function_index(&functions)?;
        let mut seen = HashSet::new();
        let mut members = Vec::with_capacity(grams.len());
        for g in &grams {
            if !seen.insert((g.language.as_str(), g.gram.as_str())) {
                return Err(SemmapError::DuplicateGram {
                    language: g.language.clone(),
                    gram: g.gram.clone(),
                });
            }
            if g.functions.is_empty() {
                return Err(SemmapError::EmptyGram {
                    language: g.language.clone(),
                    gram: g.gram.clone(),
                });
            }
            let set: BTreeSet<usize> = g
                .functions
                .iter()
                .map(|f| {
                    index
                        .get(f.as_str())
                        .copied()
                        .ok_or_else(|| SemmapError::UnknownFunction(f.clone()))
                })
                .collect::<Result<_, _>>()?;
            members.push(set.into_iter().collect());
        }
        Ok(Self {
            functions,
            grams,
            members,
        })
    }

    pub fn from_document(doc: &MatrixDocument) -> Result<Self, SemmapError> {
        Self::new(doc.functions.clone(), doc.grams.clone())
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn grams(&self) -> &[Gram] {
        &self.grams
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Greedy,
    Exact,
    Gold,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Greedy => "greedy",
            Provenance::Exact => "exact",
            Provenance::Gold => "gold",
        })
    }
}

/// Graph over functions. Edges are index pairs `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMap {
    pub functions: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
    pub provenance: Provenance,
}

/// On-disk layout of a map file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub functions: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub provenance: Provenance,
}

impl SemanticMap {
    pub fn empty(functions: Vec<String>, provenance: Provenance) -> Self {
        Self {
            functions,
            edges: BTreeSet::new(),
            provenance,
        }
    }

    pub fn from_labeled_edges(
        functions: Vec<String>,
        edges: &[[String; 2]],
        provenance: Provenance,
    ) -> Result<Self, SemmapError> {
        let index = function_index(&functions)?;
        let lookup = |f: &String| {
            index
                .get(f.as_str())
                .copied()
                .ok_or_else(|| SemmapError::UnknownFunction(f.clone()))
        };
        let mut set = BTreeSet::new();
        for [a, b] in edges {
            let (u, v) = (lookup(a)?, lookup(b)?);
            if u == v {
                return Err(SemmapError::SelfLoop(a.clone()));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            functions,
            edges: set,
            provenance,
        })
    }

    pub fn from_document(doc: &MapDocument) -> Result<Self, SemmapError> {
        Self::from_labeled_edges(doc.functions.clone(), &doc.edges, doc.provenance)
    }

    pub fn to_document(&self) -> MapDocument {
        MapDocument {
            functions: self.functions.clone(),
            edges: self.labeled_edges(),
            provenance: self.provenance,
        }
    }

    pub fn labeled_edges(&self) -> Vec<[String; 2]> {
        self.edges
            .iter()
            .map(|&(u, v)| [self.functions[u].clone(), self.functions[v].clone()])
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Component count of the subgraph induced by `members` minus one.
fn gram_violations(members: &[usize], edges: &BTreeSet<(usize, usize)>, n: usize) -> usize {
    if members.len() < 2 {
        return 0;
    }
    let mut inside = vec![false; n];
    for &m in members {
        inside[m] = true;
    }
    let mut sets = DisjointSet::new(n);
    let mut merged = 0;
    for &(u, v) in edges {
        if inside[u] && inside[v] && sets.union(u, v) {
            merged += 1;
        }
    }
    members.len() - 1 - merged
}

/// Resolves the map's function labels against the matrix, so that maps and
/// matrices listing the same functions in different orders still compare.
fn remap_members(
    map: &SemanticMap,
    matrix: &FunctionMatrix,
) -> Result<Vec<Vec<usize>>, SemmapError> {
    if map.functions == matrix.functions {
        return Ok(matrix.members.clone());
    }
    let index = function_index(&map.functions)?;
    matrix
        .members
        .iter()
        .map(|gram| {
            gram.iter()
                .map(|&f| {
                    let label = &matrix.functions[f];
                    index
                        .get(label.as_str())
                        .copied()
                        .ok_or_else(|| SemmapError::UnknownFunction(label.clone()))
                })
                .collect()
        })
        .collect()
}

/// Sum over grams of (induced components - 1). Zero iff every gram is
/// contiguous on the map.
pub fn connectivity_violations(
    map: &SemanticMap,
    matrix: &FunctionMatrix,
) -> Result<usize, SemmapError> {
    let members = remap_members(map, matrix)?;
    let n = map.functions.len();
    Ok(members
        .iter()
        .map(|m| gram_violations(m, &map.edges, n))
        .sum())
}

/// Adds, one at a time, the edge that removes the most violations, breaking
/// ties by the smallest `(u, v)` in function order, until every gram is
/// contiguous.
pub fn infer_map_greedy(matrix: &FunctionMatrix) -> SemanticMap {
    let n = matrix.num_functions();
    let mut map = SemanticMap::empty(matrix.functions.clone(), Provenance::Greedy);
    loop {
        // gain[(u, v)] = grams that contain both u and v in separate
        // components; adding (u, v) reduces the total by exactly that much.
        let mut gain: HashMap<(usize, usize), usize> = HashMap::new();
        for members in &matrix.members {
            if members.len() < 2 {
                continue;
            }
            let mut inside = vec![false; n];
            members.iter().for_each(|&m| inside[m] = true);
            let mut sets = DisjointSet::new(n);
            for &(u, v) in &map.edges {
                if inside[u] && inside[v] {
                    sets.union(u, v);
                }
            }
            if sets.components() == n - members.len() + 1 {
                continue;
            }
            for (pos, &u) in members.iter().enumerate() {
                for &v in &members[pos + 1..] {
                    if sets.find(u) != sets.find(v) {
                        *gain.entry((u, v)).or_default() += 1;
                    }
                }
            }
        }
        let best = gain
            .into_iter()
            .max_by(|(ea, ga), (eb, gb)| ga.cmp(gb).then_with(|| eb.cmp(ea)));
        match best {
            Some((edge, _)) => {
                map.edges.insert(edge);
            }
            None => return map,
        }
    }
}

/// Minimum-edge map respecting every gram, found by enumerating edge subsets
/// in order of size and, within a size, in lexicographic order. The first
/// feasible subset is therefore the lexicographically least minimum.
pub fn infer_map_exact(
    matrix: &FunctionMatrix,
    max_functions: usize,
) -> Result<SemanticMap, SemmapError> {
    let n = matrix.num_functions();
    if n > max_functions || n > 16 {
        return Err(SemmapError::InstanceTooLarge {
            functions: n,
            max: max_functions.min(16),
        });
    }
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let gram_masks: Vec<u16> = matrix
        .members
        .iter()
        .filter(|m| m.len() > 1)
        .map(|m| m.iter().fold(0u16, |acc, &f| acc | (1 << f)))
        .collect();

    let feasible = |chosen: &[usize]| {
        let mut adj = [0u16; 16];
        for &e in chosen {
            let (u, v) = candidates[e];
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        gram_masks.iter().all(|&mask| {
            let start = mask.trailing_zeros() as usize;
            let mut reached: u16 = 1 << start;
            let mut frontier = reached;
            while frontier != 0 {
                let node = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let next = adj[node] & mask & !reached;
                reached |= next;
                frontier |= next;
            }
            reached == mask
        })
    };

    let m = candidates.len();
    for size in 0..=m {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if feasible(&combo) {
                let mut map = SemanticMap::empty(matrix.functions.clone(), Provenance::Exact);
                map.edges = combo.iter().map(|&e| candidates[e]).collect();
                return Ok(map);
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    unreachable!("the complete graph is always feasible")
}

/// Advances `combo` to the next `k`-subset of `0..m` in lexicographic order.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapScore {
    pub edge_precision: f64,
    pub edge_recall: f64,
    pub edge_f1: f64,
}

/// Edge-set precision, recall and F1. An empty prediction has precision 1
/// and an empty gold map gives recall 1.
pub fn compare_maps(predicted: &SemanticMap, gold: &SemanticMap) -> Result<MapScore, SemmapError> {
    let pred_set: BTreeSet<&str> = predicted.functions.iter().map(String::as_str).collect();
    let gold_set: BTreeSet<&str> = gold.functions.iter().map(String::as_str).collect();
    if pred_set != gold_set || pred_set.len() != predicted.functions.len() {
        return Err(SemmapError::NodeSetMismatch);
    }
    let labeled = |map: &SemanticMap| -> BTreeSet<(String, String)> {
        map.labeled_edges()
            .into_iter()
            .map(|[a, b]| if a < b { (a, b) } else { (b, a) })
            .collect()
    };
    let (p, g) = (labeled(predicted), labeled(gold));
    let hits = p.intersection(&g).count() as f64;
    let precision = if p.is_empty() {
        1.0
    } else {
        hits / p.len() as f64
    };
    let recall = if g.is_empty() {
        1.0
    } else {
        hits / g.len() as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(MapScore {
        edge_precision: precision,
        edge_recall: recall,
        edge_f1: f1,
    })
}

/// Pairwise cosine similarities between function centroids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSimilarity {
    pub functions: Vec<String>,
    pub similarities: Vec<Vec<f64>>,
}

impl FunctionSimilarity {
    /// Function pairs whose similarity reaches `threshold`, as `(u, v)` with
    /// `u < v`.
    pub fn candidate_edges(&self, threshold: f64) -> Vec<(usize, usize)> {
        let n = self.functions.len();
        (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.similarities[u][v] >= threshold)
            .collect()
    }
}

/// Averages each function's occurrence vectors at `layer` and returns the
/// pairwise centroid cosine matrix.
pub fn similarity_to_matrix(
    bundle: &EmbeddingBundle,
    layer: usize,
    occurrence_groups: &[(String, Vec<usize>)],
) -> Result<FunctionSimilarity, SemmapError> {
    let dim = bundle.dim();
    let centroids = occurrence_groups
        .iter()
        .map(|(label, rows)| {
            if rows.is_empty() {
                return Err(SemmapError::EmptyGroup(label.clone()));
            }
            let mut sum = vec![0.0f64; dim];
            for &row in rows {
                for (s, &x) in sum.iter_mut().zip(bundle.get_vector(layer, row)?) {
                    *s += x as f64;
                }
            }
            Ok(sum
                .iter()
                .map(|s| (s / rows.len() as f64) as f32)
                .collect::<Vec<f32>>())
        })
        .collect::<Result<Vec<_>, SemmapError>>()?;
    let similarities = centroids
        .iter()
        .map(|a| {
            centroids
                .iter()
                .map(|b| geometry::cosine(a, b))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FunctionSimilarity {
        functions: occurrence_groups.iter().map(|(l, _)| l.clone()).collect(),
        similarities,
    })
}
