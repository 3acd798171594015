//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the code paths it checks.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// Plain cosine in f64 with no clamping.
pub fn naive_cosine(u: &[f32], v: &[f32]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for i in 0..u.len() {
        dot += u[i] as f64 * v[i] as f64;
        nu += u[i] as f64 * u[i] as f64;
        nv += v[i] as f64 * v[i] as f64;
    }
    dot / (nu.sqrt() * nv.sqrt())
}

/// Reads one vector straight out of a layer file.
pub fn read_vector_from_file(path: &std::path::Path, row: usize, dim: usize) -> Vec<f32> {
    let bytes = std::fs::read(path).unwrap();
    let start = row * dim * 4;
    (0..dim)
        .map(|c| {
            let o = start + c * 4;
            f32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]])
        })
        .collect()
}

/// Scores every grid point `k * step` directly and returns the first
/// maximum.
pub fn rescan_threshold(sims: &[f64], golds: &[bool], step: f64) -> (f64, f64) {
    let count = (1.0 / step).round() as usize;
    let mut best_k = 0;
    let mut best_correct = 0;
    for k in 0..=count {
        let t = ((k as f64 * step) * 1e9).round() / 1e9;
        let correct = sims
            .iter()
            .zip(golds)
            .filter(|(s, g)| (**s >= t) == **g)
            .count();
        if k == 0 || correct > best_correct {
            best_correct = correct;
            best_k = k;
        }
    }
    (
        ((best_k as f64 * step) * 1e9).round() / 1e9,
        best_correct as f64 / sims.len() as f64,
    )
}

/// Dense boolean adjacency matrix.
pub fn adjacency_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(i, j) in edges {
        m[i][j] = true;
        m[j][i] = true;
    }
    m
}

/// Components by iterative depth-first search, each sorted, ordered by
/// smallest member.
pub fn dfs_components(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            comp.push(u);
            for v in 0..n {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn naive_degrees(adj: &[Vec<bool>]) -> Vec<usize> {
    adj.iter()
        .map(|row| row.iter().filter(|&&x| x).count())
        .collect()
}

/// Mean over nodes of (links among neighbors) / C(deg, 2), 0 for deg < 2.
pub fn naive_mean_clustering(adj: &[Vec<bool>]) -> f64 {
    let n = adj.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for u in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&v| adj[u][v]).collect();
        let d = nbrs.len();
        if d < 2 {
            continue;
        }
        let mut links = 0;
        for a in 0..d {
            for b in a + 1..d {
                if adj[nbrs[a]][nbrs[b]] {
                    links += 1;
                }
            }
        }
        total += links as f64 / (d * (d - 1) / 2) as f64;
    }
    total / n as f64
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Induced-subgraph component count minus one, summed over grams, via
/// breadth-first search on an adjacency matrix.
pub fn naive_violations(n: usize, edges: &[(usize, usize)], grams: &[Vec<usize>]) -> usize {
    let adj = adjacency_matrix(n, edges);
    let mut total = 0;
    for gram in grams {
        let mut members: Vec<usize> = gram.clone();
        members.sort_unstable();
        members.dedup();
        let mut seen = vec![false; n];
        let mut comps = 0usize;
        for &s in &members {
            if seen[s] {
                continue;
            }
            comps += 1;
            let mut queue = std::collections::VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                for &v in &members {
                    if adj[u][v] && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        total += comps.saturating_sub(1);
    }
    total
}

/// Minimum feasible edge count and the lexicographically least minimum
/// (edges listed in `(u, v)` order), by scanning all 2^m subsets.
pub fn brute_force_min_map(n: usize, grams: &[Vec<usize>]) -> (usize, Vec<(usize, usize)>) {
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let m = candidates.len();
    let mut best: Option<Vec<(usize, usize)>> = None;
    for mask in 0u64..(1u64 << m) {
        let edges: Vec<(usize, usize)> = (0..m)
            .filter(|&b| mask & (1 << b) != 0)
            .map(|b| candidates[b])
            .collect();
        if naive_violations(n, &edges, grams) != 0 {
            continue;
        }
        best = match best {
            None => Some(edges),
            Some(b) if edges.len() < b.len() || (edges.len() == b.len() && edges < b) => {
                Some(edges)
            }
            keep => keep,
        };
    }
    let best = best.expect("complete graph is feasible");
    (best.len(), best)
}

/// Ranks labels by similarity to `b - a + c` with a full sort.
pub fn brute_force_analogy(
    labels: &[String],
    vectors: &[Vec<f32>],
    a: usize,
    b: usize,
    c: usize,
) -> Vec<String> {
    let q: Vec<f32> = (0..vectors[0].len())
        .map(|d| (vectors[b][d] as f64 - vectors[a][d] as f64 + vectors[c][d] as f64) as f32)
        .collect();
    let mut scored: Vec<(f64, &String)> = (0..labels.len())
        .filter(|&i| i != a && i != b && i != c)
        .map(|i| (naive_cosine(&q, &vectors[i]), &labels[i]))
        .collect();
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(y.1)));
    scored.into_iter().map(|(_, l)| l.clone()).collect()
}
