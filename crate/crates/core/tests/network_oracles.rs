mod common;

use std::collections::BTreeSet;

use lexprobe::network::{self, LabeledVectors, Measure, Pruning, SimilarityGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labeled(vectors: &[Vec<f32>]) -> LabeledVectors {
    LabeledVectors::new(
        vectors[0].len(),
        vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (format!("w{i:03}"), v.clone()))
            .collect(),
    )
    .unwrap()
}

fn arb_vectors() -> impl Strategy<Value = Vec<Vec<f32>>> {
    (3usize..20, 2usize..6).prop_flat_map(|(n, d)| {
        proptest::collection::vec(
            proptest::collection::vec(-1.0f32..1.0, d)
                .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3)),
            n,
        )
    })
}

fn edge_set(g: &SimilarityGraph) -> BTreeSet<(usize, usize)> {
    g.edges.iter().map(|e| (e.i, e.j)).collect()
}

proptest! {
    #[test]
    fn knn_is_union_of_directed_lists(vectors in arb_vectors(), k in 1usize..3) {
        let v = labeled(&vectors);
        let g = network::build_graph(&v, Pruning::Knn { k }, Measure::Cosine).unwrap();
        let n = vectors.len();
        // directed lists by full sort: similarity desc, label asc
        let knn: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut others: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (common::naive_cosine(&vectors[i], &vectors[j]), j))
                    .collect();
                others.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
                others.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect();
        let expected: BTreeSet<(usize, usize)> = (0..n)
            .flat_map(|i| knn[i].iter().map(move |&j| (i.min(j), i.max(j))))
            .collect();
        prop_assert_eq!(edge_set(&g), expected);
        prop_assert!(g.degrees().iter().all(|&d| d >= 1));
    }

    #[test]
    fn threshold_pruning_is_monotone(vectors in arb_vectors(), e1 in -1.0f64..1.0, e2 in -1.0f64..1.0) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let v = labeled(&vectors);
        let g_lo = network::build_graph(&v, Pruning::Threshold { epsilon: lo }, Measure::Cosine).unwrap();
        let g_hi = network::build_graph(&v, Pruning::Threshold { epsilon: hi }, Measure::Cosine).unwrap();
        prop_assert!(edge_set(&g_hi).is_subset(&edge_set(&g_lo)));
        prop_assert!(network::graph_stats(&g_hi).num_components >= network::graph_stats(&g_lo).num_components);
    }

    #[test]
    fn analogy_never_returns_query_labels(vectors in arb_vectors()) {
        let v = labeled(&vectors);
        let labels = v.labels().to_vec();
        if let Ok(hits) = network::analogy(&v, &labels[0], &labels[1], &labels[2], labels.len()) {
            prop_assert!(hits.iter().all(|h| !labels[..3].contains(&h.label)));
            prop_assert_eq!(hits.len(), labels.len() - 3);
        }
    }
}

#[test]
fn stats_match_adjacency_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(1..=100);
        let p = rng.gen_range(0.0..0.15);
        let edges = common::random_graph(&mut rng, n, p);
        let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
        let g = SimilarityGraph::from_edges(names, edges.iter().map(|&(i, j)| (i, j, 1.0)));
        let adj = common::adjacency_matrix(n, &edges);
        let stats = network::graph_stats(&g);
        assert_eq!(
            network::connected_components(&g),
            common::dfs_components(&adj)
        );
        assert_eq!(stats.num_components, common::dfs_components(&adj).len());
        assert_eq!(g.degrees(), common::naive_degrees(&adj));
        assert_eq!(stats.num_edges, edges.len());
        assert!((stats.mean_clustering - common::naive_mean_clustering(&adj)).abs() < 1e-12);
        let hist_total: usize = stats.degree_histogram.iter().sum();
        assert_eq!(hist_total, n);
    }
}

#[test]
fn analogy_matches_full_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let vectors: Vec<Vec<f32>> = (0..50)
        .map(|_| (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let v = labeled(&vectors);
    let labels = v.labels().to_vec();
    for (a, b, c) in [(0, 1, 2), (10, 20, 30), (49, 3, 17)] {
        let got: Vec<String> = network::analogy(&v, &labels[a], &labels[b], &labels[c], 47)
            .unwrap()
            .into_iter()
            .map(|h| h.label)
            .collect();
        assert_eq!(got, common::brute_force_analogy(&labels, &vectors, a, b, c));
    }
}

#[test]
fn centered_measure_uses_centered_vectors() {
    // offset cone: raw cosine links everything, centered cosine separates
    let vectors = vec![
        vec![10.0, 10.0, 1.0, 0.0],
        vec![10.0, 10.0, 1.0, 0.1],
        vec![10.0, 10.0, -1.0, 0.0],
        vec![10.0, 10.0, -1.0, -0.1],
    ];
    let v = labeled(&vectors);
    let raw =
        network::build_graph(&v, Pruning::Threshold { epsilon: 0.9 }, Measure::Cosine).unwrap();
    assert_eq!(raw.num_edges(), 6);
    let centered = network::build_graph(
        &v,
        Pruning::Threshold { epsilon: 0.9 },
        Measure::CenteredCosine,
    )
    .unwrap();
    assert_eq!(network::graph_stats(&centered).num_components, 2);
}
