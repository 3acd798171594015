//! Build word networks over a toy lexicon at several pruning levels and
//! report zoom-out statistics.
//!
//! cargo run --example word_network

use lexprobe::network::{self, LabeledVectors, Measure, Pruning};
use lexprobe::synthetic::toy_lexicon;

pub fn run_example() -> lexprobe::Result<()> {
    let bundle = toy_lexicon(11);
    let vectors = LabeledVectors::from_bundle(&bundle, 0)?;

    for k in [1, 2, 3] {
        let g = network::build_graph(&vectors, Pruning::Knn { k }, Measure::Cosine)?;
        let s = network::graph_stats(&g);
        println!(
            "knn k={k}: edges={} components={} clustering={:.3}",
            s.num_edges, s.num_components, s.mean_clustering
        );
    }
    let mut last = 0;
    for epsilon in [0.2, 0.5, 0.8, 0.95] {
        let g = network::build_graph(
            &vectors,
            Pruning::Threshold { epsilon },
            Measure::CenteredCosine,
        )?;
        let comps = network::connected_components(&g);
        assert!(comps.len() >= last);
        last = comps.len();
        let named: Vec<Vec<&str>> = comps
            .iter()
            .map(|c| c.iter().map(|&i| g.nodes[i].as_str()).collect())
            .collect();
        println!("threshold {epsilon}: {} components {named:?}", comps.len());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
