//! Infer a semantic map from a toy gram/function matrix with the greedy
//! and exact algorithms and score both against the gold map.
//!
//! cargo run --example semantic_map

use lexprobe::semmap::{self, FunctionMatrix, Provenance, SemanticMap};
use lexprobe::synthetic::toy_repetition_matrix;

pub fn run_example() -> lexprobe::Result<()> {
    let doc = toy_repetition_matrix();
    let matrix = FunctionMatrix::from_document(&doc)?;
    let gold = SemanticMap::from_labeled_edges(
        doc.functions.clone(),
        doc.gold_edges.as_deref().unwrap_or_default(),
        Provenance::Gold,
    )?;

    let greedy = semmap::infer_map_greedy(&matrix);
    let exact = semmap::infer_map_exact(&matrix, semmap::DEFAULT_MAX_EXACT_FUNCTIONS)?;
    for map in [&greedy, &exact, &gold] {
        let score = semmap::compare_maps(map, &gold)?;
        println!(
            "{:<6} edges={} violations={} P={:.2} R={:.2} F1={:.2}",
            map.provenance,
            map.num_edges(),
            semmap::connectivity_violations(map, &matrix)?,
            score.edge_precision,
            score.edge_recall,
            score.edge_f1
        );
        for [a, b] in map.labeled_edges() {
            println!("    {a} -- {b}");
        }
    }
    assert!(exact.num_edges() <= greedy.num_edges());
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
