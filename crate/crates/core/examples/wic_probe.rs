//! Layer-wise WiC probing on a planted bundle whose space has collapsed into
//! a narrow cone, with and without mean-centering.
//!
//! cargo run --example wic_probe

use lexprobe::synthetic::{PlantedWic, PLANTED_ANISOTROPY};
use lexprobe::wic::{self, Centering, EvalOptions, LayerEvaluation};

fn print_table(label: &str, eval: &LayerEvaluation) {
    println!("{label}");
    println!("layer  threshold  dev    test   noun   verb");
    for r in &eval.layers {
        let fmt = |v: Option<f64>| v.map_or("  -  ".to_string(), |v| format!("{v:.3}"));
        println!(
            "{:>5}  {:>9.2}  {:.3}  {}  {}  {}",
            r.layer,
            r.threshold,
            r.dev_accuracy,
            fmt(r.test_accuracy),
            fmt(r.accuracy_noun),
            fmt(r.accuracy_verb)
        );
    }
    println!(
        "best by dev: layer {} ({:.3})\n",
        eval.best_by_dev.layer, eval.best_by_dev.accuracy
    );
}

pub fn run_example() -> lexprobe::Result<()> {
    let (bundle, pairs) = PlantedWic {
        anisotropy: Some(PLANTED_ANISOTROPY),
        ..PlantedWic::default()
    }
    .build();

    let raw = wic::evaluate_layers(&bundle, &pairs, &EvalOptions::default())?;
    let centered = wic::evaluate_layers(
        &bundle,
        &pairs,
        &EvalOptions {
            centering: Centering::BundleMean,
            ..EvalOptions::default()
        },
    )?;
    print_table("without centering", &raw);
    print_table("with centering", &centered);
    assert!(centered.best_by_dev.accuracy > raw.best_by_dev.accuracy);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
