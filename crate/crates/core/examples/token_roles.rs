//! Compare target-word vectors with previous-token vectors layer by layer.
//! The planted previous-token bundle only carries sense information at the
//! last layer.
//!
//! cargo run --example token_roles

use lexprobe::store::TokenRole;
use lexprobe::synthetic::PlantedWic;
use lexprobe::wic::{self, EvalOptions};

pub fn run_example() -> lexprobe::Result<()> {
    let base = PlantedWic::default();
    let (target, pairs) = base.build();
    let (prev, _) = PlantedWic {
        token_role: TokenRole::Prev,
        informative_from: base.num_layers - 1,
        seed: base.seed + 1,
        ..base.clone()
    }
    .build();

    let cmp = wic::compare_token_roles(&target, &prev, &pairs, &EvalOptions::default())?;
    println!("layer  target  prev   delta");
    for ((t, o), d) in cmp
        .target
        .layers
        .iter()
        .zip(&cmp.other.layers)
        .zip(&cmp.deltas)
    {
        println!(
            "{:>5}  {:.3}   {:.3}  {:+.3}",
            d.layer,
            t.test_accuracy.unwrap_or(t.dev_accuracy),
            o.test_accuracy.unwrap_or(o.dev_accuracy),
            d.test_delta.unwrap_or(d.dev_delta)
        );
    }
    assert_eq!(cmp.deltas.last().map(|d| d.dev_delta), Some(0.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
