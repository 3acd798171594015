//! Vector-offset analogies over a toy lexicon: man is to king as woman is
//! to ...
//!
//! cargo run --example analogy

use lexprobe::network::{self, LabeledVectors};
use lexprobe::synthetic::toy_lexicon;

pub fn run_example() -> lexprobe::Result<()> {
    let vectors = LabeledVectors::from_bundle(&toy_lexicon(11), 0)?;
    for (a, b, c) in [
        ("man", "king", "woman"),
        ("boy", "prince", "girl"),
        ("man", "boy", "woman"),
    ] {
        let hits = network::analogy(&vectors, a, b, c, 3)?;
        let shown: Vec<String> = hits
            .iter()
            .map(|h| format!("{} ({:.3})", h.label, h.similarity))
            .collect();
        println!("{a} : {b} :: {c} : {}", shown.join(", "));
    }
    let top = network::analogy(&vectors, "man", "king", "woman", 1)?;
    assert_eq!(top[0].label, "queen");
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
