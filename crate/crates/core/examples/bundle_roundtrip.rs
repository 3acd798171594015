//! Write a bundle to disk, load it back and read vectors.
//!
//! cargo run --example bundle_roundtrip

use lexprobe::store::{
    self, BundleManifest, EmbeddingBundle, Pos, RecordMeta, Setting, Side, Split, TokenRole,
};

pub fn run_example() -> lexprobe::Result<()> {
    let records = vec![
        RecordMeta {
            row: 0,
            pair_id: "dev-0".into(),
            side: Side::First,
            word: "bank".into(),
            pos: Pos::N,
            split: Split::Dev,
        },
        RecordMeta {
            row: 1,
            pair_id: "dev-0".into(),
            side: Side::Second,
            word: "bank".into(),
            pos: Pos::N,
            split: Split::Dev,
        },
    ];
    // two layers, dim 3, row-major
    let layers = vec![
        vec![1.0, -0.5, 0.25, 0.0, 2.0, 1.0],
        vec![0.5, 0.5, 0.5, -1.0, 0.0, 1.0],
    ];
    let manifest = BundleManifest::new("demo", Setting::Repeat, TokenRole::Target, 3, 2, 2);
    let bundle = EmbeddingBundle::new(manifest, records, layers)?;

    let dir = tempfile::tempdir().map_err(|source| lexprobe::Error::Io {
        path: std::env::temp_dir(),
        source,
    })?;
    store::write_bundle(&bundle, dir.path())?;
    let loaded = store::load_bundle(dir.path())?;
    assert_eq!(loaded, bundle);

    for layer in 0..loaded.num_layers() {
        for (record, row) in loaded.records.iter().zip(loaded.layer_rows(layer)?) {
            println!(
                "layer {layer} {} side {}: {row:?}",
                record.pair_id, record.side
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lexprobe::Result<()> {
    run_example()
}
