//! Regenerate the committed test fixtures.
//!
//! cargo run --example generate_fixtures -- crates/core/tests/fixtures

use std::path::PathBuf;

fn main() -> lexprobe::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/core/tests/fixtures"));
    std::fs::create_dir_all(&dir).map_err(|source| lexprobe::Error::Io {
        path: dir.clone(),
        source,
    })?;
    lexprobe::synthetic::write_fixtures(&dir)?;
    println!("fixtures written to {}", dir.display());
    Ok(())
}
