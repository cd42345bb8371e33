//! Regenerates the bundled fixture files.
//!
//! Usage: `cargo run -p stereoar-core --example gen_fixtures [DIR]`, where
//! `DIR` defaults to the workspace `fixtures/` directory.

use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    stereoar_core::fixtures::write_fixture_files(&dir)?;
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
