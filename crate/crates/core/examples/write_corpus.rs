//! Writes the seeded test corpus as quadruple files.
//!
//! `cargo run --example write_corpus -- <dir> [count] [seed]`

use std::path::PathBuf;

use pencil_core::fixtures::exact_corpus;
use pencil_core::io::write_quadruple;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "corpus".into()));
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    std::fs::create_dir_all(&dir)?;
    for (i, (kind, q)) in exact_corpus(count, seed).into_iter().enumerate() {
        let q = q.to_float()?;
        let path = dir.join(format!("{i:03}_{kind:?}.json").to_lowercase());
        std::fs::write(&path, write_quadruple(&q))?;
        println!("{}  d={} m={} n={}", path.display(), q.order(), q.outputs(), q.inputs());
    }
    Ok(())
}
