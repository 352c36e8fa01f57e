//! Quadruple files: bit-exact round trip and a structure report.

use pencil_core::fixtures::{example2, random_diagonal_polys};
use pencil_core::io::{parse_quadruple_str, structure_report, to_json, write_quadruple};

fn main() -> pencil_core::Result<()> {
    let (e5, e1) = random_diagonal_polys(8);
    let q = example2(&e5, &e1);
    let text = write_quadruple(&q);
    let back = parse_quadruple_str(&text)?;
    println!("{} bytes, round trip exact: {}", text.len(), back == q);

    let report = structure_report(&back, text.as_bytes(), 1e-12, 0, true)?;
    print!("{}", report.to_text());
    let json = to_json(&report);
    println!("json report: {} bytes, deterministic: {}", json.len(), json == to_json(&structure_report(&back, text.as_bytes(), 1e-12, 0, true)?));
    Ok(())
}
