//! Exact transfer function and McMillan structure next to the numerical one.

use pencil_core::exact::{full_structure_exact, transfer_exact};
use pencil_core::fixtures::exact_corpus;
use pencil_core::mcmillan::{rational_structure, MinimalityPolicy};

fn main() -> pencil_core::Result<()> {
    for (kind, eq) in exact_corpus(5, 11) {
        let r = transfer_exact(&eq)?;
        let exact = full_structure_exact(&r)?;
        let numeric = rational_structure(&eq.to_float()?, 1e-12, 0, MinimalityPolicy::Reduce)?;
        println!("{kind:?}: d = {}, normal rank {}", eq.a.rows, exact.normal_rank);
        for p in &exact.finite {
            println!("  exact factor {} indices {:?}", p.factor, p.indices);
        }
        println!("  exact infinity {:?}, numeric infinity {:?}", exact.infinity, numeric.infinity);
        println!(
            "  polar degree exact {} numeric {}, agree {}",
            exact.polar_degree(),
            numeric.polar_degree(),
            numeric.agrees_with(&exact.to_mcmillan(), 1e-8)
        );
    }
    Ok(())
}
