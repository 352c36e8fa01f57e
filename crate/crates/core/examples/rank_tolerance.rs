//! Numerical rank decisions and the ambiguity flag.

use pencil_core::linalg::{from_real, rank, rank_revealing};

fn main() -> pencil_core::Result<()> {
    let m = from_real(2, 2, &[1., 0., 0., 1e-16]);
    println!("rank diag(1, 1e-16) at tol 1e-12: {}", rank(&m, 1e-12));

    for eps in [1e-6, 1e-9, 1e-10, 1e-14] {
        let m = from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9. + eps]);
        let rr = rank_revealing(&m, 1e-12)?;
        println!("perturbation {eps:e}: rank {}, ambiguous {}", rr.decision.rank, rr.decision.ambiguous());
    }
    Ok(())
}
