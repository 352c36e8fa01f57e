//! Pole/zero structure of `R(λ) = diag(λ, 1/λ)` and the degree-sum identity.

use pencil_core::linalg::{from_real, zeros};
use pencil_core::mcmillan::{degree_sum_check, rational_structure, MinimalityPolicy};
use pencil_core::pencil::{Pencil, SystemQuadruple};

fn main() -> pencil_core::Result<()> {
    // A(λ) = λ, B = [0 1], C = [0; 1], D(λ) = diag(λ, 0).
    let a = Pencil::from_coeffs(zeros(1, 1), from_real(1, 1, &[1.]))?;
    let b = Pencil::constant(from_real(1, 2, &[0., 1.]));
    let c = Pencil::constant(from_real(2, 1, &[0., 1.]));
    let d = Pencil::from_coeffs(zeros(2, 2), from_real(2, 2, &[1., 0., 0., 0.]))?;
    let q = SystemQuadruple::new(a, b, c, d)?;

    let s = rational_structure(&q, 1e-12, 0, MinimalityPolicy::Reduce)?;
    println!("normal rank {}", s.normal_rank);
    for p in &s.finite {
        println!("at {}: indices {:?}", p.value, p.indices);
    }
    println!("at infinity: {:?}", s.infinity);
    println!(
        "polar degree {} = zero degree {} + minimal indices {}: {}",
        s.polar_degree(),
        s.zero_degree(),
        s.minimal_index_sum(),
        degree_sum_check(&s)
    );
    Ok(())
}
