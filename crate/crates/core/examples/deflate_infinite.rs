//! Strongly minimal reduction of the linearization of `diag(e5, e1)`.
//!
//! The leading coefficient `diag(e5₅, 0)` is singular, so the 10×10 system
//! pencil carries extraneous infinite eigenvalues that the reduction removes.

use pencil_core::fixtures::{example1, random_diagonal_polys};
use pencil_core::mcmillan::{rational_structure, MinimalityPolicy};
use pencil_core::minreal::{is_strongly_minimal, strongly_minimal_reduce, ReductionOrder};
use pencil_core::pencil::system_pencil;
use pencil_core::staircase::kronecker_structure;

const TOL: f64 = 1e-12;

fn main() -> pencil_core::Result<()> {
    let (e5, e1) = random_diagonal_polys(1);
    let q = example1(&e5, &e1);
    let s = system_pencil(&q);
    println!("system pencil {}x{}, state order {}", s.nrows(), s.ncols(), q.order());

    let before = is_strongly_minimal(&q, TOL, 0)?;
    println!("strongly controllable {}, strongly observable {}", before.strongly_controllable, before.strongly_observable);
    for o in &before.offending {
        println!("  offending {:?} eigenvalue {:?}", o.side, o.value);
    }

    let red = strongly_minimal_reduce(&q, TOL, 0, ReductionOrder::ControllableFirst)?;
    for rec in &red.records {
        let k = kronecker_structure(&rec.deflated, TOL, 0)?;
        println!(
            "{:?} step: deflated {} ({} infinite, {} finite)",
            rec.side,
            rec.d_deflated(),
            k.infinite_count(),
            k.finite_count()
        );
    }
    println!("order {} -> {}", q.order(), red.system.order());

    let smin = system_pencil(&red.system);
    let rank_l1 = pencil_core::linalg::rank(&smin.l1, TOL);
    let structure = rational_structure(&red.system, TOL, 0, MinimalityPolicy::Assume)?;
    println!("rank L1 of the minimal pencil {rank_l1}, McMillan degree {}", structure.polar_degree());
    Ok(())
}
