//! A realization with a hidden eigenvalue at 0 next to a pole at 0.
//!
//! Only the uncontrollable copy of the eigenvalue is deflated; the transfer
//! function is preserved up to the unitary factors `W_l`, `W_r`.

use pencil_core::fixtures::{example2, random_diagonal_polys};
use pencil_core::linalg::{c, fro_norm};
use pencil_core::minreal::{strongly_minimal_reduce, ReductionOrder};
use pencil_core::pencil::transfer_eval;
use pencil_core::staircase::kronecker_structure;

const TOL: f64 = 1e-12;

fn main() -> pencil_core::Result<()> {
    let (e5, e1) = random_diagonal_polys(3);
    let q = example2(&e5, &e1);
    let red = strongly_minimal_reduce(&q, TOL, 0, ReductionOrder::ControllableFirst)?;
    for rec in &red.records {
        let k = kronecker_structure(&rec.deflated, TOL, 0)?;
        let finite: Vec<String> = k.finite_eigen.iter().map(|f| format!("{:.3e}", f.value)).collect();
        println!("{:?}: {} deflated, finite [{}], infinite blocks {:?}", rec.side, rec.d_deflated(), finite.join(", "), k.infinite_blocks);
    }
    println!("order {} -> {}", q.order(), red.system.order());

    for z in [c(0.3, 0.7), c(-1.1, 0.2), c(2.0, -0.5)] {
        let r = transfer_eval(&q, z, TOL)?;
        let rmin = transfer_eval(&red.system, z, TOL)?;
        let err = fro_norm(&(rmin - &red.w_left * &r * &red.w_right)) / fro_norm(&r);
        println!("λ = {z}: relative error {err:.2e}");
    }
    Ok(())
}
