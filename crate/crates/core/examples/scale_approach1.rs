//! Approach 1 scaling: Sinkhorn-Knopp on the bordered matrix of squared moduli.

use pencil_core::linalg::{from_real, zeros};
use pencil_core::pencil::Pencil;
use pencil_core::scaling::{apply_scaling, default_max_iter, quantize_pow2, scale_approach1};

fn main() -> pencil_core::Result<()> {
    let a = from_real(2, 2, &[1., 0., 0., 100.]);
    let b = zeros(2, 2);
    let r = scale_approach1(&a, &b, 1.0, 1.0, 1e-10, default_max_iter(2, 2, 1e-10))?;
    println!("d_left {:?}", r.d_left);
    println!("d_right {:?}", r.d_right);
    println!("γ_left {:.6}, γ_right {:.6}, {} iterations", r.gamma_left, r.gamma_right, r.iterations);

    let p = Pencil::new(a, b)?;
    let scaled = apply_scaling(&p, &r)?;
    println!("scaled L0 diagonal: {:.6}, {:.6}", scaled.l0[(0, 0)].re, scaled.l0[(1, 1)].re);

    let q = quantize_pow2(&r);
    println!("powers of two: d_left {:?}, d_right {:?}", q.d_left, q.d_right);
    Ok(())
}
