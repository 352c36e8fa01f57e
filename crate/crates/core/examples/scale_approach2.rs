//! Approach 2 scaling of a badly scaled square pencil; eigenvalues are kept.

use pencil_core::linalg::{generalized_eigenvalues, C64};
use pencil_core::matching::match_points;
use pencil_core::pencil::Pencil;
use pencil_core::scaling::{apply_scaling, scale_approach2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spread(p: &Pencil) -> f64 {
    let norms: Vec<f64> = (0..p.nrows()).map(|i| (p.l0.row(i).norm_squared() + p.l1.row(i).norm_squared()).sqrt()).collect();
    norms.iter().cloned().fold(0.0, f64::max) / norms.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn main() -> pencil_core::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 5;
    let scales: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-4.0..4.0))).collect();
    let mut draw = || {
        pencil_core::linalg::ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(rng.gen_range(-1.0..1.0), 0.0) * scales[i] / scales[j]
        })
    };
    let (a, b) = (draw(), draw());
    let p = Pencil::new(a.clone(), b.clone())?;

    let r = scale_approach2(&a, &b, 1.0, 1.0, 1e-10, 10_000)?;
    let scaled = apply_scaling(&p, &r)?;
    println!("row norm spread {:.3e} -> {:.3e} ({} iterations)", spread(&p), spread(&scaled), r.iterations);
    println!("d_λ = {:.6}", r.d_lambda);

    let before = generalized_eigenvalues(&p, 1e-12)?;
    let after = generalized_eigenvalues(&scaled, 1e-12)?;
    let finite = |v: &[pencil_core::linalg::Eigenvalue]| v.iter().filter_map(|e| e.finite()).collect::<Vec<C64>>();
    let (x, y) = (finite(&before), finite(&after));
    let (_, dist) = match_points(&x, &y);
    let largest = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("{} eigenvalues, largest modulus {largest:.4e}, matched distance {dist:.2e}", x.len());
    Ok(())
}
