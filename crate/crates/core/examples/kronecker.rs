//! Kronecker structure of a singular pencil via the staircase algorithm.

use pencil_core::linalg::from_real;
use pencil_core::pencil::Pencil;
use pencil_core::staircase::{kronecker_structure, separate_regular_right};

fn main() -> pencil_core::Result<()> {
    // [λ −1 0 0; 0 λ −1 0; 0 0 0 λ−2]: one ε₂ block and the eigenvalue 2.
    let l1 = from_real(3, 4, &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1.]);
    let l0 = from_real(3, 4, &[0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 2.]);
    let p = Pencil::new(l0, l1)?;

    let k = kronecker_structure(&p, 1e-12, 0)?;
    println!("normal rank {}", k.normal_rank);
    for f in &k.finite_eigen {
        println!("finite eigenvalue {:.6} with partial multiplicities {:?}", f.value, f.partial_multiplicities);
    }
    println!("infinite blocks {:?}", k.infinite_blocks);
    println!("right minimal indices {:?}, left minimal indices {:?}", k.right_minimal, k.left_minimal);
    println!("dimension count consistent: {}", k.dimensions_consistent());

    let form = separate_regular_right(&p, 1e-12, 0)?;
    println!("regular part {}x{}, singular part {:?}", form.d_reg, form.d_reg, form.singular_part().shape());
    Ok(())
}
