//! Exact rational-function arithmetic over the Gaussian rationals, used as an
//! independent oracle for the floating-point structure computations.

mod field;
mod matrix;
mod poly;
mod ratfun;
mod structure;

pub use field::Gq;
pub use matrix::{transfer_exact, ExactQuadruple, GqMatrix, Mat, PolyMatrix, RatMatrix};
pub use poly::{gcd_free_basis, Poly};
pub use ratfun::RatFun;
pub use structure::{
    full_structure_exact, infinity_structure_exact, local_structure_exact, minimal_indices_exact, ExactPoint,
    ExactStructure,
};
