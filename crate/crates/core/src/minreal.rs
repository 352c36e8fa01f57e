//! Strongly minimal realizations: deflation of the eigenvalues of `[A −B]`
//! and `[A; C]` by unitary equivalence of the system pencil.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, c, col_compress, complete_unitary, fro_norm, identity, ComplexMatrix, Eigenvalue, ZeroSide,
};
use crate::pencil::{system_pencil, Pencil, SystemQuadruple};
use crate::staircase::{kronecker_structure, separate_regular_right, KroneckerReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Controllable,
    Observable,
}

/// Transformations of one deflation step. For the controllable side
/// `diag(U, I)·S·diag(V, I)·W̃` has the deflated pencil `X` in its leading
/// block and the reduced system pencil in its trailing block; for the
/// observable side the transformation reads `W̃·diag(U, I)·S·diag(V, I)`.
#[derive(Debug, Clone)]
pub struct ReductionRecord {
    pub side: Side,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub w_tilde: ComplexMatrix,
    pub deflated: Pencil,
    pub residual: f64,
    pub ambiguous: bool,
}

impl ReductionRecord {
    pub fn d_deflated(&self) -> usize {
        self.deflated.nrows()
    }

    /// `W̃33`: `R_c = R·W̃33` on the controllable side, `R_o = W̃33·R` on the
    /// observable side.
    pub fn w33(&self) -> ComplexMatrix {
        let d = self.u.nrows();
        let k = self.w_tilde.nrows() - d;
        self.w_tilde.view((d, d), (k, k)).into_owned()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offending {
    pub side: Side,
    pub value: Eigenvalue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub strongly_controllable: bool,
    pub strongly_observable: bool,
    pub offending: Vec<Offending>,
    pub ambiguous: bool,
}

impl MinimalityReport {
    pub fn strongly_minimal(&self) -> bool {
        self.strongly_controllable && self.strongly_observable
    }
}

fn offending(report: &KroneckerReport, side: Side) -> Vec<Offending> {
    let mut out: Vec<Offending> =
        report.finite_eigen.iter().map(|f| Offending { side, value: Eigenvalue::Finite(f.value) }).collect();
    if !report.infinite_blocks.is_empty() {
        out.push(Offending { side, value: Eigenvalue::Infinite });
    }
    out
}

/// Checks that `[A −B]` and `[A; C]` have no finite or infinite eigenvalues.
pub fn is_strongly_minimal(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<MinimalityReport> {
    q.check_regular(tol, seed)?;
    let kc = kronecker_structure(&q.controllability_pencil(), tol, seed)?;
    let ko = kronecker_structure(&q.observability_pencil(), tol, seed)?;
    let mut off = offending(&kc, Side::Controllable);
    off.extend(offending(&ko, Side::Observable));
    Ok(MinimalityReport {
        strongly_controllable: !kc.has_eigenvalues(),
        strongly_observable: !ko.has_eigenvalues(),
        offending: off,
        ambiguous: kc.ambiguous || ko.ambiguous,
    })
}

/// The bordered pencils `[[A, −B, 0], [C, D, −I]]` and `[[A, −B], [C, D], [0, I]]`
/// have no finite eigenvalues and no infinite blocks of size two or more.
pub fn is_strongly_irreducible(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<bool> {
    q.check_regular(tol, seed)?;
    let (d, m, n) = (q.order(), q.outputs(), q.inputs());
    let s = system_pencil(q);
    let minus_i = Pencil::constant(identity(m) * c(-1.0, 0.0));
    let right = Pencil::grid(&[d + m], &[d + n, m], &[&s, &Pencil::grid(&[d, m], &[m], &[&Pencil::zeros(d, m), &minus_i])]);
    let plus_i = Pencil::constant(identity(n));
    let below = Pencil::grid(&[n], &[d, n], &[&Pencil::zeros(n, d), &plus_i]);
    let lower = s.vcat(&below);
    for p in [right, lower] {
        let k = kronecker_structure(&p, tol, seed)?;
        if !k.finite_eigen.is_empty() || k.infinite_blocks.iter().any(|&b| b >= 2) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn unchanged_record(q: &SystemQuadruple, side: Side) -> ReductionRecord {
    let (d, m, n) = (q.order(), q.outputs(), q.inputs());
    let k = match side {
        Side::Controllable => n,
        Side::Observable => m,
    };
    ReductionRecord {
        side,
        u: identity(d),
        v: identity(d),
        w_tilde: identity(d + k),
        deflated: Pencil::zeros(0, 0),
        residual: 0.0,
        ambiguous: false,
    }
}

/// Removes all eigenvalues of `[A −B]`; `R_c = R·W̃33` with `W̃33` unitary
/// when `A` keeps no pole in the deflated part.
pub fn reduce_controllable(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<(SystemQuadruple, ReductionRecord)> {
    q.check_regular(tol, seed)?;
    let (d, m, n) = (q.order(), q.outputs(), q.inputs());
    if d == 0 {
        return Ok((q.clone(), unchanged_record(q, Side::Controllable)));
    }
    let form = separate_regular_right(&q.controllability_pencil(), tol, seed)?;
    let r = form.d_reg;
    if r == 0 {
        let mut rec = unchanged_record(q, Side::Controllable);
        rec.ambiguous = form.ambiguous;
        return Ok((q.clone(), rec));
    }
    let w1 = form.w.rows(0, r);
    let (v, rank) = col_compress(&w1.columns(0, d).into_owned(), tol, ZeroSide::Right)?;
    if rank != r {
        return Err(Error::InconsistentDeflation(format!("W11 block has rank {rank}, expected {r}")));
    }
    let w11_hat = (w1.columns(0, d) * &v).columns(0, r).into_owned();
    let w13 = w1.columns(d, n).into_owned();
    let mut mh = ComplexMatrix::zeros(r + n, r);
    mh.view_mut((0, 0), (r, r)).copy_from(&w11_hat.adjoint());
    mh.view_mut((r, 0), (n, r)).copy_from(&w13.adjoint());
    let omega = complete_unitary(&mh);

    let size = d + n;
    let mut w_tilde = ComplexMatrix::zeros(size, size);
    let map = |i: usize| if i < r { i } else { d + (i - r) };
    for i in 0..r + n {
        for j in 0..r + n {
            w_tilde[(map(i), map(j))] = omega[(i, j)];
        }
    }
    for i in r..d {
        w_tilde[(i, i)] = c(1.0, 0.0);
    }

    let s = system_pencil(q);
    let left = block_diag(&form.u, &identity(m));
    let right = block_diag(&v, &identity(n)) * &w_tilde;
    let t = s.transform(&left, &right);

    let mut residual: f64 = 0.0;
    for mat in [&t.l0, &t.l1] {
        residual = residual.max(fro_norm(&mat.view((0, r), (r, size - r)).into_owned()));
    }
    let neg = c(-1.0, 0.0);
    let a = t.sub(r, r, d - r, d - r);
    let b = t.sub(r, d, d - r, n).scaled(neg);
    let cc = t.sub(d, r, m, d - r);
    let dd = t.sub(d, d, m, n);
    let reduced = SystemQuadruple::new(a, b, cc, dd)?;
    Ok((
        reduced,
        ReductionRecord {
            side: Side::Controllable,
            u: form.u,
            v,
            w_tilde,
            deflated: t.sub(0, 0, r, r),
            residual,
            ambiguous: form.ambiguous,
        },
    ))
}

/// Dual of [`reduce_controllable`] through `{Aᵀ, Cᵀ, Bᵀ, Dᵀ}`; `R_o = W̃33·R`.
pub fn reduce_observable(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<(SystemQuadruple, ReductionRecord)> {
    let (qt, rec) = reduce_controllable(&q.transpose(), tol, seed)?;
    Ok((
        qt.transpose(),
        ReductionRecord {
            side: Side::Observable,
            u: rec.v.transpose(),
            v: rec.u.transpose(),
            w_tilde: rec.w_tilde.transpose(),
            deflated: rec.deflated.transpose(),
            residual: rec.residual,
            ambiguous: rec.ambiguous,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReductionOrder {
    /// Controllable side first, then observable.
    #[default]
    ControllableFirst,
    ObservableFirst,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub system: SystemQuadruple,
    /// `R_min = W_l·R·W_r`.
    pub w_left: ComplexMatrix,
    pub w_right: ComplexMatrix,
    pub records: Vec<ReductionRecord>,
}

impl Reduction {
    pub fn total_deflated(&self) -> usize {
        self.records.iter().map(ReductionRecord::d_deflated).sum()
    }

    pub fn ambiguous(&self) -> bool {
        self.records.iter().any(|r| r.ambiguous)
    }
}

const MAX_PASSES: usize = 3;

/// Deflates both sides until `[A −B]` and `[A; C]` have no eigenvalues.
pub fn strongly_minimal_reduce(
    q: &SystemQuadruple,
    tol: f64,
    seed: u64,
    order: ReductionOrder,
) -> Result<Reduction> {
    let mut system = q.clone();
    let mut w_left = identity(q.outputs());
    let mut w_right = identity(q.inputs());
    let mut records = Vec::new();
    for _ in 0..MAX_PASSES {
        let sides = match order {
            ReductionOrder::ControllableFirst => [Side::Controllable, Side::Observable],
            ReductionOrder::ObservableFirst => [Side::Observable, Side::Controllable],
        };
        let mut deflated = 0;
        for side in sides {
            let (next, rec) = match side {
                Side::Controllable => reduce_controllable(&system, tol, seed)?,
                Side::Observable => reduce_observable(&system, tol, seed)?,
            };
            match side {
                Side::Controllable => w_right = &w_right * rec.w33(),
                Side::Observable => w_left = rec.w33() * &w_left,
            }
            deflated += rec.d_deflated();
            system = next;
            records.push(rec);
        }
        if deflated == 0 || system.order() == 0 {
            break;
        }
        if is_strongly_minimal(&system, tol, seed)?.strongly_minimal() {
            break;
        }
    }
    Ok(Reduction { system, w_left, w_right, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, zeros, C64};
    use crate::pencil::transfer_eval;

    fn real(m: usize, n: usize, c0: &[f64], c1: &[f64]) -> Pencil {
        Pencil::from_coeffs(from_real(m, n, c0), from_real(m, n, c1)).unwrap()
    }

    /// A = λ − 1 (x2), with the second state uncontrollable: pole at 1 cancels.
    fn uncontrollable() -> SystemQuadruple {
        SystemQuadruple::new(
            real(2, 2, &[-1.0, 0.0, 0.0, -2.0], &[1.0, 0.0, 0.0, 1.0]),
            real(2, 1, &[1.0, 0.0], &[0.0, 0.0]),
            real(1, 2, &[1.0, 1.0], &[0.0, 0.0]),
            real(1, 1, &[0.0], &[0.0]),
        )
        .unwrap()
    }

    #[test]
    fn detects_uncontrollable_mode() {
        let q = uncontrollable();
        let rep = is_strongly_minimal(&q, 1e-12, 0).unwrap();
        assert!(!rep.strongly_controllable);
        assert!(rep.strongly_observable);
        assert_eq!(rep.offending.len(), 1);
        let z = rep.offending[0].value.finite().unwrap();
        assert!((z - C64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn controllable_reduction_preserves_transfer() {
        let q = uncontrollable();
        let (qc, rec) = reduce_controllable(&q, 1e-12, 0).unwrap();
        assert_eq!(qc.order(), 1);
        assert_eq!(rec.d_deflated(), 1);
        assert!(rec.residual < 1e-12);
        let w33 = rec.w33();
        assert!(crate::linalg::unitarity_defect(&w33) < 1e-12);
        for z in [C64::new(0.3, 0.7), C64::new(-2.0, 1.0)] {
            let r = transfer_eval(&q, z, 1e-12).unwrap();
            let rc = transfer_eval(&qc, z, 1e-12).unwrap();
            assert!(fro_norm(&(r * &w33 - rc)) < 1e-12);
        }
        assert!(is_strongly_minimal(&qc, 1e-12, 0).unwrap().strongly_minimal());
    }

    #[test]
    fn observable_side_and_combined() {
        let q = uncontrollable().transpose();
        let (qo, rec) = reduce_observable(&q, 1e-12, 0).unwrap();
        assert_eq!(qo.order(), 1);
        let w33 = rec.w33();
        let z = C64::new(0.1, -0.4);
        let r = transfer_eval(&q, z, 1e-12).unwrap();
        let ro = transfer_eval(&qo, z, 1e-12).unwrap();
        assert!(fro_norm(&(&w33 * r - ro)) < 1e-12);

        for order in [ReductionOrder::ControllableFirst, ReductionOrder::ObservableFirst] {
            let red = strongly_minimal_reduce(&uncontrollable(), 1e-12, 0, order).unwrap();
            assert_eq!(red.system.order(), 1);
            let r = transfer_eval(&uncontrollable(), z, 1e-12).unwrap();
            let rm = transfer_eval(&red.system, z, 1e-12).unwrap();
            assert!(fro_norm(&(&red.w_left * r * &red.w_right - rm)) < 1e-12);
        }
    }

    #[test]
    fn d_only_quadruple() {
        let q = SystemQuadruple::new(
            Pencil::zeros(0, 0),
            Pencil::zeros(0, 2),
            Pencil::zeros(2, 0),
            Pencil::constant(zeros(2, 2)),
        )
        .unwrap();
        assert!(is_strongly_minimal(&q, 1e-12, 0).unwrap().strongly_minimal());
        assert!(is_strongly_irreducible(&q, 1e-12, 0).unwrap());
        let red = strongly_minimal_reduce(&q, 1e-12, 0, ReductionOrder::default()).unwrap();
        assert_eq!(red.total_deflated(), 0);
    }

    #[test]
    fn irreducibility() {
        // A = λ, B = 1, C = 1, D = 0: R = 1/λ.
        let q = SystemQuadruple::new(
            real(1, 1, &[0.0], &[1.0]),
            real(1, 1, &[1.0], &[0.0]),
            real(1, 1, &[1.0], &[0.0]),
            real(1, 1, &[0.0], &[0.0]),
        )
        .unwrap();
        assert!(is_strongly_irreducible(&q, 1e-12, 0).unwrap());
        assert!(!is_strongly_irreducible(&uncontrollable(), 1e-12, 0).unwrap());
    }
}
