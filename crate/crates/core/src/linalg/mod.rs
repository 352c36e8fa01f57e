//! Dense complex kernels: SVD-based rank decisions, unitary compressions and
//! the generalized eigenvalues of square regular pencils.

mod jacobi;
mod qz;

use nalgebra::{DMatrix, QR};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use qz::qz_pairs;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub const DEFAULT_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(m: usize, n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(m, n)
}

pub fn from_real(m: usize, n: usize, data: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(m, n, data.iter().map(|&x| cr(x)))
}

pub fn fro_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm via the largest singular value.
pub fn norm2(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest deviation of `QᴴQ` from the identity.
pub fn unitarity_defect(q: &ComplexMatrix) -> f64 {
    let n = q.ncols();
    fro_norm(&(q.adjoint() * q - identity(n)))
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    jacobi::svd(m).1
}

/// Extends a matrix with orthonormal columns to a full unitary matrix whose
/// leading columns are exactly the given ones.
pub fn complete_unitary(q: &ComplexMatrix) -> ComplexMatrix {
    let m = q.nrows();
    let p = q.ncols();
    if p >= m {
        return q.columns(0, m).into_owned();
    }
    let mut aug = zeros(m, p + m);
    aug.columns_mut(0, p).copy_from(q);
    aug.columns_mut(p, m).copy_from(&identity(m));
    let full = QR::new(aug).q();
    let mut out = zeros(m, m);
    out.columns_mut(0, p).copy_from(q);
    out.columns_mut(p, m - p).copy_from(&full.columns(p, m - p));
    out
}

/// Full SVD `M = U·diag(σ)·Vᴴ` with square unitary `U` (m×m) and `V` (n×n),
/// singular values nonincreasing. Empty dimensions give identity factors.
pub fn svd_full(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (r, k) = m.shape();
    if r == 0 || k == 0 {
        return (identity(r), Vec::new(), identity(k));
    }
    jacobi::svd(m)
}

pub fn count_above(sigma: &[f64], threshold: f64) -> usize {
    sigma.iter().filter(|&&s| s > threshold).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    pub rank: usize,
    pub tolerance_used: f64,
    pub singular_values: Vec<f64>,
}

impl RankDecision {
    /// True when a singular value lies within a factor 10 of the threshold
    /// on either side, so a modest change of tolerance would change the rank.
    pub fn ambiguous(&self) -> bool {
        threshold_ambiguous(&self.singular_values, self.tolerance_used)
    }
}

pub fn threshold_ambiguous(sigma: &[f64], threshold: f64) -> bool {
    threshold > 0.0
        && sigma
            .iter()
            .any(|&s| s > threshold / 10.0 && s <= threshold * 10.0 && s > 0.0)
}

pub struct RankRevealing {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
    pub decision: RankDecision,
}

pub fn rank_threshold(rows: usize, cols: usize, sigma_max: f64, tol: f64) -> f64 {
    tol * rows.max(cols) as f64 * sigma_max
}

pub fn rank_revealing(m: &ComplexMatrix, tol: f64) -> Result<RankRevealing> {
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let (u, sigma, v) = svd_full(m);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let thr = rank_threshold(m.nrows(), m.ncols(), smax, tol);
    let rank = count_above(&sigma, thr);
    Ok(RankRevealing {
        left: u,
        singular_values: sigma.clone(),
        right: v,
        decision: RankDecision {
            rank,
            tolerance_used: thr,
            singular_values: sigma,
        },
    })
}

pub fn rank(m: &ComplexMatrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sigma = singular_values(m);
    let thr = rank_threshold(m.nrows(), m.ncols(), sigma[0], tol);
    count_above(&sigma, thr)
}

/// Unitary `U` with the first `r` rows of `U·M` of full row rank and the rest
/// negligible.
pub fn row_compress(m: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, usize)> {
    let rr = rank_revealing(m, tol)?;
    Ok((rr.left.adjoint(), rr.decision.rank))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSide {
    Left,
    Right,
}

/// Unitary `V` with `M·V = [M′ 0]` (`ZeroSide::Right`) or `[0 M′]`
/// (`ZeroSide::Left`), `M′` of full column rank.
pub fn col_compress(m: &ComplexMatrix, tol: f64, side: ZeroSide) -> Result<(ComplexMatrix, usize)> {
    let rr = rank_revealing(m, tol)?;
    let v = match side {
        ZeroSide::Right => rr.right,
        ZeroSide::Left => reverse_columns(&rr.right),
    };
    Ok((v, rr.decision.rank))
}

pub fn reverse_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.ncols();
    ComplexMatrix::from_fn(m.nrows(), n, |i, j| m[(i, n - 1 - j)])
}

pub fn reverse_rows(m: &ComplexMatrix) -> ComplexMatrix {
    let r = m.nrows();
    ComplexMatrix::from_fn(r, m.ncols(), |i, j| m[(r - 1 - i, j)])
}

/// Block-diagonal embedding of two matrices.
pub fn block_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Assembles a matrix from a grid of blocks given row-major. Every block in a
/// block row must share the row count, every block in a block column the
/// column count.
pub fn blocks(rows: &[usize], cols: &[usize], parts: &[&ComplexMatrix]) -> ComplexMatrix {
    assert_eq!(parts.len(), rows.len() * cols.len());
    let total_r: usize = rows.iter().sum();
    let total_c: usize = cols.iter().sum();
    let mut out = zeros(total_r, total_c);
    let mut r0 = 0;
    for (bi, &r) in rows.iter().enumerate() {
        let mut c0 = 0;
        for (bj, &cc) in cols.iter().enumerate() {
            let p = parts[bi * cols.len() + bj];
            assert_eq!(p.shape(), (r, cc), "block ({bi},{bj}) has wrong shape");
            out.view_mut((r0, c0), (r, cc)).copy_from(p);
            c0 += cc;
        }
        r0 += r;
    }
    out
}

/// Solves `A·X = B` with partial-pivot LU; `None` if `A` is numerically singular
/// relative to `tol`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Option<ComplexMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Some(b.clone());
    }
    let sigma = singular_values(a);
    if sigma[n - 1] <= rank_threshold(n, n, sigma[0], tol) {
        return None;
    }
    a.clone().lu().solve(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Eigenvalue {
    Finite(C64),
    Infinite,
}

impl Eigenvalue {
    pub fn finite(&self) -> Option<C64> {
        match self {
            Eigenvalue::Finite(z) => Some(*z),
            Eigenvalue::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Eigenvalue::Infinite)
    }
}

/// Classifies a QZ pair `(α, β)`: infinite when `|β| ≤ tol·(|α| + |β|)`.
pub fn classify_pair(alpha: C64, beta: C64, tol: f64) -> Eigenvalue {
    let (a, b) = (alpha.norm(), beta.norm());
    if b <= tol * (a + b) {
        Eigenvalue::Infinite
    } else {
        Eigenvalue::Finite(alpha / beta)
    }
}

const REGULARITY_SEED: u64 = 0x0005_eed0_f9e9;

/// Generalized eigenvalues of a square regular pencil, with multiplicity.
pub fn generalized_eigenvalues(p: &crate::pencil::Pencil, tol: f64) -> Result<Vec<Eigenvalue>> {
    let (m, n) = p.shape();
    if m != n {
        return Err(Error::DimensionMismatch(format!("pencil is {m}x{n}, not square")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if rank(&p.l1, tol) < n && p.sampled_rank(tol, REGULARITY_SEED, 3) < n {
        return Err(Error::SingularPencil);
    }
    let pairs = qz_pairs(&p.l0, &p.l1)?;
    Ok(pairs.into_iter().map(|(a, b)| classify_pair(a, b, tol)).collect())
}
