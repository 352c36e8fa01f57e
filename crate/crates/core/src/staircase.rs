//! Staircase reductions of singular pencils and the Kronecker structure
//! report built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    classify_pair, count_above, identity, qz_pairs, reverse_columns, svd_full, threshold_ambiguous, ComplexMatrix,
    Eigenvalue, C64,
};
use crate::pencil::Pencil;

/// `U·P·Wᴴ = [[X, 0], [Y, Ŝ]]` with `X` the regular part (`d_reg` square).
#[derive(Debug, Clone)]
pub struct StaircaseForm {
    pub u: ComplexMatrix,
    pub w: ComplexMatrix,
    pub transformed: Pencil,
    pub d_reg: usize,
    /// `(rows, cols)` of each step of the staircase that isolates the ε blocks.
    pub block_sizes: Vec<(usize, usize)>,
    /// Largest entry dropped when the zero block above `Ŝ` was cleaned.
    pub residual: f64,
    pub ambiguous: bool,
}

impl StaircaseForm {
    pub fn regular_part(&self) -> Pencil {
        self.transformed.sub(0, 0, self.d_reg, self.d_reg)
    }

    pub fn singular_part(&self) -> Pencil {
        let (m, n) = self.transformed.shape();
        self.transformed.sub(self.d_reg, self.d_reg, m - self.d_reg, n - self.d_reg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteEigen {
    pub value: C64,
    /// Partial multiplicities, nonincreasing.
    pub partial_multiplicities: Vec<usize>,
}

impl FiniteEigen {
    pub fn algebraic(&self) -> usize {
        self.partial_multiplicities.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerReport {
    pub rows: usize,
    pub cols: usize,
    pub normal_rank: usize,
    pub finite_eigen: Vec<FiniteEigen>,
    /// Sizes of the infinite Jordan blocks, nondecreasing.
    pub infinite_blocks: Vec<usize>,
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
    /// Some rank decision had a singular value within a factor 10 of its
    /// threshold.
    pub ambiguous: bool,
}

impl KroneckerReport {
    pub fn finite_count(&self) -> usize {
        self.finite_eigen.iter().map(FiniteEigen::algebraic).sum()
    }

    pub fn infinite_count(&self) -> usize {
        self.infinite_blocks.iter().sum()
    }

    pub fn has_eigenvalues(&self) -> bool {
        !self.finite_eigen.is_empty() || !self.infinite_blocks.is_empty()
    }

    /// `rows = r + #η`, `cols = r + #ε`, `r = Σ multiplicities + Σ ∞ sizes + Σε + Ση`.
    pub fn dimensions_consistent(&self) -> bool {
        let sum_e: usize = self.right_minimal.iter().sum();
        let sum_h: usize = self.left_minimal.iter().sum();
        self.rows == self.normal_rank + self.left_minimal.len()
            && self.cols == self.normal_rank + self.right_minimal.len()
            && self.normal_rank == self.finite_count() + self.infinite_count() + sum_e + sum_h
    }
}

/// Zero-indices at infinity in the McMillan sense: `{k − 1 : k ≥ 2}`.
pub fn infinity_mcmillan_indices(report: &KroneckerReport) -> Vec<usize> {
    let mut v: Vec<usize> = report.infinite_blocks.iter().filter(|&&k| k >= 2).map(|&k| k - 1).collect();
    v.sort_unstable();
    v
}

pub(crate) fn pencil_threshold(p: &Pencil, tol: f64) -> f64 {
    let (m, n) = p.shape();
    tol * m.max(n).max(1) as f64 * p.norm()
}

/// Result of the column-nullspace staircase `Q·P·Z = [[S, *], [0, Rest]]`,
/// `S` spanning `rows_used × cols_used`.
pub(crate) struct RightStaircase {
    pub q: ComplexMatrix,
    pub z: ComplexMatrix,
    pub t: Pencil,
    pub steps: Vec<(usize, usize)>,
    pub rows_used: usize,
    pub cols_used: usize,
    pub ambiguous: bool,
}

impl RightStaircase {
    pub fn rest(&self) -> Pencil {
        let (m, n) = self.t.shape();
        self.t.sub(self.rows_used, self.cols_used, m - self.rows_used, n - self.cols_used)
    }

    /// ε indices and infinite block sizes encoded by the step sizes.
    pub fn indices(&self) -> (Vec<usize>, Vec<usize>, bool) {
        let mut eps = Vec::new();
        let mut inf = Vec::new();
        let mut bad = false;
        for (k, &(mk, nk)) in self.steps.iter().enumerate() {
            let next_n = self.steps.get(k + 1).map_or(0, |s| s.1);
            if nk < mk || mk < next_n {
                bad = true;
            }
            eps.extend(std::iter::repeat_n(k, nk.saturating_sub(mk)));
            inf.extend(std::iter::repeat_n(k + 1, mk.saturating_sub(next_n)));
        }
        (eps, inf, bad)
    }
}

fn apply_cols(m: &mut ComplexMatrix, c0: usize, v: &ComplexMatrix) {
    let k = v.nrows();
    let blk = m.columns(c0, k) * v;
    m.columns_mut(c0, k).copy_from(&blk);
}

fn apply_rows(m: &mut ComplexMatrix, r0: usize, u: &ComplexMatrix) {
    let k = u.ncols();
    let blk = u * m.rows(r0, k);
    m.rows_mut(r0, k).copy_from(&blk);
}

/// Repeatedly splits off the nullspace of the active leading coefficient
/// (column compression) and the range of the constant term on it (row
/// compression), with absolute rank threshold `thr`.
pub(crate) fn right_staircase(p: &Pencil, thr: f64) -> RightStaircase {
    let (m, n) = p.shape();
    let mut t = p.clone();
    let mut q = identity(m);
    let mut z = identity(n);
    let mut steps = Vec::new();
    let (mut r0, mut c0) = (0, 0);
    let mut ambiguous = false;
    while c0 < n {
        let (mr, nc) = (m - r0, n - c0);
        let ni = if mr == 0 {
            nc
        } else {
            let e = t.l1.view((r0, c0), (mr, nc)).into_owned();
            let (_, sigma, v) = svd_full(&e);
            ambiguous |= threshold_ambiguous(&sigma, thr);
            let ni = nc - count_above(&sigma, thr);
            if ni > 0 {
                let v = reverse_columns(&v);
                apply_cols(&mut t.l0, c0, &v);
                apply_cols(&mut t.l1, c0, &v);
                apply_cols(&mut z, c0, &v);
                t.l1.view_mut((r0, c0), (mr, ni)).fill(C64::new(0.0, 0.0));
            }
            ni
        };
        if ni == 0 {
            break;
        }
        let mi = if mr == 0 {
            0
        } else {
            let a = t.l0.view((r0, c0), (mr, ni)).into_owned();
            let (u, sigma, _) = svd_full(&a);
            ambiguous |= threshold_ambiguous(&sigma, thr);
            let mi = count_above(&sigma, thr);
            let uh = u.adjoint();
            apply_rows(&mut t.l0, r0, &uh);
            apply_rows(&mut t.l1, r0, &uh);
            apply_rows(&mut q, r0, &uh);
            t.l0.view_mut((r0 + mi, c0), (mr - mi, ni)).fill(C64::new(0.0, 0.0));
            mi
        };
        steps.push((mi, ni));
        r0 += mi;
        c0 += ni;
    }
    RightStaircase { q, z, t, steps, rows_used: r0, cols_used: c0, ambiguous }
}

/// Separates the regular part of a pencil of full row normal rank from its
/// right singular part. A staircase on the transpose splits off the infinite
/// blocks (there are no η blocks); a staircase on the remainder then splits
/// the ε blocks from the finite eigenvalues.
pub fn separate_regular_right(p: &Pencil, tol: f64, seed: u64) -> Result<StaircaseForm> {
    let (m, n) = p.shape();
    if m > n || (m > 0 && p.sampled_rank(tol, seed, 3) < m) {
        return Err(Error::RankDeficientRows);
    }
    let thr = pencil_threshold(p, tol);
    let inf = right_staircase(&p.transpose(), thr);
    let (ri, ci) = (inf.rows_used, inf.cols_used);
    if ri != ci {
        return Err(Error::InconsistentDeflation(format!("infinite part is {ci}x{ri}")));
    }
    let rest = inf.rest().transpose();
    let eps = right_staircase(&rest, thr);
    let (re, ce) = (eps.rows_used, eps.cols_used);
    if m - ci - re != n - ri - ce {
        return Err(Error::InconsistentDeflation(format!("finite part is {}x{}", m - ci - re, n - ri - ce)));
    }
    let mut q = inf.z.transpose();
    let rows = &eps.q * q.rows(ci, m - ci);
    q.rows_mut(ci, m - ci).copy_from(&rows);
    let mut z = inf.q.transpose();
    let cols = z.columns(ri, n - ri) * &eps.z;
    z.columns_mut(ri, n - ri).copy_from(&cols);

    let d_reg = m - re;
    let row_perm: Vec<usize> = (0..ci).chain(ci + re..m).chain(ci..ci + re).collect();
    let col_perm: Vec<usize> = (0..ri).chain(ri + ce..n).chain(ri..ri + ce).collect();
    let u = ComplexMatrix::from_fn(m, m, |i, j| q[(row_perm[i], j)]);
    let zp = ComplexMatrix::from_fn(n, n, |i, j| z[(i, col_perm[j])]);
    let mut transformed = p.transform(&u, &zp);
    let mut residual: f64 = 0.0;
    for i in 0..d_reg {
        for j in d_reg..n {
            residual = residual.max(transformed.l0[(i, j)].norm()).max(transformed.l1[(i, j)].norm());
            transformed.l0[(i, j)] = C64::new(0.0, 0.0);
            transformed.l1[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok(StaircaseForm {
        u,
        w: zp.adjoint(),
        transformed,
        d_reg,
        block_sizes: eps.steps,
        residual,
        ambiguous: inf.ambiguous || eps.ambiguous,
    })
}

/// Full Kronecker structure: right staircase for ε and infinite blocks, a
/// transposed staircase for η, QZ on the remaining regular part and a
/// shifted staircase per eigenvalue cluster for partial multiplicities.
pub fn kronecker_structure(p: &Pencil, tol: f64, _seed: u64) -> Result<KroneckerReport> {
    let (m, n) = p.shape();
    let thr = pencil_threshold(p, tol);
    let right = right_staircase(p, thr);
    let (right_minimal, mut infinite_blocks, bad1) = right.indices();
    let rest = right.rest().transpose();
    let left = right_staircase(&rest, thr);
    let (left_minimal, inf2, bad2) = left.indices();
    infinite_blocks.extend(inf2);
    let mut ambiguous = right.ambiguous || left.ambiguous || bad1 || bad2;
    let regular = left.rest().transpose();
    if regular.nrows() != regular.ncols() {
        return Err(Error::InconsistentDeflation(format!(
            "regular part is {}x{}",
            regular.nrows(),
            regular.ncols()
        )));
    }
    let (finite_eigen, extra_inf, amb) = finite_structure(&regular, tol)?;
    ambiguous |= amb;
    infinite_blocks.extend(std::iter::repeat_n(1, extra_inf));
    infinite_blocks.sort_unstable();
    let normal_rank = n - right_minimal.len();
    let mut right_minimal = right_minimal;
    let mut left_minimal = left_minimal;
    right_minimal.sort_unstable();
    left_minimal.sort_unstable();
    Ok(KroneckerReport {
        rows: m,
        cols: n,
        normal_rank,
        finite_eigen,
        infinite_blocks,
        right_minimal,
        left_minimal,
        ambiguous,
    })
}

/// Partial multiplicities at `alpha` of a square regular pencil, read off the
/// infinite structure of `ν·(L0 − α·L1) − L1`.
pub fn partial_multiplicities(p: &Pencil, alpha: C64, tol: f64) -> (Vec<usize>, bool) {
    let shifted = Pencil { l0: p.l1.clone(), l1: &p.l0 - &p.l1 * alpha };
    let st = right_staircase(&shifted, pencil_threshold(&shifted, tol));
    let (_, mut inf, bad) = st.indices();
    inf.sort_unstable_by(|a, b| b.cmp(a));
    (inf, bad || st.ambiguous)
}

pub const CLUSTER_TOL: f64 = 1e-8;
/// Radius within which split copies of a defective eigenvalue are looked for.
pub const CLUSTER_RADIUS: f64 = 1e-4;

type FiniteParts = (Vec<FiniteEigen>, usize, bool);

/// Eigenvalues of a square regular pencil grouped into clusters with their
/// partial multiplicities. The largest group of `k` nearest values within
/// `CLUSTER_RADIUS·scale` whose mean has algebraic multiplicity exactly `k`
/// is taken first. Otherwise eigenvalues closer than `CLUSTER_TOL·scale`
/// start in one cluster, which then grows to the algebraic multiplicity found
/// by the shifted staircase at its mean, taking the nearest remaining values.
fn finite_structure(p: &Pencil, tol: f64) -> Result<FiniteParts> {
    let n = p.nrows();
    if n == 0 {
        return Ok((Vec::new(), 0, false));
    }
    let pairs = qz_pairs(&p.l0, &p.l1)?;
    let mut values = Vec::new();
    let mut n_inf = 0;
    for (a, b) in pairs {
        match classify_pair(a, b, tol) {
            Eigenvalue::Finite(z) => values.push(z),
            Eigenvalue::Infinite => n_inf += 1,
        }
    }
    let mut ambiguous = n_inf > 0;
    let scale = values.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let mut remaining = values;
    let mut out = Vec::new();
    while let Some(&seed) = remaining.first() {
        let wide = nearest(&remaining, seed, remaining.len());
        let wide: Vec<usize> =
            wide.into_iter().take_while(|&i| (remaining[i] - seed).norm() <= CLUSTER_RADIUS * scale).collect();
        let grouped = (2..=wide.len()).rev().find_map(|k| {
            let alpha = mean(&remaining, &wide[..k]);
            let (parts, amb) = partial_multiplicities(p, alpha, tol);
            (parts.iter().sum::<usize>() == k).then(|| (wide[..k].to_vec(), alpha, parts, amb))
        });
        if let Some((members, alpha, parts, amb)) = grouped {
            ambiguous |= amb;
            out.push(FiniteEigen { value: alpha, partial_multiplicities: parts });
            let mut idx = members;
            idx.sort_unstable_by(|a, b| b.cmp(a));
            for i in idx {
                remaining.remove(i);
            }
            continue;
        }
        let mut members = nearest(&remaining, seed, 1);
        let close: Vec<usize> = (0..remaining.len())
            .filter(|&i| (remaining[i] - seed).norm() <= CLUSTER_TOL * scale)
            .collect();
        if close.len() > members.len() {
            members = close;
        }
        let mut alpha = mean(&remaining, &members);
        let (mut parts, mut amb) = partial_multiplicities(p, alpha, tol);
        for _ in 0..3 {
            let k: usize = parts.iter().sum();
            if k == members.len() || k == 0 || k > remaining.len() {
                break;
            }
            members = nearest(&remaining, alpha, k);
            alpha = mean(&remaining, &members);
            let next = partial_multiplicities(p, alpha, tol);
            parts = next.0;
            amb = next.1;
        }
        let k: usize = parts.iter().sum();
        if k != members.len() {
            ambiguous = true;
            parts = vec![1; members.len()];
        }
        ambiguous |= amb;
        out.push(FiniteEigen { value: alpha, partial_multiplicities: parts });
        let mut idx = members;
        idx.sort_unstable_by(|a, b| b.cmp(a));
        for i in idx {
            remaining.remove(i);
        }
    }
    out.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok((out, n_inf, ambiguous))
}

fn nearest(values: &[C64], center: C64, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        (values[a] - center)
            .norm()
            .partial_cmp(&(values[b] - center).norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    idx.truncate(k);
    idx
}

fn mean(values: &[C64], idx: &[usize]) -> C64 {
    idx.iter().map(|&i| values[i]).sum::<C64>() / idx.len() as f64
}
