//! Two-sided diagonal scaling of a pair `(A, B)` (the coefficients of a
//! rectangular pencil): alternating balancing under determinant constraints,
//! and the bordered Sinkhorn–Knopp scaling with a unique solution.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cr, ComplexMatrix};
use crate::pencil::Pencil;

pub type RealMatrix = DMatrix<f64>;

pub const DEFAULT_SCALING_TOL: f64 = 1e-10;

/// `10·(m+n)·⌈−log10 tol⌉`.
pub fn default_max_iter(m: usize, n: usize, tol: f64) -> usize {
    let digits = (-tol.log10()).ceil().max(1.0) as usize;
    10 * (m + n) * digits
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "approach", rename_all = "snake_case")]
pub enum ScalingMode {
    Approach1 { c_left: f64, c_right: f64 },
    Approach2 { alpha: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceProblem {
    #[serde(skip)]
    pub m: RealMatrix,
    pub mode: ScalingMode,
    pub tol: f64,
    pub max_iterations: usize,
}

impl BalanceProblem {
    pub fn new(m: RealMatrix, mode: ScalingMode, tol: f64, max_iterations: usize) -> Result<Self> {
        if m.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("M must be finite and nonnegative".into()));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let ok = match mode {
            ScalingMode::Approach1 { c_left, c_right } => positive(c_left) && positive(c_right),
            ScalingMode::Approach2 { alpha, c } => positive(alpha) && positive(c),
        };
        if !ok {
            return Err(Error::InvalidParameter("scaling constants must be positive".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(BalanceProblem { m, mode, tol, max_iterations })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingResult {
    pub d_left: Vec<f64>,
    pub d_right: Vec<f64>,
    pub d_lambda: f64,
    /// Row constant of `Dℓ²·M·Dr²` (Approach 1) or common row sum of the
    /// scaled bordered matrix (Approach 2, equal to `gamma_right`).
    pub gamma_left: f64,
    pub gamma_right: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    /// Objective value before the first and after every sweep (Approach 1).
    pub objective_history: Vec<f64>,
    pub problem: BalanceProblem,
}

impl ScalingResult {
    fn squares(v: &[f64]) -> DVector<f64> {
        DVector::from_iterator(v.len(), v.iter().map(|d| d * d))
    }

    /// `Dℓ²·M·Dr²`.
    pub fn scaled_m(&self) -> RealMatrix {
        scale_two_sided(&self.problem.m, &Self::squares(&self.d_left), &Self::squares(&self.d_right))
    }

    /// `diag(Dℓ², Dr²)·M_α·diag(Dℓ², Dr²)` for Approach 2.
    pub fn scaled_bordered(&self) -> Option<RealMatrix> {
        let ScalingMode::Approach2 { alpha, .. } = self.problem.mode else {
            return None;
        };
        let (m, n) = self.problem.m.shape();
        let ma = build_m_alpha(&self.problem.m, alpha, m, n);
        let mut e = Self::squares(&self.d_left).as_slice().to_vec();
        e.extend(self.d_right.iter().map(|d| d * d));
        let e = DVector::from_vec(e);
        Some(scale_two_sided(&ma, &e, &e))
    }

    fn refresh(&mut self) {
        match self.problem.mode {
            ScalingMode::Approach1 { .. } => {
                let s = self.scaled_m();
                let (gl, gr, res) = row_col_deviation(&s);
                self.gamma_left = gl;
                self.gamma_right = gr;
                self.residual = res;
            }
            ScalingMode::Approach2 { .. } => {
                let s = self.scaled_bordered().expect("approach 2");
                let (g, _, res) = row_col_deviation(&s);
                self.gamma_left = g;
                self.gamma_right = g;
                self.residual = res;
            }
        }
    }
}

fn scale_two_sided(m: &RealMatrix, x: &DVector<f64>, y: &DVector<f64>) -> RealMatrix {
    RealMatrix::from_fn(m.nrows(), m.ncols(), |i, j| x[i] * m[(i, j)] * y[j])
}

/// Mean row sum, mean column sum and the largest relative deviation of any
/// row or column sum from its mean.
fn row_col_deviation(s: &RealMatrix) -> (f64, f64, f64) {
    let rows: Vec<f64> = s.row_iter().map(|r| r.sum()).collect();
    let cols: Vec<f64> = s.column_iter().map(|c| c.sum()).collect();
    let gl = rows.iter().sum::<f64>() / rows.len().max(1) as f64;
    let gr = cols.iter().sum::<f64>() / cols.len().max(1) as f64;
    let dev = |v: &[f64], g: f64| v.iter().map(|x| (x - g).abs() / g).fold(0.0, f64::max);
    (gl, gr, dev(&rows, gl).max(dev(&cols, gr)))
}

/// `M_ij = |A_ij|² + |B_ij|²`.
pub fn build_m(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<RealMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!("A is {:?}, B is {:?}", a.shape(), b.shape())));
    }
    Ok(RealMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].norm_sqr() + b[(i, j)].norm_sqr()))
}

/// `[[α²/m²·𝟙𝟙ᵀ, M], [Mᵀ, α²/n²·𝟙𝟙ᵀ]]`.
pub fn build_m_alpha(m_mat: &RealMatrix, alpha: f64, m: usize, n: usize) -> RealMatrix {
    let (tl, br) = (alpha * alpha / (m * m) as f64, alpha * alpha / (n * n) as f64);
    RealMatrix::from_fn(m + n, m + n, |i, j| match (i < m, j < m) {
        (true, true) => tl,
        (true, false) => m_mat[(i, j - m)],
        (false, true) => m_mat[(j, i - m)],
        (false, false) => br,
    })
}

fn check_no_zero_lines(m: &RealMatrix) -> Result<()> {
    let zero_row = m.row_iter().any(|r| r.iter().all(|&v| v == 0.0));
    let zero_col = m.column_iter().any(|c| c.iter().all(|&v| v == 0.0));
    if zero_row || zero_col {
        Err(Error::ZeroRowColumn)
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornResult {
    pub d_row: Vec<f64>,
    pub d_col: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Alternating row/column normalization of a square nonnegative matrix
/// towards a doubly stochastic `diag(d_row)·S·diag(d_col)`.
pub fn sinkhorn_knopp(s: &RealMatrix, tol: f64, max_iter: usize) -> Result<SinkhornResult> {
    sinkhorn_knopp_from(s, tol, max_iter, None)
}

pub fn sinkhorn_knopp_from(s: &RealMatrix, tol: f64, max_iter: usize, init: Option<&[f64]>) -> Result<SinkhornResult> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch("Sinkhorn–Knopp needs a square matrix".into()));
    }
    check_no_zero_lines(s)?;
    let n = s.nrows();
    let mut c = init.map_or_else(|| DVector::from_element(n, 1.0), DVector::from_row_slice);
    let mut r = DVector::from_element(n, 1.0);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let sc = s * &c;
        r = sc.map(|v| 1.0 / v);
        let str_ = s.transpose() * &r;
        c = str_.map(|v| 1.0 / v);
        let rows = (s * &c).component_mul(&r);
        residual = rows.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        if residual <= tol {
            break;
        }
    }
    Ok(SinkhornResult {
        d_row: r.as_slice().to_vec(),
        d_col: c.as_slice().to_vec(),
        iterations,
        residual,
        converged: residual <= tol,
    })
}

fn symmetric_residual(s: &RealMatrix, x: &DVector<f64>) -> f64 {
    (s * x).component_mul(x).iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
}

/// Newton step on `x ∘ S·x = 1` in `u = log x` with backtracking; `None`
/// if no decrease.
fn newton_step(s: &RealMatrix, x: &DVector<f64>, residual: f64) -> Option<(DVector<f64>, f64)> {
    let sx = s * x;
    let f = sx.component_mul(x).add_scalar(-1.0);
    // ∂F/∂u = diag(x)·S·diag(x) + diag(x ∘ S·x).
    let mut jac = RealMatrix::from_fn(x.len(), x.len(), |i, j| x[i] * s[(i, j)] * x[j]);
    for i in 0..x.len() {
        jac[(i, i)] += x[i] * sx[i];
    }
    let du = jac.lu().solve(&(-f))?;
    let mut t = 1.0;
    for _ in 0..30 {
        let cand = x.zip_map(&du, |xi, d| xi * (t * d).exp());
        let r = symmetric_residual(s, &cand);
        if r < residual {
            return Some((cand, r));
        }
        t *= 0.5;
    }
    None
}

const FIXED_POINT_STEPS: usize = 20;

/// Symmetric balancing of a symmetric nonnegative matrix towards a doubly
/// stochastic `diag(x)·S·diag(x)`: the iteration `x ← √(x ⊘ S·x)`, switching
/// to Newton steps when it has not converged after a few sweeps.
pub fn symmetric_sinkhorn(s: &RealMatrix, tol: f64, max_iter: usize, init: Option<&[f64]>) -> Result<SinkhornResult> {
    if s.nrows() != s.ncols() {
        return Err(Error::DimensionMismatch("symmetric balancing needs a square matrix".into()));
    }
    check_no_zero_lines(s)?;
    let n = s.nrows();
    let mut x = init.map_or_else(|| DVector::from_element(n, 1.0), DVector::from_row_slice);
    let mut residual = symmetric_residual(s, &x);
    let mut iterations = 0;
    while residual > tol && iterations < max_iter {
        iterations += 1;
        if iterations > FIXED_POINT_STEPS {
            if let Some((next, r)) = newton_step(s, &x, residual) {
                x = next;
                residual = r;
                continue;
            }
        }
        let sx = s * &x;
        x = x.zip_map(&sx, |xi, si| (xi / si).sqrt());
        residual = symmetric_residual(s, &x);
    }
    Ok(SinkhornResult {
        d_row: x.as_slice().to_vec(),
        d_col: x.as_slice().to_vec(),
        iterations,
        residual,
        converged: residual <= tol,
    })
}

const BAND: f64 = 1e16;
/// Growth of the log-spread of the scalings that marks unbounded drift.
const DRIFT: f64 = 0.1;

/// Alternating exact row/column balancing of `Dℓ²·M·Dr²` with `det Dℓ² = c_left`
/// and `det Dr² = c_right`, each half-step the exact minimizer of
/// `Σ m_ij·x_i·y_j` over one side.
pub fn scale_approach1(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c_left: f64,
    c_right: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ScalingResult> {
    let m_mat = build_m(a, b)?;
    let problem = BalanceProblem::new(m_mat, ScalingMode::Approach1 { c_left, c_right }, tol, max_iter)?;
    approach1(problem)
}

fn geometric_normalizer(v: &DVector<f64>, target_log: f64) -> f64 {
    let mean_log = v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64;
    (target_log / v.len() as f64 - mean_log).exp()
}

fn approach1(problem: BalanceProblem) -> Result<ScalingResult> {
    let ScalingMode::Approach1 { c_left, c_right } = problem.mode else {
        unreachable!()
    };
    let m_mat = &problem.m;
    check_no_zero_lines(m_mat)?;
    let (m, n) = m_mat.shape();
    let (ll, lr) = (c_left.ln(), c_right.ln());
    let sl = (ll / m as f64).exp();
    let sr = (lr / n as f64).exp();
    let mut x = DVector::from_element(m, sl);
    let mut y = DVector::from_element(n, sr);
    let objective = |x: &DVector<f64>, y: &DVector<f64>| x.dot(&(m_mat * y));
    let mut history = vec![objective(&x, &y)];
    let mut iterations = 0;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let log_spread = |x: &DVector<f64>, y: &DVector<f64>| {
        let ls = x.iter().chain(y.iter()).map(|v| v.ln());
        ls.clone().fold(f64::NEG_INFINITY, f64::max) - ls.fold(f64::INFINITY, f64::min)
    };
    let mut spread_mid = None;
    while iterations < problem.max_iterations {
        iterations += 1;
        if iterations == problem.max_iterations / 2 {
            spread_mid = Some(log_spread(&x, &y));
        }
        let my = m_mat * &y;
        x = my.map(|v| 1.0 / v);
        x *= geometric_normalizer(&x, ll);
        let mx = m_mat.transpose() * &x;
        y = mx.map(|v| 1.0 / v);
        y *= geometric_normalizer(&y, lr);
        history.push(objective(&x, &y));
        let out_of_band = |v: &DVector<f64>, s: f64| v.iter().any(|&d| !(d > s / BAND && d < s * BAND));
        if out_of_band(&x, sl) || out_of_band(&y, sr) {
            return Err(Error::DivergingScalings);
        }
        let (_, _, res) = row_col_deviation(&scale_two_sided(m_mat, &x, &y));
        residual = res;
        if residual <= problem.tol {
            converged = true;
            break;
        }
    }
    // Scalings still drifting apart over the second half count as diverging;
    // a positive M always has a bounded solution.
    let has_zero = m_mat.iter().any(|&v| v == 0.0);
    if !converged && has_zero && spread_mid.is_some_and(|s| log_spread(&x, &y) > s + DRIFT) {
        return Err(Error::DivergingScalings);
    }
    let mut out = ScalingResult {
        d_left: x.iter().map(|v| v.sqrt()).collect(),
        d_right: y.iter().map(|v| v.sqrt()).collect(),
        d_lambda: 1.0,
        gamma_left: 0.0,
        gamma_right: 0.0,
        iterations,
        residual,
        converged,
        objective_history: history,
        problem,
    };
    out.refresh();
    Ok(out)
}

/// Bordered scaling: the unique `(Dℓ, Dr)` with `det Dℓ²·det Dr² = c` making
/// `diag(Dℓ², Dr²)·M_α·diag(Dℓ², Dr²)` a multiple of a doubly stochastic matrix.
pub fn scale_approach2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    alpha: f64,
    c: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ScalingResult> {
    scale_approach2_from(a, b, alpha, c, tol, max_iter, None)
}

/// As [`scale_approach2`], starting the iteration from a random positive
/// scaling drawn from `seed` when given.
pub fn scale_approach2_from(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    alpha: f64,
    c: f64,
    tol: f64,
    max_iter: usize,
    seed: Option<u64>,
) -> Result<ScalingResult> {
    let m_mat = build_m(a, b)?;
    let (m, n) = m_mat.shape();
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let problem = BalanceProblem::new(m_mat, ScalingMode::Approach2 { alpha, c }, tol, max_iter)?;
    let ma = build_m_alpha(&problem.m, alpha, m, n);
    let init: Option<Vec<f64>> = seed.map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        (0..m + n).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect()
    });
    let sk = symmetric_sinkhorn(&ma, tol * 0.25, max_iter, init.as_deref())?;
    let e = sk.d_row;
    let log_k: f64 = e.iter().map(|v| v.ln()).sum();
    let t = ((c.ln() - log_k) / (m + n) as f64).exp();
    let e: Vec<f64> = e.iter().map(|v| v * t).collect();
    let mut out = ScalingResult {
        d_left: e[..m].iter().map(|v| v.sqrt()).collect(),
        d_right: e[m..].iter().map(|v| v.sqrt()).collect(),
        d_lambda: 1.0,
        gamma_left: 0.0,
        gamma_right: 0.0,
        iterations: sk.iterations,
        residual: 0.0,
        converged: false,
        objective_history: Vec::new(),
        problem,
    };
    out.refresh();
    out.converged = out.residual <= tol;
    Ok(out)
}

fn pow2(v: f64) -> f64 {
    2f64.powi(v.log2().round() as i32)
}

/// Rounds every scaling entry and `d_λ` to the nearest power of two (in
/// the logarithm) so that scaling introduces no rounding.
pub fn quantize_pow2(r: &ScalingResult) -> ScalingResult {
    let mut out = r.clone();
    out.d_left = r.d_left.iter().map(|&v| pow2(v)).collect();
    out.d_right = r.d_right.iter().map(|&v| pow2(v)).collect();
    out.d_lambda = pow2(r.d_lambda);
    out.refresh();
    out
}

/// Divides both scalings by `√ν`, `ν` the largest row or column norm of the
/// scaled `[Ã B̃]`, so that all those norms are at most one.
pub fn post_normalize(r: &ScalingResult) -> ScalingResult {
    let s = r.scaled_m();
    let rows = s.row_iter().map(|v| v.sum().sqrt());
    let cols = s.column_iter().map(|v| v.sum().sqrt());
    let nu = rows.chain(cols).fold(0.0, f64::max);
    let mut out = r.clone();
    if nu > 0.0 {
        let f = nu.sqrt();
        out.d_left.iter_mut().for_each(|v| *v /= f);
        out.d_right.iter_mut().for_each(|v| *v /= f);
        out.refresh();
    }
    out
}

/// `Dℓ·(λL1 − d_λ·L0)·Dr`.
pub fn apply_scaling(p: &Pencil, r: &ScalingResult) -> Result<Pencil> {
    if p.nrows() != r.d_left.len() || p.ncols() != r.d_right.len() {
        return Err(Error::DimensionMismatch(format!(
            "pencil is {}x{}, scaling is {}x{}",
            p.nrows(),
            p.ncols(),
            r.d_left.len(),
            r.d_right.len()
        )));
    }
    let scale = |m: &ComplexMatrix, f: f64| {
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * cr(f * r.d_left[i] * r.d_right[j]))
    };
    Pencil::new(scale(&p.l0, r.d_lambda), scale(&p.l1, 1.0))
}
