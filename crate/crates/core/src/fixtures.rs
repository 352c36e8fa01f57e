//! Instance generators: block linearizations of polynomial matrices, the
//! two demonstration systems with a diagonal polynomial part, and seeded
//! corpora of small integer quadruples for the exact oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{transfer_exact, ExactQuadruple, Poly, PolyMatrix};
use crate::linalg::{c, cr, from_real, identity, zeros, ComplexMatrix, C64};
use crate::pencil::{Pencil, SystemQuadruple};

/// Realization of `P(λ) = Σ P_k λ^k` (`k = 0..=K`, `K ≥ 2`, blocks `m×n`)
/// with `A(λ)` the unit upper block bidiagonal `[I −λI; …; I]` of order
/// `(K−1)·m`, `−B = [P1; …; P_{K−2}; P_{K−1} + λP_K]`, `C = [−λI 0 … 0]` and
/// `D = P0`.
pub fn polynomial_realization(coeffs: &[ComplexMatrix]) -> SystemQuadruple {
    let k = coeffs.len() - 1;
    assert!(k >= 2, "degree at least two");
    let (m, n) = coeffs[0].shape();
    let blocks = k - 1;
    let d = blocks * m;
    let mut a0 = zeros(d, d);
    let mut a1 = zeros(d, d);
    for j in 0..blocks {
        // λL1 − L0 = I on the diagonal, −λI on the superdiagonal.
        a0.view_mut((j * m, j * m), (m, m)).copy_from(&(identity(m) * cr(-1.0)));
        if j + 1 < blocks {
            a1.view_mut((j * m, (j + 1) * m), (m, m)).copy_from(&(identity(m) * cr(-1.0)));
        }
    }
    // B(λ) = λB1 − B0 with −B = [P1; …; P_{K−1} + λP_K].
    let mut b0 = zeros(d, n);
    let mut b1 = zeros(d, n);
    for j in 0..blocks {
        b0.view_mut((j * m, 0), (m, n)).copy_from(&coeffs[j + 1]);
    }
    b1.view_mut(((blocks - 1) * m, 0), (m, n)).copy_from(&(-&coeffs[k]));
    let mut c1 = zeros(m, d);
    c1.view_mut((0, 0), (m, m)).copy_from(&(identity(m) * cr(-1.0)));
    SystemQuadruple::new(
        Pencil::new(a0, a1).expect("shapes"),
        Pencil::new(b0, b1).expect("shapes"),
        Pencil::new(zeros(m, d), c1).expect("shapes"),
        Pencil::new(-&coeffs[0], zeros(m, n)).expect("shapes"),
    )
    .expect("consistent realization")
}

/// Coefficients of `diag(e5, e1)` for ascending scalar coefficient lists.
pub fn diagonal_coefficients(e5: &[f64], e1: &[f64]) -> Vec<ComplexMatrix> {
    let k = e5.len().max(e1.len()) - 1;
    (0..=k)
        .map(|j| {
            from_real(2, 2, &[e5.get(j).copied().unwrap_or(0.0), 0.0, 0.0, e1.get(j).copied().unwrap_or(0.0)])
        })
        .collect()
}

/// The 10×10 system pencil of `diag(e5, e1)` (state order 8).
pub fn example1(e5: &[f64], e1: &[f64]) -> SystemQuadruple {
    polynomial_realization(&diagonal_coefficients(e5, e1))
}

/// The 12×12 system pencil of `[[e5, 0], [1/λ, e1]]`: the polynomial
/// realization extended by the non-minimal triple `A_r = [[0,0],[1,0]]`,
/// `B_r = [[0,0],[1,0]]`, `C_r = diag(0, 1)`.
pub fn example2(e5: &[f64], e1: &[f64]) -> SystemQuadruple {
    let p = example1(e5, e1);
    let d = p.order() + 2;
    let mut a0 = zeros(d, d);
    let mut a1 = zeros(d, d);
    a1.view_mut((0, 0), (2, 2)).copy_from(&identity(2));
    a0[(1, 0)] = c(1.0, 0.0);
    a0.view_mut((2, 2), (d - 2, d - 2)).copy_from(&p.a.l0);
    a1.view_mut((2, 2), (d - 2, d - 2)).copy_from(&p.a.l1);
    let mut b0 = zeros(d, 2);
    let mut b1 = zeros(d, 2);
    // B(λ) = λB1 − B0 with B_r constant: B0 = −B_r.
    b0[(1, 0)] = c(-1.0, 0.0);
    b0.view_mut((2, 0), (d - 2, 2)).copy_from(&p.b.l0);
    b1.view_mut((2, 0), (d - 2, 2)).copy_from(&p.b.l1);
    let mut c0 = zeros(2, d);
    let mut c1 = zeros(2, d);
    c0[(1, 1)] = c(-1.0, 0.0);
    c0.view_mut((0, 2), (2, d - 2)).copy_from(&p.c.l0);
    c1.view_mut((0, 2), (2, d - 2)).copy_from(&p.c.l1);
    SystemQuadruple::new(
        Pencil::new(a0, a1).expect("shapes"),
        Pencil::new(b0, b1).expect("shapes"),
        Pencil::new(c0, c1).expect("shapes"),
        p.d.clone(),
    )
    .expect("consistent realization")
}

/// Random `e5` (degree 5) and `e1` (degree 1) with coefficients in
/// `[−1, 1]` and leading coefficients of magnitude at least `1/2`.
pub fn random_diagonal_polys(seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lead: bool| {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if lead {
            v.signum() * (0.5 + 0.5 * v.abs())
        } else {
            v
        }
    };
    let e5: Vec<f64> = (0..6).map(|k| draw(k == 5)).collect();
    let e1: Vec<f64> = (0..2).map(|k| draw(k == 1)).collect();
    (e5, e1)
}

/// Ascending coefficients of `Π (λ − r_i)` for real roots.
pub fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (k, &v) in p.iter().enumerate() {
            next[k + 1] += v;
            next[k] -= r * v;
        }
        p = next;
    }
    p
}

/// `e5 = q(λ)·(1 − λ/big)` with `q` having four random roots of moderate
/// size, and `e1 = λ − r`; returns the polynomials and all six roots.
pub fn sensitive_diagonal_polys(seed: u64, big: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots: Vec<f64> = (0..4).map(|k| (k as f64 - 1.5) * 1.3 + rng.gen_range(-0.4..0.4)).collect();
    let q = poly_from_roots(&roots);
    let mut e5 = vec![0.0; 6];
    for (k, &v) in q.iter().enumerate() {
        e5[k] += v;
        e5[k + 1] -= v / big;
    }
    let r1: f64 = rng.gen_range(-2.0..2.0);
    roots.push(big);
    roots.push(r1);
    (e5, vec![-r1, 1.0], roots)
}

/// Roots of a real polynomial (ascending coefficients) as companion
/// eigenvalues.
pub fn companion_roots(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut comp = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        comp[(0, k)] = cr(-coeffs[n - 1 - k] / lead);
        if k + 1 < n {
            comp[(k + 1, k)] = cr(1.0);
        }
    }
    let (_, t) = comp.schur().unpack();
    (0..n).map(|k| t[(k, k)]).collect()
}

/// Relative condition number of a simple root: `Σ|a_k||r|^k / (|r|·|p'(r)|)`.
pub fn root_condition(coeffs: &[f64], r: C64) -> f64 {
    let mut num = 0.0;
    let mut dp = C64::new(0.0, 0.0);
    for (k, &a) in coeffs.iter().enumerate() {
        num += a.abs() * r.norm().powi(k as i32);
        if k > 0 {
            dp += cr(a * k as f64) * r.powu(k as u32 - 1);
        }
    }
    num / (r.norm().max(f64::MIN_POSITIVE) * dp.norm())
}

/// Random complex unitary matrix (QR of a Gaussian-like matrix).
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.qr().q()
}

/// Kinds of generated corpus members.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Dense integer coefficients.
    Dense,
    /// Sparse with rank-deficient leading coefficients.
    Sparse,
    /// Deliberately non-minimal: a decoupled uncontrollable or unobservable
    /// state appended.
    NonMinimal,
    /// Polynomial matrix realized through the block linearization.
    Polynomial,
    /// Standard state space `λI − A0` with constant `B`, `C` and often
    /// `D = 0`, giving zeros at infinity.
    StateSpace,
}

fn int_poly_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64, lead_density: f64) -> PolyMatrix {
    let mut c0 = vec![0i64; rows * cols];
    let mut c1 = vec![0i64; rows * cols];
    for k in 0..rows * cols {
        if rng.gen_bool(density) {
            c0[k] = rng.gen_range(-8..=8);
        }
        if rng.gen_bool(lead_density) {
            c1[k] = rng.gen_range(-8..=8);
        }
    }
    PolyMatrix::from_coeffs(rows, cols, &c0, &c1)
}

fn random_exact(rng: &mut ChaCha8Rng, kind: CorpusKind) -> ExactQuadruple {
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=3);
    match kind {
        CorpusKind::Dense | CorpusKind::Sparse => {
            let d = rng.gen_range(1..=4);
            let (dens, lead) = if kind == CorpusKind::Dense { (0.9, 0.9) } else { (0.5, 0.3) };
            let a = int_poly_matrix(rng, d, d, dens, lead);
            let b = int_poly_matrix(rng, d, n, dens, lead * 0.5);
            let c = int_poly_matrix(rng, m, d, dens, lead * 0.5);
            let dd = int_poly_matrix(rng, m, n, dens * 0.6, lead * 0.3);
            ExactQuadruple::new(a, b, c, dd).expect("shapes")
        }
        CorpusKind::NonMinimal => {
            let inner = random_exact(rng, CorpusKind::Dense);
            let (d0, m0, n0) = (inner.a.rows, inner.c.rows, inner.b.cols);
            let extra = rng.gen_range(1..=2);
            let total = d0 + extra;
            let uncontrollable = rng.gen_bool(0.5);
            let mut a = PolyMatrix::zeros(total, total);
            let mut b = PolyMatrix::zeros(total, n0);
            let mut c = PolyMatrix::zeros(m0, total);
            for i in 0..d0 {
                for j in 0..d0 {
                    a.set(i, j, inner.a.get(i, j).clone());
                }
                for j in 0..n0 {
                    b.set(i, j, inner.b.get(i, j).clone());
                }
                for r in 0..m0 {
                    c.set(r, i, inner.c.get(r, i).clone());
                }
            }
            for e in 0..extra {
                let s = d0 + e;
                // λ·lead − shift, lead possibly zero (an infinite mode).
                let lead = if rng.gen_bool(0.7) { 1 } else { 0 };
                let shift = rng.gen_range(-3..=3);
                a.set(s, s, Poly::from_ints(&[-shift, lead]));
                if lead == 0 && shift == 0 {
                    a.set(s, s, Poly::from_ints(&[1, 0]));
                }
                // Couple one way only so the mode stays hidden on one side.
                for j in 0..d0 {
                    if rng.gen_bool(0.5) {
                        let v = Poly::from_ints(&[rng.gen_range(-3..=3)]);
                        if uncontrollable {
                            a.set(j, s, v);
                        } else {
                            a.set(s, j, v);
                        }
                    }
                }
                if uncontrollable {
                    for r in 0..m0 {
                        c.set(r, s, Poly::from_ints(&[rng.gen_range(-3..=3)]));
                    }
                } else {
                    for j in 0..n0 {
                        b.set(s, j, Poly::from_ints(&[rng.gen_range(-3..=3)]));
                    }
                }
            }
            ExactQuadruple::new(a, b, c, inner.d).expect("shapes")
        }
        CorpusKind::StateSpace => {
            let d = rng.gen_range(1..=4);
            let a0 = int_poly_matrix(rng, d, d, 0.7, 0.0);
            let mut a = PolyMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let shift = a0.get(i, j).coeff(0);
                    let lead = if i == j { Poly::x() } else { Poly::zero() };
                    a.set(i, j, lead.sub(&Poly::constant(shift)));
                }
            }
            let b = int_poly_matrix(rng, d, n, 0.7, 0.0);
            let c = int_poly_matrix(rng, m, d, 0.7, 0.0);
            let dd = if rng.gen_bool(0.6) { PolyMatrix::zeros(m, n) } else { int_poly_matrix(rng, m, n, 0.5, 0.0) };
            ExactQuadruple::new(a, b, c, dd).expect("shapes")
        }
        CorpusKind::Polynomial => {
            let k = rng.gen_range(2..=3);
            let m = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=2);
            let coeffs: Vec<Vec<i64>> = (0..=k)
                .map(|j| {
                    (0..m * n)
                        .map(|_| if rng.gen_bool(if j == k { 0.5 } else { 0.7 }) { rng.gen_range(-8..=8) } else { 0 })
                        .collect()
                })
                .collect();
            let mats: Vec<ComplexMatrix> = coeffs
                .iter()
                .map(|v| from_real(m, n, &v.iter().map(|&x| x as f64).collect::<Vec<_>>()))
                .collect();
            ExactQuadruple::from_float(&polynomial_realization(&mats)).expect("integer data")
        }
    }
}

/// `count` seeded quadruples with `d ≤ 6`, `m, n ≤ 3`, integer coefficients
/// of magnitude at most 8 and a regular `A(λ)`, cycling through the kinds.
pub fn exact_corpus(count: usize, seed: u64) -> Vec<(CorpusKind, ExactQuadruple)> {
    let kinds = [
        CorpusKind::Dense,
        CorpusKind::Sparse,
        CorpusKind::NonMinimal,
        CorpusKind::Polynomial,
        CorpusKind::StateSpace,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let kind = kinds[i % kinds.len()];
        let q = random_exact(&mut rng, kind);
        if q.a.rows <= 6 && transfer_exact(&q).is_ok() {
            out.push((kind, q));
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::RatFun;
    use crate::pencil::transfer_eval;

    #[test]
    fn example1_realizes_diagonal_polynomial() {
        let (e5, e1) = random_diagonal_polys(3);
        let q = example1(&e5, &e1);
        assert_eq!((q.order(), q.outputs(), q.inputs()), (8, 2, 2));
        let z = C64::new(0.7, -0.2);
        let r = transfer_eval(&q, z, 1e-12).unwrap();
        let ev = |p: &[f64]| p.iter().rev().fold(C64::new(0.0, 0.0), |acc, &v| acc * z + cr(v));
        assert!((r[(0, 0)] - ev(&e5)).norm() < 1e-12);
        assert!((r[(1, 1)] - ev(&e1)).norm() < 1e-12);
        assert!(r[(0, 1)].norm() < 1e-14 && r[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn example2_exact_transfer() {
        let q = example2(&[1.0, 2.0, 0.0, 0.0, 0.0, 1.0], &[-1.0, 1.0]);
        let r = transfer_exact(&ExactQuadruple::from_float(&q).unwrap()).unwrap();
        assert_eq!(r.get(1, 0), &RatFun::new(Poly::one(), Poly::x()));
        assert_eq!(r.get(0, 1), &RatFun::zero());
        assert_eq!(r.get(0, 0), &RatFun::poly(Poly::from_ints(&[1, 2, 0, 0, 0, 1])));
        assert_eq!(r.get(1, 1), &RatFun::poly(Poly::from_ints(&[-1, 1])));
    }

    #[test]
    fn sensitive_roots() {
        let (e5, e1, roots) = sensitive_diagonal_polys(1, 1e5);
        let ev = |p: &[f64], x: f64| p.iter().rev().fold(0.0, |acc, &v| acc * x + v);
        for &r in &roots[..5] {
            assert!(ev(&e5, r).abs() < 1e-9 * (1.0 + r.abs().powi(5)));
        }
        assert!(ev(&e1, roots[5]).abs() < 1e-14);
    }

    #[test]
    fn corpus_is_regular_and_bounded() {
        let corpus = exact_corpus(8, 1);
        assert_eq!(corpus.len(), 8);
        for (_, q) in corpus {
            assert!(q.a.rows <= 6 && q.c.rows <= 3 && q.b.cols <= 3);
        }
    }
}
