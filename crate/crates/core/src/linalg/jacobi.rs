//! One-sided (Hestenes) Jacobi SVD for complex matrices.

use super::{c, complete_unitary, identity, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Orthogonalizes the columns of `a` (`rows ≥ cols`): returns `W = A·V`
/// with mutually orthogonal columns and the unitary `V`.
fn orthogonalize(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w.column(p).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w.column(q).iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w.column(p).iter().zip(w.column(q).iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for m in [&mut w, &mut v] {
                    for i in 0..m.nrows() {
                        let x = m[(i, p)];
                        let y = m[(i, q)] * phase.conj();
                        m[(i, p)] = x * cs - y * sn;
                        m[(i, q)] = (x * sn + y * cs) * phase;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Full SVD `A = U·diag(σ)·Vᴴ`, σ nonincreasing, `U` and `V` square unitary.
pub(crate) fn svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (m, n) = a.shape();
    if m < n {
        let (u, s, v) = svd(&a.adjoint());
        return (v, s, u);
    }
    let (w, v) = orthogonalize(a);
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let keep_thr = sigma.first().copied().unwrap_or(0.0) * m.max(n) as f64 * f64::EPSILON;
    let keep = sigma.iter().take_while(|&&s| s > keep_thr && s > 0.0).count();
    let u_thin = ComplexMatrix::from_fn(m, keep, |i, k| w[(i, order[k])] / c(sigma[k], 0.0));
    let v_sorted = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    (complete_unitary(&u_thin), sigma, v_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fro_norm, zeros};

    fn check(a: &ComplexMatrix) {
        let (u, s, v) = svd(a);
        let (m, n) = a.shape();
        let mut sig = zeros(m, n);
        for (k, &x) in s.iter().enumerate() {
            sig[(k, k)] = c(x, 0.0);
        }
        let scale = fro_norm(a).max(1.0);
        assert!(fro_norm(&(&u * sig * v.adjoint() - a)) <= 1e-14 * scale);
        assert!(fro_norm(&(u.adjoint() * &u - identity(m))) <= 1e-14);
        assert!(fro_norm(&(v.adjoint() * &v - identity(n))) <= 1e-14);
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_one_column_pair() {
        // Input on which a bidiagonalization-based SVD has been seen to fail.
        let d = [
            2.7370071262650056e-16, -0.061167573393214734, -0.03173889447232237, -0.05191572074451227,
            0.2074759501699105, -0.19415319157466762, -1.5909855323629392e-17, 0.1966867431936159,
            0.10205766617871756, 0.16693704633573117, -0.6671470955303139, 0.6243072401447192,
        ];
        let a = ComplexMatrix::from_column_slice(6, 2, &d.map(|x| c(x, 0.0)));
        check(&a);
        let (_, s, _) = svd(&a);
        assert!(s[1] < 1e-15);
    }

    #[test]
    fn complex_shapes() {
        for (m, n) in [(1, 1), (3, 5), (5, 3), (4, 4), (7, 2)] {
            let a = ComplexMatrix::from_fn(m, n, |i, j| c((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0));
            check(&a);
        }
        check(&zeros(3, 2));
    }
}
