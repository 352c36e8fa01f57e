use nalgebra::QR;

use super::{fro_norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G·[a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn rot_rows(m: &mut ComplexMatrix, i: usize, j: usize, c: f64, s: C64, cols: std::ops::RangeInclusive<usize>) {
    for k in cols {
        let x = m[(i, k)];
        let y = m[(j, k)];
        m[(i, k)] = x * c + s * y;
        m[(j, k)] = -s.conj() * x + y * c;
    }
}

fn rot_cols(m: &mut ComplexMatrix, k: usize, l: usize, c: f64, s: C64, rows: std::ops::RangeInclusive<usize>) {
    for i in rows {
        let x = m[(i, k)];
        let y = m[(i, l)];
        m[(i, k)] = x * c - s.conj() * y;
        m[(i, l)] = s * x + y * c;
    }
}

/// Column rotation on `(k, k+1)` that annihilates `m[(row, k)]`.
fn kill_left(row_left: C64, row_right: C64) -> (f64, C64) {
    givens(row_right, row_left)
}

/// Generalized eigenvalue pairs `(α, β)` of `λ·B − A` (so `A·x = λ·B·x`)
/// by complex single-shift QZ. Pairs are returned in deflation order.
pub fn qz_pairs(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<(C64, C64)>> {
    let n = a.nrows();
    assert_eq!(a.shape(), (n, n));
    assert_eq!(b.shape(), (n, n));
    if n == 0 {
        return Ok(Vec::new());
    }
    let qr = QR::new(b.clone());
    let q = qr.q();
    let mut t = qr.r();
    let mut h = q.adjoint() * a;
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }

    // Hessenberg-triangular reduction.
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let (c, s) = givens(h[(i - 1, j)], h[(i, j)]);
            rot_rows(&mut h, i - 1, i, c, s, j..=n - 1);
            rot_rows(&mut t, i - 1, i, c, s, i - 1..=n - 1);
            h[(i, j)] = C64::new(0.0, 0.0);
            let (c, s) = kill_left(t[(i, i - 1)], t[(i, i)]);
            rot_cols(&mut t, i - 1, i, c, s, 0..=i);
            rot_cols(&mut h, i - 1, i, c, s, 0..=n - 1);
            t[(i, i - 1)] = C64::new(0.0, 0.0);
        }
    }

    let eps = f64::EPSILON;
    let hnorm = fro_norm(&h);
    let tnorm = fro_norm(&t);
    let mut out = Vec::with_capacity(n);
    let mut ihi = n - 1;
    let mut since = 0usize;
    let mut total = 0usize;
    let cap = 100 * n + 100;
    let zero = C64::new(0.0, 0.0);

    loop {
        if ihi == 0 {
            out.push((h[(0, 0)], t[(0, 0)]));
            break;
        }
        let mut l = 0;
        for k in (1..=ihi).rev() {
            let mut thr = eps * (h[(k - 1, k - 1)].norm() + h[(k, k)].norm());
            if thr == 0.0 {
                thr = eps * hnorm;
            }
            if h[(k, k - 1)].norm() <= thr {
                h[(k, k - 1)] = zero;
                l = k;
                break;
            }
        }
        if l == ihi {
            out.push((h[(ihi, ihi)], t[(ihi, ihi)]));
            ihi -= 1;
            since = 0;
            continue;
        }

        if let Some(j) = (l..=ihi).find(|&j| t[(j, j)].norm() <= eps * tnorm) {
            t[(j, j)] = zero;
            for k in j..ihi {
                let (c, s) = givens(t[(k, k + 1)], t[(k + 1, k + 1)]);
                rot_rows(&mut t, k, k + 1, c, s, k..=ihi);
                let from = if k > l { k - 1 } else { l };
                rot_rows(&mut h, k, k + 1, c, s, from..=ihi);
                t[(k + 1, k + 1)] = zero;
                if k > l {
                    let (c, s) = kill_left(h[(k + 1, k - 1)], h[(k + 1, k)]);
                    rot_cols(&mut h, k - 1, k, c, s, l..=ihi);
                    rot_cols(&mut t, k - 1, k, c, s, l..=ihi);
                    h[(k + 1, k - 1)] = zero;
                }
            }
            let (c, s) = kill_left(h[(ihi, ihi - 1)], h[(ihi, ihi)]);
            rot_cols(&mut h, ihi - 1, ihi, c, s, l..=ihi);
            rot_cols(&mut t, ihi - 1, ihi, c, s, l..=ihi);
            h[(ihi, ihi - 1)] = zero;
            t[(ihi, ihi - 1)] = zero;
            continue;
        }

        since += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence);
        }
        let sigma = if since.is_multiple_of(10) {
            let scale = (h[(ihi, ihi - 1)].norm() / t[(ihi - 1, ihi - 1)].norm()).max(eps);
            h[(ihi, ihi)] / t[(ihi, ihi)] + C64::new(0.75 * scale, 0.5 * scale)
        } else {
            wilkinson(&h, &t, ihi)
        };

        let (c, s) = givens(h[(l, l)] - sigma * t[(l, l)], h[(l + 1, l)]);
        rot_rows(&mut h, l, l + 1, c, s, l..=ihi);
        rot_rows(&mut t, l, l + 1, c, s, l..=ihi);
        for k in l..ihi {
            let (c, s) = kill_left(t[(k + 1, k)], t[(k + 1, k + 1)]);
            rot_cols(&mut t, k, k + 1, c, s, l..=(k + 1));
            rot_cols(&mut h, k, k + 1, c, s, l..=(k + 2).min(ihi));
            t[(k + 1, k)] = zero;
            if k + 2 <= ihi {
                let (c, s) = givens(h[(k + 1, k)], h[(k + 2, k)]);
                rot_rows(&mut h, k + 1, k + 2, c, s, k..=ihi);
                rot_rows(&mut t, k + 1, k + 2, c, s, k + 1..=ihi);
                h[(k + 2, k)] = zero;
            }
        }
    }
    Ok(out)
}

/// Eigenvalue of the trailing 2×2 subpencil closest to its last diagonal ratio.
fn wilkinson(h: &ComplexMatrix, t: &ComplexMatrix, ihi: usize) -> C64 {
    let a = ihi - 1;
    let b = ihi;
    let (taa, tab, tbb) = (t[(a, a)], t[(a, b)], t[(b, b)]);
    let inv00 = C64::new(1.0, 0.0) / taa;
    let inv11 = C64::new(1.0, 0.0) / tbb;
    let inv01 = -tab * inv00 * inv11;
    let m00 = inv00 * h[(a, a)] + inv01 * h[(b, a)];
    let m01 = inv00 * h[(a, b)] + inv01 * h[(b, b)];
    let m10 = inv11 * h[(b, a)];
    let m11 = inv11 * h[(b, b)];
    let half = (m00 - m11) * 0.5;
    let disc = (half * half + m01 * m10).sqrt();
    let mid = (m00 + m11) * 0.5;
    let r1 = mid + disc;
    let r2 = mid - disc;
    let shift = if (r1 - m11).norm() <= (r2 - m11).norm() { r1 } else { r2 };
    if shift.re.is_finite() && shift.im.is_finite() {
        shift
    } else {
        h[(b, b)] / tbb
    }
}
