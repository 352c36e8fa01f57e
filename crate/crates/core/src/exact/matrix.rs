use super::field::Gq;
use super::poly::Poly;
use super::ratfun::RatFun;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::pencil::{Pencil, SystemQuadruple};

/// Dense row-major matrix over an exact ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    e: Vec<T>,
}

pub type GqMatrix = Mat<Gq>;
pub type PolyMatrix = Mat<Poly>;
pub type RatMatrix = Mat<RatFun>;

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut e = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                e.push(f(i, j));
            }
        }
        Mat { rows, cols, e }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.e[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.e[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Mat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl GqMatrix {
    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Mat::from_fn(rows, cols, |i, j| Gq::int(v[i * cols + j]))
    }

    /// Exact rank by fraction-free elimination over `ℚ(i)`.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.e.swap(r * m.cols + j, p * m.cols + j);
            }
            let inv = m.get(r, c).inv();
            for i in r + 1..m.rows {
                let f = m.get(i, c) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            r += 1;
            if r == m.rows {
                break;
            }
        }
        r
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }
}

impl PolyMatrix {
    pub fn from_coeffs(rows: usize, cols: usize, c0: &[i64], c1: &[i64]) -> Self {
        Mat::from_fn(rows, cols, |i, j| Poly::from_ints(&[c0[i * cols + j], c1[i * cols + j]]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| Poly::zero())
    }

    pub fn degree(&self) -> usize {
        self.e.iter().map(Poly::deg).max().unwrap_or(0)
    }

    /// Coefficient matrix of `λ^k`.
    pub fn coeff(&self, k: usize) -> GqMatrix {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).coeff(k))
    }

    pub fn to_rational(&self) -> RatMatrix {
        Mat::from_fn(self.rows, self.cols, |i, j| RatFun::poly(self.get(i, j).clone()))
    }

    /// Pencil `λL1 − L0` for entries of degree at most one.
    pub fn to_pencil(&self) -> Result<Pencil> {
        if self.degree() > 1 {
            return Err(Error::NotExact("entry of degree above one".into()));
        }
        let l1 = self.coeff(1).to_complex();
        let l0 = -self.coeff(0).to_complex();
        Pencil::new(l0, l1)
    }

    /// Exact image of a pencil whose entries are finite doubles.
    pub fn from_pencil(p: &Pencil) -> Result<Self> {
        let mut out = PolyMatrix::zeros(p.nrows(), p.ncols());
        for i in 0..p.nrows() {
            for j in 0..p.ncols() {
                let (a0, a1) = (p.l0[(i, j)], p.l1[(i, j)]);
                let c0 = Gq::from_f64(-a0.re, -a0.im).ok_or_else(|| Error::NotExact("non-finite entry".into()))?;
                let c1 = Gq::from_f64(a1.re, a1.im).ok_or_else(|| Error::NotExact("non-finite entry".into()))?;
                out.set(i, j, Poly::linear(c0, c1));
            }
        }
        Ok(out)
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| RatFun::zero())
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, o.rows);
        Mat::from_fn(self.rows, o.cols, |i, j| {
            (0..self.cols).fold(RatFun::zero(), |acc, k| acc.add(&self.get(i, k).mul(o.get(k, j))))
        })
    }

    pub fn add(&self, o: &RatMatrix) -> RatMatrix {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(o.get(i, j)))
    }

    pub fn entries(&self) -> &[RatFun] {
        &self.e
    }

    /// Row echelon form; returns the rank and the determinant of the leading
    /// square block when square.
    fn eliminate(&self) -> (usize, RatFun) {
        let mut m = self.clone();
        let mut det = RatFun::one();
        let mut r = 0;
        for c in 0..m.cols {
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                det = RatFun::zero();
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.e.swap(r * m.cols + j, p * m.cols + j);
                }
                det = det.neg();
            }
            let piv = m.get(r, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv();
            for i in r + 1..m.rows {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).mul(&inv);
                for j in c..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            r += 1;
            if r == m.rows {
                break;
            }
        }
        (r, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    pub fn det(&self) -> RatFun {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return RatFun::one();
        }
        self.eliminate().1
    }

    /// Monic least common multiple of all entry denominators.
    pub fn common_denominator(&self) -> Poly {
        self.e.iter().fold(Poly::one(), |acc, f| acc.lcm(f.den()))
    }

    /// `(N, d)` with `self = N / d`.
    pub fn numerator_form(&self) -> (PolyMatrix, Poly) {
        let d = self.common_denominator();
        let n = Mat::from_fn(self.rows, self.cols, |i, j| {
            let f = self.get(i, j);
            f.num().mul(&d.div_exact(f.den()).expect("lcm is a multiple"))
        });
        (n, d)
    }

    /// Solves `self · X = rhs` over the rational-function field; `None` when
    /// `self` is singular.
    pub fn solve(&self, rhs: &RatMatrix) -> Option<RatMatrix> {
        let n = self.rows;
        assert_eq!(self.cols, n);
        assert_eq!(rhs.rows, n);
        let w = n + rhs.cols;
        let mut m = Mat::from_fn(n, w, |i, j| if j < n { self.get(i, j).clone() } else { rhs.get(i, j - n).clone() });
        for c in 0..n {
            let p = (c..n).find(|&i| !m.get(i, c).is_zero())?;
            for j in 0..w {
                m.e.swap(c * w + j, p * w + j);
            }
            let inv = m.get(c, c).inv();
            for j in c..w {
                let v = m.get(c, j).mul(&inv);
                m.set(c, j, v);
            }
            for i in 0..n {
                if i == c || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..w {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Some(Mat::from_fn(n, rhs.cols, |i, j| m.get(i, n + j).clone()))
    }
}

/// System quadruple with exact polynomial entries of degree at most one.
#[derive(Clone, Debug)]
pub struct ExactQuadruple {
    pub a: PolyMatrix,
    pub b: PolyMatrix,
    pub c: PolyMatrix,
    pub d: PolyMatrix,
}

impl ExactQuadruple {
    pub fn new(a: PolyMatrix, b: PolyMatrix, c: PolyMatrix, d: PolyMatrix) -> Result<Self> {
        let n = a.rows;
        if a.cols != n || b.rows != n || c.cols != n || d.rows != c.rows || d.cols != b.cols {
            return Err(Error::DimensionMismatch("exact quadruple blocks".into()));
        }
        Ok(ExactQuadruple { a, b, c, d })
    }

    pub fn from_float(q: &SystemQuadruple) -> Result<Self> {
        ExactQuadruple::new(
            PolyMatrix::from_pencil(&q.a)?,
            PolyMatrix::from_pencil(&q.b)?,
            PolyMatrix::from_pencil(&q.c)?,
            PolyMatrix::from_pencil(&q.d)?,
        )
    }

    pub fn to_float(&self) -> Result<SystemQuadruple> {
        SystemQuadruple::new(self.a.to_pencil()?, self.b.to_pencil()?, self.c.to_pencil()?, self.d.to_pencil()?)
    }
}

/// `R(λ) = D + C A⁻¹ B` in exact arithmetic.
pub fn transfer_exact(q: &ExactQuadruple) -> Result<RatMatrix> {
    let d = q.d.to_rational();
    if q.a.rows == 0 {
        return Ok(d);
    }
    let x = q.a.to_rational().solve(&q.b.to_rational()).ok_or(Error::ExactSingular)?;
    Ok(d.add(&q.c.to_rational().mul(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_of_integrator() {
        // A = λ, B = 1, C = 1, D = 0 → R = 1/λ.
        let q = ExactQuadruple::new(
            PolyMatrix::from_coeffs(1, 1, &[0], &[1]),
            PolyMatrix::from_coeffs(1, 1, &[1], &[0]),
            PolyMatrix::from_coeffs(1, 1, &[1], &[0]),
            PolyMatrix::from_coeffs(1, 1, &[0], &[0]),
        )
        .unwrap();
        let r = transfer_exact(&q).unwrap();
        assert_eq!(r.get(0, 0), &RatFun::new(Poly::one(), Poly::x()));
    }

    #[test]
    fn singular_a_rejected() {
        let q = ExactQuadruple::new(
            PolyMatrix::zeros(1, 1),
            PolyMatrix::from_coeffs(1, 1, &[1], &[0]),
            PolyMatrix::from_coeffs(1, 1, &[1], &[0]),
            PolyMatrix::zeros(1, 1),
        )
        .unwrap();
        assert!(matches!(transfer_exact(&q), Err(Error::ExactSingular)));
    }

    #[test]
    fn float_round_trip() {
        let q = ExactQuadruple::new(
            PolyMatrix::from_coeffs(1, 1, &[-2, ], &[1]),
            PolyMatrix::from_coeffs(1, 1, &[3], &[0]),
            PolyMatrix::from_coeffs(1, 1, &[1], &[1]),
            PolyMatrix::from_coeffs(1, 1, &[0], &[0]),
        )
        .unwrap();
        let f = q.to_float().unwrap();
        let back = ExactQuadruple::from_float(&f).unwrap();
        assert_eq!(back.a, q.a);
        assert_eq!(back.c, q.c);
    }

    #[test]
    fn exact_rank() {
        let m = GqMatrix::from_ints(3, 3, &[1, 2, 3, 2, 4, 6, 0, 1, 1]);
        assert_eq!(m.rank(), 2);
    }
}
