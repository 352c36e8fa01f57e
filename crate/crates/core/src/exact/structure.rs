use super::field::Gq;
use super::matrix::{GqMatrix, Mat, PolyMatrix, RatMatrix};
use super::poly::{gcd_free_basis, Poly};
use super::ratfun::RatFun;
use crate::error::{Error, Result};
use crate::mcmillan::{McMillanStructure, PointStructure};

/// Local structure shared by every root of the squarefree `factor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactPoint {
    pub factor: Poly,
    /// Nondecreasing, length equal to the normal rank.
    pub indices: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactStructure {
    pub normal_rank: usize,
    pub finite: Vec<ExactPoint>,
    pub infinity: Vec<i64>,
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
}

impl ExactStructure {
    pub fn polar_degree(&self) -> usize {
        let fin: usize = self.finite.iter().map(|p| p.factor.deg() * neg_sum(&p.indices)).sum();
        fin + neg_sum(&self.infinity)
    }

    pub fn zero_degree(&self) -> usize {
        let fin: usize = self.finite.iter().map(|p| p.factor.deg() * pos_sum(&p.indices)).sum();
        fin + pos_sum(&self.infinity)
    }

    /// Floating-point view; point locations are companion-matrix roots and
    /// therefore approximate, the indices are exact.
    pub fn to_mcmillan(&self) -> McMillanStructure {
        let mut finite = Vec::new();
        for p in &self.finite {
            for z in p.factor.roots_approx() {
                finite.push(PointStructure { value: z, indices: p.indices.clone() });
            }
        }
        McMillanStructure::new(
            self.normal_rank,
            finite,
            self.infinity.clone(),
            self.right_minimal.clone(),
            self.left_minimal.clone(),
            false,
        )
    }
}

fn neg_sum(v: &[i64]) -> usize {
    v.iter().filter(|&&k| k < 0).map(|&k| (-k) as usize).sum()
}

fn pos_sum(v: &[i64]) -> usize {
    v.iter().filter(|&&k| k > 0).map(|&k| k as usize).sum()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Nonzero `k×k` minors of `r` for `k = 1..=rank`.
struct Minors {
    rank: usize,
    by_size: Vec<Vec<RatFun>>,
}

impl Minors {
    fn of(r: &RatMatrix) -> Minors {
        let rank = r.rank();
        let mut by_size = Vec::with_capacity(rank);
        for k in 1..=rank {
            let mut v = Vec::new();
            for rows in combinations(r.rows, k) {
                for cols in combinations(r.cols, k) {
                    let d = r.select(&rows, &cols).det();
                    if !d.is_zero() {
                        v.push(d);
                    }
                }
            }
            by_size.push(v);
        }
        Minors { rank, by_size }
    }

    /// `d_k = ν_k − ν_{k−1}` with `ν_k` the least valuation among `k×k` minors.
    fn indices(&self, val: impl Fn(&RatFun) -> i64) -> Vec<i64> {
        let mut prev = 0;
        let mut out = Vec::with_capacity(self.rank);
        for minors in &self.by_size {
            let nu = minors.iter().map(&val).min().expect("rank-sized minors exist");
            out.push(nu - prev);
            prev = nu;
        }
        out
    }
}

/// Local Smith–McMillan indices of `r` at the exact point `λ0`.
pub fn local_structure_exact(r: &RatMatrix, lambda0: &Gq) -> Vec<i64> {
    let g = Poly::linear_root(lambda0);
    Minors::of(r).indices(|f| f.valuation(&g))
}

/// Smith–McMillan indices of `r` at infinity.
pub fn infinity_structure_exact(r: &RatMatrix) -> Vec<i64> {
    Minors::of(r).indices(RatFun::valuation_infinity)
}

fn right_minimal_of(n: &PolyMatrix, rank: usize) -> Result<Vec<usize>> {
    let (rows, cols) = (n.rows, n.cols);
    let defect = cols - rank;
    if defect == 0 {
        return Ok(Vec::new());
    }
    let q = n.degree();
    let coeffs: Vec<GqMatrix> = (0..=q).map(|k| n.coeff(k)).collect();
    let cap = rank * q + 1;
    let mut out = Vec::new();
    let mut prev_nu = 0usize;
    let mut prev_count = 0usize;
    for j in 0..=cap {
        let t = Mat::from_fn((q + j + 1) * rows, (j + 1) * cols, |i, c| {
            let (bs, bi) = (i / rows, c / cols);
            if bs >= bi && bs - bi <= q {
                coeffs[bs - bi].get(i % rows, c % cols).clone()
            } else {
                Gq::zero()
            }
        });
        let nu = (j + 1) * cols - t.rank();
        let count = nu - prev_nu;
        out.extend(std::iter::repeat_n(j, count - prev_count));
        if count == defect {
            return Ok(out);
        }
        prev_nu = nu;
        prev_count = count;
    }
    Err(Error::StructuralInconsistency("minimal basis degree bound exceeded".into()))
}

/// Right and left minimal indices of `r`, nondecreasing.
pub fn minimal_indices_exact(r: &RatMatrix) -> Result<(Vec<usize>, Vec<usize>)> {
    let rank = r.rank();
    let (n, _) = r.numerator_form();
    Ok((right_minimal_of(&n, rank)?, right_minimal_of(&n.transpose(), rank)?))
}

/// Complete exact rational structure of `r`. Every finite point where some
/// local index is nonzero is represented by an exact squarefree factor; all
/// roots of one factor share its indices.
pub fn full_structure_exact(r: &RatMatrix) -> Result<ExactStructure> {
    let minors = Minors::of(r);
    let mut polys = Vec::new();
    for f in minors.by_size.iter().flatten() {
        polys.push(f.num().clone());
        polys.push(f.den().clone());
    }
    let mut finite = Vec::new();
    for g in gcd_free_basis(&polys) {
        let indices = minors.indices(|f| f.valuation(&g));
        if indices.iter().any(|&k| k != 0) {
            finite.push(ExactPoint { factor: g, indices });
        }
    }
    let infinity = minors.indices(RatFun::valuation_infinity);
    let (right_minimal, left_minimal) = minimal_indices_exact(r)?;
    let s = ExactStructure { normal_rank: minors.rank, finite, infinity, right_minimal, left_minimal };
    let sum_min: usize = s.right_minimal.iter().chain(&s.left_minimal).sum();
    if s.polar_degree() != s.zero_degree() + sum_min {
        return Err(Error::StructuralInconsistency(format!(
            "polar degree {} != zero degree {} + minimal indices {}",
            s.polar_degree(),
            s.zero_degree(),
            sum_min
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[i64], den: &[i64]) -> RatFun {
        RatFun::new(Poly::from_ints(num), Poly::from_ints(den))
    }

    fn mat(rows: usize, cols: usize, e: Vec<RatFun>) -> RatMatrix {
        Mat::from_fn(rows, cols, |i, j| e[i * cols + j].clone())
    }

    #[test]
    fn scalar_structures() {
        // λ: zero at 0, pole of order one at ∞.
        let r = mat(1, 1, vec![rf(&[0, 1], &[1])]);
        let s = full_structure_exact(&r).unwrap();
        assert_eq!(s.finite, vec![ExactPoint { factor: Poly::x(), indices: vec![1] }]);
        assert_eq!(s.infinity, vec![-1]);
        assert_eq!(s.polar_degree(), 1);

        // 1/(λ²+1): irrational-over-ℚ poles kept as one factor.
        let r = mat(1, 1, vec![rf(&[1], &[1, 0, 1])]);
        let s = full_structure_exact(&r).unwrap();
        assert_eq!(s.finite.len(), 1);
        assert_eq!(s.finite[0].indices, vec![-1]);
        assert_eq!(s.infinity, vec![2]);
        assert_eq!(s.to_mcmillan().finite.len(), 2);
    }

    #[test]
    fn coinciding_pole_and_zero() {
        // diag(λ, 1/λ): indices (−1, 1) at 0 and at ∞.
        let r = mat(2, 2, vec![rf(&[0, 1], &[1]), RatFun::zero(), RatFun::zero(), rf(&[1], &[0, 1])]);
        assert_eq!(local_structure_exact(&r, &Gq::zero()), vec![-1, 1]);
        assert_eq!(infinity_structure_exact(&r), vec![-1, 1]);
        let s = full_structure_exact(&r).unwrap();
        assert_eq!(s.polar_degree(), 2);
        assert_eq!(s.zero_degree(), 2);
    }

    #[test]
    fn minimal_indices_of_row() {
        // [1 λ λ²]: right indices {1, 1}, no left indices.
        let r = mat(1, 3, vec![rf(&[1], &[1]), rf(&[0, 1], &[1]), rf(&[0, 0, 1], &[1])]);
        let (right, left) = minimal_indices_exact(&r).unwrap();
        assert_eq!(right, vec![1, 1]);
        assert!(left.is_empty());
        let s = full_structure_exact(&r).unwrap();
        assert_eq!(s.infinity, vec![-2]);
    }

    #[test]
    fn unimodular_invariance() {
        let r = mat(2, 2, vec![rf(&[1], &[-1, 1]), rf(&[0, 1], &[1]), RatFun::zero(), rf(&[2, 1], &[0, 1])]);
        let u = mat(2, 2, vec![RatFun::one(), rf(&[3, 1], &[1]), RatFun::zero(), RatFun::one()]);
        let v = mat(2, 2, vec![RatFun::one(), RatFun::zero(), rf(&[0, 0, 1], &[1]), RatFun::one()]);
        let a = full_structure_exact(&r).unwrap();
        let b = full_structure_exact(&u.mul(&r).mul(&v)).unwrap();
        assert_eq!(a.finite, b.finite);
        assert_eq!(a.normal_rank, b.normal_rank);
    }
}
