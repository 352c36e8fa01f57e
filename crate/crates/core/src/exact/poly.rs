use std::fmt;

use nalgebra::DMatrix;

use super::field::Gq;
use crate::linalg::C64;

/// Polynomial with Gaussian-rational coefficients, ascending powers, no
/// trailing zero coefficients (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Gq>,
}

impl Poly {
    pub fn new(mut c: Vec<Gq>) -> Self {
        while c.last().is_some_and(Gq::is_zero) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| Gq::int(v)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Gq::one())
    }

    pub fn constant(v: Gq) -> Self {
        Poly::new(vec![v])
    }

    /// `λ`.
    pub fn x() -> Self {
        Poly::new(vec![Gq::zero(), Gq::one()])
    }

    /// `λ − a`.
    pub fn linear_root(a: &Gq) -> Self {
        Poly::new(vec![-a, Gq::one()])
    }

    /// `c1·λ + c0`.
    pub fn linear(c0: Gq, c1: Gq) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[Gq] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lead(&self) -> Gq {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Gq {
        self.c.get(k).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn neg(&self) -> Poly {
        Poly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Gq::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &Gq) -> Poly {
        Poly::new(self.c.iter().map(|v| v * s).collect())
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = self.lead().inv();
        self.scale(&l)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.c.len() < d.c.len() {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lead().inv();
        let mut r = self.c.clone();
        let mut q = vec![Gq::zero(); self.c.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &inv;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&coef * dj);
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn lcm(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        self.mul(o).div_exact(&self.gcd(o)).expect("gcd divides product").monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(k, v)| v * &Gq::int(k as i64)).collect())
    }

    pub fn eval(&self, x: &Gq) -> Gq {
        self.c.iter().rev().fold(Gq::zero(), |acc, v| &(&acc * x) + v)
    }

    /// Number of times `g` divides `self` (`g` nonconstant, `self` nonzero).
    pub fn valuation(&self, g: &Poly) -> usize {
        assert!(!g.is_constant(), "valuation needs a nonconstant factor");
        assert!(!self.is_zero(), "valuation of the zero polynomial");
        let mut k = 0;
        let mut f = self.clone();
        while let Some(q) = f.div_exact(g) {
            f = q;
            k += 1;
        }
        k
    }

    /// `λ^deg · p(1/λ)` for a given degree bound.
    pub fn reverse(&self, deg: usize) -> Poly {
        let mut c = vec![Gq::zero(); deg + 1];
        for (k, v) in self.c.iter().enumerate() {
            c[deg - k] = v.clone();
        }
        Poly::new(c)
    }

    /// Squarefree factors `f_1, f_2, …` (Yun) with `monic(self) = Π f_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let f = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = c.sub(&b.derivative());
            if !a.is_constant() {
                out.push((a, i));
            }
            i += 1;
        }
        out
    }

    /// Numerical roots (companion eigenvalues), for locating points only.
    pub fn roots_approx(&self) -> Vec<C64> {
        let n = self.deg();
        if n == 0 {
            return Vec::new();
        }
        let m = self.monic();
        let mut comp = DMatrix::<C64>::zeros(n, n);
        for k in 0..n {
            comp[(0, k)] = -m.coeff(n - 1 - k).to_c64();
            if k + 1 < n {
                comp[(k + 1, k)] = C64::new(1.0, 0.0);
            }
        }
        let (_, t) = comp.schur().unpack();
        (0..n).map(|k| t[(k, k)]).collect()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| match k {
                0 => format!("{v}"),
                1 => format!("{v}*x"),
                _ => format!("{v}*x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Pairwise coprime squarefree polynomials such that every squarefree factor
/// of every input is a product of basis elements.
pub fn gcd_free_basis(inputs: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for p in inputs {
        if p.is_zero() {
            continue;
        }
        for (sf, _) in p.squarefree_decomposition() {
            let mut f = sf;
            let mut next = Vec::new();
            for b in basis.drain(..) {
                if f.is_constant() {
                    next.push(b);
                    continue;
                }
                let g = b.gcd(&f);
                if g.is_constant() {
                    next.push(b);
                } else {
                    let rest = b.div_exact(&g).expect("gcd divides").monic();
                    f = f.div_exact(&g).expect("gcd divides").monic();
                    next.push(g);
                    if !rest.is_constant() {
                        next.push(rest);
                    }
                }
            }
            if !f.is_constant() {
                next.push(f.monic());
            }
            basis = next;
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        let a = Poly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let b = Poly::from_ints(&[1, 1]); // x + 1
        let (q, r) = a.divrem(&b);
        assert_eq!(q, Poly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&Poly::from_ints(&[2, 2])), b);
        assert_eq!(a.valuation(&b), 1);
        assert_eq!(a.mul(&a).valuation(&b), 2);
    }

    #[test]
    fn squarefree_parts() {
        // (x-1)^2 (x+2)^3 x
        let f = Poly::from_ints(&[-1, 1]).pow(2).mul(&Poly::from_ints(&[2, 1]).pow(3)).mul(&Poly::x());
        let sq = f.squarefree_decomposition();
        assert_eq!(sq.len(), 3);
        assert_eq!(sq[0], (Poly::x(), 1));
        assert_eq!(sq[1], (Poly::from_ints(&[-1, 1]), 2));
        assert_eq!(sq[2], (Poly::from_ints(&[2, 1]), 3));
    }

    #[test]
    fn basis_is_coprime() {
        let a = Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[2, 1]));
        let b = Poly::from_ints(&[-1, 1]).mul(&Poly::from_ints(&[5, 0, 1]));
        let basis = gcd_free_basis(&[a, b]);
        assert_eq!(basis.len(), 3);
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                assert!(basis[i].gcd(&basis[j]).is_constant());
            }
        }
    }

    #[test]
    fn approximate_roots() {
        let f = Poly::from_ints(&[6, -5, 1]);
        let mut r: Vec<f64> = f.roots_approx().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);
    }
}
