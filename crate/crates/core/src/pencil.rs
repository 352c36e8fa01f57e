//! Pencils `λ·L1 − L0`, linear system quadruples and the coefficient maps
//! that act on them (Möbius rotation, variable scaling).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, blocks, c, count_above, fro_norm, rank_threshold, singular_values, solve, zeros, ComplexMatrix,
    Eigenvalue, C64,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub l0: ComplexMatrix,
    pub l1: ComplexMatrix,
}

impl Pencil {
    pub fn new(l0: ComplexMatrix, l1: ComplexMatrix) -> Result<Self> {
        if l0.shape() != l1.shape() {
            return Err(Error::DimensionMismatch(format!(
                "L0 is {:?} but L1 is {:?}",
                l0.shape(),
                l1.shape()
            )));
        }
        Ok(Pencil { l0, l1 })
    }

    /// Pencil written as `P(λ) = c0 + λ·c1`.
    pub fn from_coeffs(c0: ComplexMatrix, c1: ComplexMatrix) -> Result<Self> {
        Pencil::new(-c0, c1)
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Pencil { l0: zeros(m, n), l1: zeros(m, n) }
    }

    /// The constant pencil equal to `m` for every λ.
    pub fn constant(m: ComplexMatrix) -> Self {
        let (r, k) = m.shape();
        Pencil { l0: -m, l1: zeros(r, k) }
    }

    pub fn nrows(&self) -> usize {
        self.l0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.l0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.l0.shape()
    }

    pub fn is_empty(&self) -> bool {
        self.l0.is_empty()
    }

    pub fn eval(&self, z: C64) -> ComplexMatrix {
        &self.l1 * z - &self.l0
    }

    pub fn transpose(&self) -> Pencil {
        Pencil { l0: self.l0.transpose(), l1: self.l1.transpose() }
    }

    /// Frobenius norm of `[L0 L1]`.
    pub fn norm(&self) -> f64 {
        (fro_norm(&self.l0).powi(2) + fro_norm(&self.l1).powi(2)).sqrt()
    }

    /// `Q·P·Z` applied to both coefficients.
    pub fn transform(&self, q: &ComplexMatrix, z: &ComplexMatrix) -> Pencil {
        Pencil { l0: q * &self.l0 * z, l1: q * &self.l1 * z }
    }

    pub fn left(&self, q: &ComplexMatrix) -> Pencil {
        Pencil { l0: q * &self.l0, l1: q * &self.l1 }
    }

    pub fn right(&self, z: &ComplexMatrix) -> Pencil {
        Pencil { l0: &self.l0 * z, l1: &self.l1 * z }
    }

    pub fn sub(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Pencil {
        Pencil {
            l0: self.l0.view((r0, c0), (nr, nc)).into_owned(),
            l1: self.l1.view((r0, c0), (nr, nc)).into_owned(),
        }
    }

    pub fn scaled(&self, s: C64) -> Pencil {
        Pencil { l0: &self.l0 * s, l1: &self.l1 * s }
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hcat(&self, other: &Pencil) -> Pencil {
        let r = self.nrows();
        let (c1, c2) = (self.ncols(), other.ncols());
        Pencil {
            l0: blocks(&[r], &[c1, c2], &[&self.l0, &other.l0]),
            l1: blocks(&[r], &[c1, c2], &[&self.l1, &other.l1]),
        }
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vcat(&self, other: &Pencil) -> Pencil {
        let k = self.ncols();
        let (r1, r2) = (self.nrows(), other.nrows());
        Pencil {
            l0: blocks(&[r1, r2], &[k], &[&self.l0, &other.l0]),
            l1: blocks(&[r1, r2], &[k], &[&self.l1, &other.l1]),
        }
    }

    /// Assembles a block pencil from a row-major grid of pencils.
    pub fn grid(rows: &[usize], cols: &[usize], parts: &[&Pencil]) -> Pencil {
        let l0: Vec<&ComplexMatrix> = parts.iter().map(|p| &p.l0).collect();
        let l1: Vec<&ComplexMatrix> = parts.iter().map(|p| &p.l1).collect();
        Pencil { l0: blocks(rows, cols, &l0), l1: blocks(rows, cols, &l1) }
    }

    /// Maximal rank of `P(z)` over a few seeded sample points, i.e. the normal
    /// rank with high probability. Sample magnitudes cycle through `s`, 1 and
    /// `√s` with `s = ‖L0‖/‖L1‖`.
    pub fn sampled_rank(&self, tol: f64, seed: u64, samples: usize) -> usize {
        if self.is_empty() {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = sample_scale(self);
        let mut best = 0;
        for k in 0..samples {
            let z = random_point(&mut rng) * scale.powf([1.0, 0.0, 0.5][k % 3]);
            let reference = fro_norm(&self.l0) + z.norm() * fro_norm(&self.l1);
            best = best.max(rank_with_reference(&self.eval(z), reference, tol));
        }
        best
    }
}

fn rank_with_reference(m: &ComplexMatrix, reference: f64, tol: f64) -> usize {
    let sigma = singular_values(m);
    let smax = sigma.first().copied().unwrap_or(0.0).max(1e-3 * reference);
    count_above(&sigma, rank_threshold(m.nrows(), m.ncols(), smax, tol))
}

/// Balances `|z|·‖L1‖` against `‖L0‖` for sample points; a coefficient
/// below 1e-8 of the other counts as zero.
fn sample_scale(p: &Pencil) -> f64 {
    let (n0, n1) = (fro_norm(&p.l0), fro_norm(&p.l1));
    if n0 > 1e-8 * n1 && n1 > 1e-8 * n0 {
        n0 / n1
    } else {
        1.0
    }
}

pub(crate) fn random_point(rng: &mut ChaCha8Rng) -> C64 {
    let r: f64 = rng.gen_range(0.5..1.5);
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    c(r * th.cos(), r * th.sin())
}

/// Linear system quadruple realizing `R(λ) = D(λ) + C(λ)·A(λ)⁻¹·B(λ)` with
/// system pencil `S(λ) = [[A, −B], [C, D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemQuadruple {
    pub a: Pencil,
    pub b: Pencil,
    pub c: Pencil,
    pub d: Pencil,
}

impl SystemQuadruple {
    pub fn new(a: Pencil, b: Pencil, c: Pencil, d: Pencil) -> Result<Self> {
        let q = SystemQuadruple { a, b, c, d };
        q.check_dims()?;
        Ok(q)
    }

    fn check_dims(&self) -> Result<()> {
        let dd = self.a.nrows();
        let mismatch = |what: &str, got: (usize, usize), want: (usize, usize)| {
            Error::DimensionMismatch(format!("{what} is {}x{}, expected {}x{}", got.0, got.1, want.0, want.1))
        };
        if self.a.ncols() != dd {
            return Err(mismatch("A", self.a.shape(), (dd, dd)));
        }
        let n = self.b.ncols();
        let m = self.c.nrows();
        if self.b.nrows() != dd {
            return Err(mismatch("B", self.b.shape(), (dd, n)));
        }
        if self.c.ncols() != dd {
            return Err(mismatch("C", self.c.shape(), (m, dd)));
        }
        if self.d.shape() != (m, n) {
            return Err(mismatch("D", self.d.shape(), (m, n)));
        }
        Ok(())
    }

    /// State dimension d.
    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// Number of outputs m (rows of R).
    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// Number of inputs n (columns of R).
    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn transpose(&self) -> SystemQuadruple {
        SystemQuadruple {
            a: self.a.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
            d: self.d.transpose(),
        }
    }

    /// `[A(λ) −B(λ)]`.
    pub fn controllability_pencil(&self) -> Pencil {
        self.a.hcat(&self.b.scaled(c(-1.0, 0.0)))
    }

    /// `[A(λ); C(λ)]`.
    pub fn observability_pencil(&self) -> Pencil {
        self.a.vcat(&self.c)
    }

    /// Checks that `A(λ)` is regular: full-rank leading coefficient, or full
    /// rank at one of three seeded sample points.
    pub fn check_regular(&self, tol: f64, seed: u64) -> Result<()> {
        let d = self.order();
        if d == 0 {
            return Ok(());
        }
        if linalg::rank(&self.a.l1, tol) == d || self.a.sampled_rank(tol, seed, 3) == d {
            Ok(())
        } else {
            Err(Error::ARegularity)
        }
    }
}

pub fn system_pencil(q: &SystemQuadruple) -> Pencil {
    let (d, m, n) = (q.order(), q.outputs(), q.inputs());
    let mb = q.b.scaled(c(-1.0, 0.0));
    Pencil::grid(&[d, m], &[d, n], &[&q.a, &mb, &q.c, &q.d])
}

pub fn transfer_eval(q: &SystemQuadruple, z: C64, tol: f64) -> Result<ComplexMatrix> {
    let dz = q.d.eval(z);
    if q.order() == 0 {
        return Ok(dz);
    }
    let x = solve(&q.a.eval(z), &q.b.eval(z), tol).ok_or(Error::PoleOfA)?;
    Ok(dz + q.c.eval(z) * x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub c: f64,
    pub s: f64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { c: 1.0, s: 0.0 };

    pub fn new(c: f64, s: f64) -> Result<Self> {
        if ((c * c + s * s) - 1.0).abs() > 8.0 * f64::EPSILON {
            return Err(Error::InvalidParameter(format!("rotation ({c}, {s}) is not normalized")));
        }
        Ok(Rotation { c, s })
    }

    pub fn from_angle(theta: f64) -> Self {
        Rotation { c: theta.cos(), s: theta.sin() }
    }

    pub fn inverse(&self) -> Self {
        Rotation { c: self.c, s: -self.s }
    }

    /// λ = (c·μ − s)/(s·μ + c).
    pub fn to_lambda(&self, mu: Eigenvalue) -> Eigenvalue {
        let (cc, s) = (self.c, self.s);
        match mu {
            Eigenvalue::Infinite => {
                if s == 0.0 {
                    Eigenvalue::Infinite
                } else {
                    Eigenvalue::Finite(c(cc / s, 0.0))
                }
            }
            Eigenvalue::Finite(m) => {
                let den = m * s + cc;
                if den.norm() == 0.0 {
                    Eigenvalue::Infinite
                } else {
                    Eigenvalue::Finite((m * cc - s) / den)
                }
            }
        }
    }

    /// μ = (s + c·λ)/(c − s·λ).
    pub fn to_mu(&self, lambda: Eigenvalue) -> Eigenvalue {
        self.inverse().to_lambda(lambda)
    }
}

/// Coefficient map `[Ã0; Ã1] = [[c, s], [−s, c]]·[L0; L1]`.
pub fn mobius_rotate(p: &Pencil, rot: Rotation) -> Pencil {
    Pencil {
        l0: &p.l0 * c(rot.c, 0.0) + &p.l1 * c(rot.s, 0.0),
        l1: &p.l1 * c(rot.c, 0.0) - &p.l0 * c(rot.s, 0.0),
    }
}

/// Picks a rotation whose rotated leading coefficient has full row rank.
/// The identity is tried first, then seeded uniform angles; a candidate is
/// taken at once when its smallest singular value clears the threshold by a
/// factor 1e3, otherwise the best candidate that merely clears it is used.
pub fn choose_rotation(p: &Pencil, seed: u64, max_tries: usize, tol: f64) -> Result<Rotation> {
    let (m, n) = p.shape();
    if m == 0 {
        return Ok(Rotation::IDENTITY);
    }
    if m > n {
        return Err(Error::RankDeficientRows);
    }
    let thr = rank_threshold(m, n, p.norm(), tol);
    let margin = |rot: Rotation| -> f64 {
        let l1 = mobius_rotate(p, rot).l1;
        singular_values(&l1)[m - 1]
    };
    let mut best: Option<(f64, Rotation)> = None;
    let mut consider = |rot: Rotation| -> Option<Rotation> {
        let s = margin(rot);
        if s > 1e3 * thr {
            return Some(rot);
        }
        if s > thr && best.is_none_or(|(b, _)| s > b) {
            best = Some((s, rot));
        }
        None
    };
    if let Some(r) = consider(Rotation::IDENTITY) {
        return Ok(r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        if let Some(r) = consider(Rotation::from_angle(theta)) {
            return Ok(r);
        }
    }
    best.map(|(_, r)| r).ok_or(Error::NoRotation(max_tries))
}

pub const ROTATION_TRIES: usize = 32;

/// `λ̂·L1 − d_λ·L0`, whose eigenvalues are `d_λ` times those of `P`.
pub fn lambda_scale(p: &Pencil, d_lambda: f64) -> Result<Pencil> {
    if !(d_lambda > 0.0) || !d_lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("d_lambda must be positive, got {d_lambda}")));
    }
    Ok(Pencil { l0: &p.l0 * c(d_lambda, 0.0), l1: p.l1.clone() })
}

/// `2^round(log2(‖L0‖_F / ‖L1‖_F))`, or 1 when either coefficient vanishes.
pub fn default_lambda_scale(p: &Pencil) -> f64 {
    let (n0, n1) = (fro_norm(&p.l0), fro_norm(&p.l1));
    if n0 == 0.0 || n1 == 0.0 {
        return 1.0;
    }
    2f64.powi((n0 / n1).log2().round() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, from_real, identity};

    fn scalar(l0: f64, l1: f64) -> Pencil {
        Pencil::new(from_real(1, 1, &[l0]), from_real(1, 1, &[l1])).unwrap()
    }

    #[test]
    fn system_pencil_of_integrator() {
        let q = SystemQuadruple::new(
            scalar(0.0, 1.0),
            Pencil::constant(from_real(1, 1, &[1.0])),
            Pencil::constant(from_real(1, 1, &[1.0])),
            Pencil::zeros(1, 1),
        )
        .unwrap();
        let s = system_pencil(&q);
        let z = c(0.3, -1.2);
        let want = ComplexMatrix::from_row_slice(2, 2, &[z, cr(-1.0), cr(1.0), cr(0.0)]);
        assert!(fro_norm(&(s.eval(z) - want)) < 1e-15);
    }

    #[test]
    fn d_only_system_pencil() {
        let q = SystemQuadruple::new(Pencil::zeros(0, 0), Pencil::zeros(0, 1), Pencil::zeros(1, 0), scalar(0.0, 1.0))
            .unwrap();
        let s = system_pencil(&q);
        assert_eq!(s.shape(), (1, 1));
        assert_eq!(s.l1[(0, 0)], cr(1.0));
    }

    #[test]
    fn transfer_of_first_order_lag() {
        let q = SystemQuadruple::new(
            scalar(1.0, 1.0),
            Pencil::constant(from_real(1, 1, &[1.0])),
            Pencil::constant(from_real(1, 1, &[1.0])),
            Pencil::zeros(1, 1),
        )
        .unwrap();
        let r = transfer_eval(&q, cr(3.0), 1e-12).unwrap();
        assert!((r[(0, 0)] - cr(0.5)).norm() < 1e-15);
        assert_eq!(transfer_eval(&q, cr(1.0), 1e-12).err(), Some(Error::PoleOfA));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let e = SystemQuadruple::new(scalar(0.0, 1.0), Pencil::zeros(2, 1), Pencil::zeros(1, 1), Pencil::zeros(1, 1));
        assert!(matches!(e, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rotation_examples() {
        let p = scalar(2.0, 1.0);
        assert_eq!(mobius_rotate(&p, Rotation::IDENTITY), p);
        let inv = mobius_rotate(&p, Rotation::new(0.0, 1.0).unwrap());
        assert_eq!(inv.l0[(0, 0)], cr(1.0));
        assert_eq!(inv.l1[(0, 0)], cr(-2.0));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot = Rotation::new(h, h).unwrap();
        let r = mobius_rotate(&p, rot);
        let mu = r.l0[(0, 0)] / r.l1[(0, 0)];
        assert!((mu - cr(-3.0)).norm() < 1e-14);
        let back = rot.to_lambda(Eigenvalue::Finite(mu)).finite().unwrap();
        assert!((back - cr(2.0)).norm() < 1e-14);
        let mu2 = rot.to_mu(Eigenvalue::Finite(cr(2.0))).finite().unwrap();
        assert!((mu2 - cr(-3.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_choice() {
        let p = Pencil::new(from_real(1, 2, &[0.0, 0.0]), from_real(1, 2, &[1.0, 0.0])).unwrap();
        assert_eq!(choose_rotation(&p, 1, 32, 1e-12).unwrap(), Rotation::IDENTITY);

        let p = Pencil::new(identity(2), from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let rot = choose_rotation(&p, 7, 32, 1e-12).unwrap();
        assert_ne!(rot, Rotation::IDENTITY);
        assert_eq!(linalg::rank(&mobius_rotate(&p, rot).l1, 1e-12), 2);
    }

    #[test]
    fn lambda_scaling() {
        let p = scalar(4.0, 1.0);
        assert_eq!(lambda_scale(&p, 1.0).unwrap(), p);
        let q = lambda_scale(&p, 2.0).unwrap();
        assert_eq!(q.l0[(0, 0)] / q.l1[(0, 0)], cr(8.0));
        assert!(lambda_scale(&p, 0.0).is_err());
        assert!(lambda_scale(&p, -1.0).is_err());
    }
}
