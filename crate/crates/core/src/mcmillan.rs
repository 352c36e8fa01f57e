//! Smith–McMillan structure of the transfer function of a strongly minimal
//! quadruple, read off Kronecker structures of associated pencils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity, ComplexMatrix, C64};
use crate::matching::match_points;
use crate::minreal::{is_strongly_minimal, strongly_minimal_reduce, MinimalityReport, Reduction, ReductionOrder};
use crate::pencil::{system_pencil, Pencil, SystemQuadruple};
use crate::staircase::{infinity_mcmillan_indices, kronecker_structure, FiniteEigen};

/// Structural indices at one finite point: negative for poles, positive for
/// zeros, padded with zeros to the normal rank, nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointStructure {
    pub value: C64,
    pub indices: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McMillanStructure {
    pub normal_rank: usize,
    /// Sorted by real then imaginary part.
    pub finite: Vec<PointStructure>,
    pub infinity: Vec<i64>,
    pub right_minimal: Vec<usize>,
    pub left_minimal: Vec<usize>,
    pub ambiguous: bool,
}

/// Nonzero indices padded with zeros up to length `r` and sorted.
pub fn pad_indices(mut nonzero: Vec<i64>, r: usize) -> Vec<i64> {
    nonzero.retain(|&k| k != 0);
    let pad = r.saturating_sub(nonzero.len());
    nonzero.extend(std::iter::repeat_n(0, pad));
    nonzero.sort_unstable();
    nonzero
}

impl McMillanStructure {
    pub fn new(
        normal_rank: usize,
        mut finite: Vec<PointStructure>,
        infinity: Vec<i64>,
        mut right_minimal: Vec<usize>,
        mut left_minimal: Vec<usize>,
        ambiguous: bool,
    ) -> Self {
        for p in &mut finite {
            p.indices = pad_indices(std::mem::take(&mut p.indices), normal_rank);
        }
        finite.retain(|p| p.indices.iter().any(|&k| k != 0));
        finite.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
        right_minimal.sort_unstable();
        left_minimal.sort_unstable();
        McMillanStructure {
            normal_rank,
            finite,
            infinity: pad_indices(infinity, normal_rank),
            right_minimal,
            left_minimal,
            ambiguous,
        }
    }

    fn neg(v: &[i64]) -> usize {
        v.iter().filter(|&&k| k < 0).map(|&k| (-k) as usize).sum()
    }

    fn pos(v: &[i64]) -> usize {
        v.iter().filter(|&&k| k > 0).map(|&k| k as usize).sum()
    }

    pub fn finite_pole_degree(&self) -> usize {
        self.finite.iter().map(|p| Self::neg(&p.indices)).sum()
    }

    pub fn finite_zero_degree(&self) -> usize {
        self.finite.iter().map(|p| Self::pos(&p.indices)).sum()
    }

    /// δ_p: total pole degree including infinity (the McMillan degree).
    pub fn polar_degree(&self) -> usize {
        self.finite_pole_degree() + Self::neg(&self.infinity)
    }

    /// δ_z: total zero degree including infinity.
    pub fn zero_degree(&self) -> usize {
        self.finite_zero_degree() + Self::pos(&self.infinity)
    }

    pub fn minimal_index_sum(&self) -> usize {
        self.right_minimal.iter().chain(&self.left_minimal).sum()
    }

    /// Finite points listed with multiplicity (poles or zeros), for matching.
    pub fn finite_zeros(&self) -> Vec<C64> {
        self.points_where(Self::pos)
    }

    pub fn finite_poles(&self) -> Vec<C64> {
        self.points_where(Self::neg)
    }

    fn points_where(&self, count: fn(&[i64]) -> usize) -> Vec<C64> {
        let mut out = Vec::new();
        for p in &self.finite {
            out.extend(std::iter::repeat_n(p.value, count(&p.indices)));
        }
        out
    }

    /// Same index lists (points matched optimally, locations within
    /// `loc_tol` relative to `max(1, |λ|)`).
    pub fn agrees_with(&self, other: &McMillanStructure, loc_tol: f64) -> bool {
        if self.normal_rank != other.normal_rank
            || self.infinity != other.infinity
            || self.right_minimal != other.right_minimal
            || self.left_minimal != other.left_minimal
            || self.finite.len() != other.finite.len()
        {
            return false;
        }
        let a: Vec<C64> = self.finite.iter().map(|p| p.value).collect();
        let b: Vec<C64> = other.finite.iter().map(|p| p.value).collect();
        let (assign, _) = match_points(&a, &b);
        assign.iter().enumerate().all(|(i, &j)| {
            let (x, y) = (&self.finite[i], &other.finite[j]);
            x.indices == y.indices && (x.value - y.value).norm() <= loc_tol * x.value.norm().max(1.0)
        })
    }
}

/// `δ_p = δ_z + Σε + Ση`.
pub fn degree_sum_check(s: &McMillanStructure) -> bool {
    s.polar_degree() == s.zero_degree() + s.minimal_index_sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinimalityPolicy {
    /// Trust the caller; no check.
    Assume,
    /// Verify and fail with `NotStronglyMinimal`.
    Require,
    /// Verify and reduce when needed.
    #[default]
    Reduce,
}

#[derive(Debug, Clone)]
pub struct StructureAnalysis {
    pub structure: McMillanStructure,
    pub minimality: Option<MinimalityReport>,
    pub reduction: Option<Reduction>,
}

/// Structure of `R = D + C A⁻¹ B` under the given minimality policy.
pub fn analyze(q: &SystemQuadruple, tol: f64, seed: u64, policy: MinimalityPolicy) -> Result<StructureAnalysis> {
    q.check_regular(tol, seed)?;
    let (minimality, reduction) = match policy {
        MinimalityPolicy::Assume => (None, None),
        MinimalityPolicy::Require | MinimalityPolicy::Reduce => {
            let rep = is_strongly_minimal(q, tol, seed)?;
            if rep.strongly_minimal() {
                (Some(rep), None)
            } else if policy == MinimalityPolicy::Require {
                return Err(Error::NotStronglyMinimal);
            } else {
                let red = strongly_minimal_reduce(q, tol, seed, ReductionOrder::default())?;
                (Some(rep), Some(red))
            }
        }
    };
    let target = reduction.as_ref().map_or(q, |r| &r.system);
    let mut structure = structure_of_minimal(target, tol, seed)?;
    if let Some(red) = &reduction {
        structure.ambiguous |= red.ambiguous();
    }
    if let Some(rep) = &minimality {
        structure.ambiguous |= rep.ambiguous;
    }
    Ok(StructureAnalysis { structure, minimality, reduction })
}

pub fn rational_structure(q: &SystemQuadruple, tol: f64, seed: u64, policy: MinimalityPolicy) -> Result<McMillanStructure> {
    analyze(q, tol, seed, policy).map(|a| a.structure)
}

/// McMillan degree `δ(R)` = total pole degree.
pub fn mcmillan_degree(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<usize> {
    Ok(rational_structure(q, tol, seed, MinimalityPolicy::Reduce)?.polar_degree())
}

/// `[[λA1 − A0, −λB1, 0], [λC1, λD1, −I], [0, I, 0]]`, whose infinite blocks
/// carry the poles of `R` at infinity.
pub fn pole_pencil(q: &SystemQuadruple) -> Pencil {
    let (d, m, n) = (q.order(), q.outputs(), q.inputs());
    let size = d + m + n;
    let mut l1 = ComplexMatrix::zeros(size, size);
    let mut l0 = ComplexMatrix::zeros(size, size);
    l1.view_mut((0, 0), (d, d)).copy_from(&q.a.l1);
    l1.view_mut((0, d), (d, n)).copy_from(&(-&q.b.l1));
    l1.view_mut((d, 0), (m, d)).copy_from(&q.c.l1);
    l1.view_mut((d, d), (m, n)).copy_from(&q.d.l1);
    l0.view_mut((0, 0), (d, d)).copy_from(&q.a.l0);
    l0.view_mut((d, d + n), (m, m)).copy_from(&identity(m));
    l0.view_mut((d + m, d), (n, n)).copy_from(&(identity(n) * c(-1.0, 0.0)));
    Pencil { l0, l1 }
}

const MERGE_TOL: f64 = 1e-6;

fn merge_points(zeros: &[FiniteEigen], poles: &[FiniteEigen], r: usize) -> Vec<PointStructure> {
    let mut out: Vec<(C64, Vec<i64>)> =
        poles.iter().map(|p| (p.value, p.partial_multiplicities.iter().map(|&k| -(k as i64)).collect())).collect();
    for z in zeros {
        let pos = z.partial_multiplicities.iter().map(|&k| k as i64);
        let hit = out
            .iter()
            .position(|(v, _)| (v - z.value).norm() <= MERGE_TOL * v.norm().max(1.0));
        match hit {
            Some(i) => out[i].1.extend(pos),
            None => out.push((z.value, pos.collect())),
        }
    }
    out.into_iter().map(|(value, idx)| PointStructure { value, indices: pad_indices(idx, r) }).collect()
}

/// Structure of a strongly minimal quadruple: zeros and minimal indices from
/// the system pencil, finite poles from `A`, poles at infinity from
/// [`pole_pencil`].
pub fn structure_of_minimal(q: &SystemQuadruple, tol: f64, seed: u64) -> Result<McMillanStructure> {
    let d = q.order();
    let ks = kronecker_structure(&system_pencil(q), tol, seed)?;
    let ka = kronecker_structure(&q.a, tol, seed)?;
    let kl = kronecker_structure(&pole_pencil(q), tol, seed)?;
    let r = ks
        .normal_rank
        .checked_sub(d)
        .ok_or_else(|| Error::InconsistentDeflation("system pencil rank below state dimension".into()))?;
    let finite = merge_points(&ks.finite_eigen, &ka.finite_eigen, r);
    let mut infinity: Vec<i64> = infinity_mcmillan_indices(&kl).into_iter().map(|k| -(k as i64)).collect();
    infinity.extend(infinity_mcmillan_indices(&ks).into_iter().map(|k| k as i64));
    Ok(McMillanStructure::new(
        r,
        finite,
        infinity,
        ks.right_minimal,
        ks.left_minimal,
        ks.ambiguous || ka.ambiguous || kl.ambiguous,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real;

    fn real(m: usize, n: usize, c0: &[f64], c1: &[f64]) -> Pencil {
        Pencil::from_coeffs(from_real(m, n, c0), from_real(m, n, c1)).unwrap()
    }

    fn d_only(c0: f64, c1: f64) -> SystemQuadruple {
        SystemQuadruple::new(Pencil::zeros(0, 0), Pencil::zeros(0, 1), Pencil::zeros(1, 0), real(1, 1, &[c0], &[c1]))
            .unwrap()
    }

    #[test]
    fn polynomial_pole_at_infinity() {
        // R = λ − 2.
        let s = rational_structure(&d_only(-2.0, 1.0), 1e-12, 0, MinimalityPolicy::Reduce).unwrap();
        assert_eq!(s.infinity, vec![-1]);
        assert_eq!(s.finite.len(), 1);
        assert!((s.finite[0].value - C64::new(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.finite[0].indices, vec![1]);
        assert!(degree_sum_check(&s));
    }

    #[test]
    fn integrator() {
        // R = 1/λ: pole at 0, zero at ∞.
        let q = SystemQuadruple::new(
            real(1, 1, &[0.0], &[1.0]),
            real(1, 1, &[1.0], &[0.0]),
            real(1, 1, &[1.0], &[0.0]),
            real(1, 1, &[0.0], &[0.0]),
        )
        .unwrap();
        let s = rational_structure(&q, 1e-12, 0, MinimalityPolicy::Require).unwrap();
        assert_eq!(s.finite_poles().len(), 1);
        assert_eq!(s.infinity, vec![1]);
        assert_eq!(s.polar_degree(), 1);
        assert!(degree_sum_check(&s));
    }

    #[test]
    fn require_rejects_non_minimal() {
        let q = SystemQuadruple::new(
            real(2, 2, &[-1.0, 0.0, 0.0, -2.0], &[1.0, 0.0, 0.0, 1.0]),
            real(2, 1, &[1.0, 0.0], &[0.0, 0.0]),
            real(1, 2, &[1.0, 1.0], &[0.0, 0.0]),
            real(1, 1, &[0.0], &[0.0]),
        )
        .unwrap();
        assert!(matches!(
            rational_structure(&q, 1e-12, 0, MinimalityPolicy::Require),
            Err(Error::NotStronglyMinimal)
        ));
        let s = rational_structure(&q, 1e-12, 0, MinimalityPolicy::Reduce).unwrap();
        assert_eq!(s.polar_degree(), 1);
        assert!((s.finite_poles()[0] - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn zero_transfer() {
        let s = rational_structure(&d_only(0.0, 0.0), 1e-12, 0, MinimalityPolicy::Reduce).unwrap();
        assert_eq!(s.normal_rank, 0);
        assert_eq!(s.right_minimal, vec![0]);
        assert_eq!(s.left_minimal, vec![0]);
        assert!(degree_sum_check(&s));
    }
}
