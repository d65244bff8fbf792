//! Polyhedral cones in generator (V) and inequality (H) form.
//!
//! Conversion in both directions runs the double description method:
//! inequalities are inserted in lexicographic order, and a pair of rays on
//! opposite sides of the new hyperplane is combined only when the pair is
//! adjacent in the current cone (combinatorial test on zero sets).

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, rank_of, Matrix};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::scalar::{dot, lex_cmp, Scalar};
use crate::space::StateSpace;

/// Cone generated by nonnegative combinations of its rays.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeV<S> {
    dim: usize,
    rays: Vec<Vec<S>>,
}

/// Cone `{x : h·x ≥ 0 for every inequality h}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeH<S> {
    dim: usize,
    inequalities: Vec<Vec<S>>,
}

fn canonical_set<S: Scalar>(dim: usize, vectors: Vec<Vec<S>>) -> Result<Vec<Vec<S>>> {
    let mut out = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if v.iter().all(Scalar::is_negligible) {
            continue;
        }
        S::canonicalize_ray(&mut v);
        out.push(v);
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out.dedup_by(|a, b| lex_cmp(a, b) == Ordering::Equal);
    Ok(out)
}

impl<S: Scalar> ConeV<S> {
    /// Canonicalizes, sorts and deduplicates the rays. Redundant rays are kept;
    /// see [`ConeV::irredundant`].
    pub fn new(dim: usize, rays: Vec<Vec<S>>) -> Result<Self> {
        Ok(Self {
            dim,
            rays: canonical_set(dim, rays)?,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<S>] {
        &self.rays
    }

    /// Facet description. Errors if the cone is not pointed or not full-dimensional.
    pub fn to_h(&self) -> Result<ConeH<S>> {
        if rank_of(&self.rays) < self.dim {
            return Err(Error::NotFullDimensional);
        }
        let facets = extreme_rays(self.dim, &self.rays)?;
        if rank_of(&facets) < self.dim {
            return Err(Error::NotPointed);
        }
        ConeH::new(self.dim, facets)
    }

    /// Same cone with every non-extreme generator removed.
    pub fn irredundant(&self) -> Result<Self> {
        self.to_h()?.to_v()
    }

    /// Generators of `{y : y·x ≥ 0 for all x in the cone}`.
    pub fn dual(&self) -> Result<Self> {
        let h = self.to_h()?;
        Ok(Self {
            dim: self.dim,
            rays: h.inequalities,
        })
    }

    /// Membership LP `x = Σ λₖ rₖ`, `λ ≥ 0`, over the generators.
    pub fn membership_program(&self, x: &[S]) -> Result<LinearProgram<S>> {
        self.check_dim(x)?;
        let mut lp = LinearProgram::feasibility(self.rays.len());
        for j in 0..self.dim {
            let row = self.rays.iter().map(|r| r[j].clone()).collect();
            lp.constrain(row, Relation::Eq, x[j].clone());
        }
        for k in 0..self.rays.len() {
            let mut row = vec![S::zero(); self.rays.len()];
            row[k] = S::one();
            lp.constrain(row, Relation::Ge, S::zero());
        }
        Ok(lp)
    }

    /// Exact backends decide membership by LP feasibility on the generators;
    /// float backends test the facet inequalities against `-ε`.
    pub fn contains(&self, x: &[S]) -> Result<bool> {
        self.check_dim(x)?;
        if S::EXACT {
            let res = self.membership_program(x)?.solve()?;
            Ok(res.status == LpStatus::Feasible)
        } else {
            self.to_h()?.contains(x)
        }
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.rays.len() == other.rays.len()
            && self
                .rays
                .iter()
                .zip(&other.rays)
                .all(|(a, b)| lex_cmp(a, b) == Ordering::Equal)
    }

    fn check_dim(&self, x: &[S]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

impl<S: Scalar> ConeH<S> {
    pub fn new(dim: usize, inequalities: Vec<Vec<S>>) -> Result<Self> {
        Ok(Self {
            dim,
            inequalities: canonical_set(dim, inequalities)?,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Vec<S>] {
        &self.inequalities
    }

    /// Extreme rays. Errors if the cone is not pointed or not full-dimensional.
    pub fn to_v(&self) -> Result<ConeV<S>> {
        let rays = extreme_rays(self.dim, &self.inequalities)?;
        if rank_of(&rays) < self.dim {
            return Err(Error::NotFullDimensional);
        }
        ConeV::new(self.dim, rays)
    }

    pub fn contains(&self, x: &[S]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self
            .inequalities
            .iter()
            .all(|h| !dot(h, x).is_clearly_negative()))
    }

    /// Indices of the inequalities tight at `x`.
    pub fn tight_at(&self, x: &[S]) -> Vec<usize> {
        self.inequalities
            .iter()
            .enumerate()
            .filter(|(_, h)| dot(h, x).is_negligible())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.inequalities.len() == other.inequalities.len()
            && self
                .inequalities
                .iter()
                .zip(&other.inequalities)
                .all(|(a, b)| lex_cmp(a, b) == Ordering::Equal)
    }
}

/// V → H conversion.
pub fn dd_convert<S: Scalar>(cone: &ConeV<S>) -> Result<ConeH<S>> {
    cone.to_h()
}

/// H → V conversion.
pub fn dd_convert_inverse<S: Scalar>(cone: &ConeH<S>) -> Result<ConeV<S>> {
    cone.to_v()
}

pub fn dual_cone<S: Scalar>(cone: &ConeV<S>) -> Result<ConeV<S>> {
    cone.dual()
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn empty(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersect(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray<S> {
    v: Vec<S>,
    zeros: RowSet,
}

/// Extreme rays of the pointed cone `{x : rows·x ≥ 0}`.
///
/// Errors with `NotPointed` if the rows do not span the space.
pub(crate) fn extreme_rays<S: Scalar>(dim: usize, rows: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    extreme_rays_capped(dim, rows, None)
}

/// As [`extreme_rays`], failing with `BudgetExceeded` once an intermediate
/// cone has more than `cap` rays.
pub(crate) fn extreme_rays_capped<S: Scalar>(
    dim: usize,
    rows: &[Vec<S>],
    cap: Option<usize>,
) -> Result<Vec<Vec<S>>> {
    let rows = canonical_set(dim, rows.to_vec())?;
    let initial = independent_subset(&rows);
    if initial.len() < dim {
        return Err(Error::NotPointed);
    }
    let n = rows.len();
    let basis = Matrix::from_rows(&initial.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let inv = basis.inverse().ok_or(Error::NotPointed)?;

    let mut rays: Vec<Ray<S>> = (0..dim)
        .map(|k| {
            let mut v = inv.col(k);
            S::canonicalize_ray(&mut v);
            let mut zeros = RowSet::empty(n);
            for (pos, &row) in initial.iter().enumerate() {
                if pos != k {
                    zeros.insert(row);
                }
            }
            Ray { v, zeros }
        })
        .collect();

    let threshold = dim.saturating_sub(2);
    for (t, h) in rows.iter().enumerate() {
        if initial.contains(&t) {
            continue;
        }
        let vals: Vec<S> = rays.iter().map(|r| dot(h, &r.v)).collect();
        let signs: Vec<Ordering> = vals.iter().map(Scalar::approx_sign).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].is_gt()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| signs[i].is_lt()).collect();
        if neg.is_empty() {
            for (r, s) in rays.iter_mut().zip(&signs) {
                if s.is_eq() {
                    r.zeros.insert(t);
                }
            }
            continue;
        }

        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.intersect(&rays[q].zeros);
                if common.len() < threshold {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let mut v: Vec<S> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(x, y)| vals[p].clone() * x.clone() - vals[q].clone() * y.clone())
                    .collect();
                S::canonicalize_ray(&mut v);
                let mut zeros = common;
                zeros.insert(t);
                created.push(Ray { v, zeros });
            }
        }

        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (r, s) in rays.into_iter().zip(&signs) {
            match s {
                Ordering::Greater => next.push(r),
                Ordering::Equal => {
                    let mut r = r;
                    r.zeros.insert(t);
                    next.push(r);
                }
                Ordering::Less => {}
            }
        }
        next.extend(created);
        rays = next;
        if let Some(cap) = cap.filter(|&c| rays.len() > c) {
            return Err(Error::BudgetExceeded(format!(
                "double description passed {cap} rays after {} of {} inequalities",
                t + 1,
                n
            )));
        }
    }

    let mut out: Vec<Vec<S>> = rays.into_iter().map(|r| r.v).collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out.dedup_by(|a, b| lex_cmp(a, b) == Ordering::Equal);
    Ok(out)
}

/// Face of a state space, given by the vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.vertices.binary_search(&i).is_ok()
    }
}

/// Smallest face containing the listed vertices: every vertex satisfying
/// with equality each facet inequality tight at their barycenter.
pub fn face_generated_by<S: Scalar>(space: &StateSpace<S>, indices: &[usize]) -> Result<Face> {
    let n = space.vertices().len();
    if indices.is_empty() {
        return Err(Error::BadParameter("face needs at least one vertex".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut barycenter = vec![S::zero(); space.dimension()];
    for &i in indices {
        for (b, x) in barycenter.iter_mut().zip(&space.vertices()[i]) {
            *b += x.clone();
        }
    }
    let tight: Vec<&Vec<S>> = space
        .facets()
        .iter()
        .filter(|h| dot(h, &barycenter).is_negligible())
        .collect();
    let vertices = (0..n)
        .filter(|&k| {
            tight
                .iter()
                .all(|h| dot(h, &space.vertices()[k]).is_negligible())
        })
        .collect();
    Ok(Face { vertices })
}
