//! Linear symmetry groups of polytopal state spaces.
//!
//! A symmetry is determined by where it sends an affine basis of vertices,
//! so the search assigns images to `d` linearly independent base vertices,
//! pruned by the invariant Gram form, and verifies the resulting matrix on
//! every vertex. The group is stored as a stabilizer chain over that base:
//! level `i` holds one element for each image of `base[i]` under the
//! pointwise stabilizer of `base[..i]`. Every group element factors uniquely
//! as `t₀ ∘ t₁ ∘ … ∘ t_{d-1}` with `tᵢ` taken from level `i`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::linalg::{independent_subset, Matrix};
use crate::scalar::{dot, lex_cmp, Scalar};
use crate::space::StateSpace;

/// Invertible linear map `T` with `T vᵢ = v_{π(i)}` and `u ∘ T = u`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSymmetry<S> {
    pub matrix: Matrix<S>,
    pub perm: Vec<usize>,
}

impl<S: Scalar> LinearSymmetry<S> {
    pub fn identity(dim: usize, vertices: usize) -> Self {
        Self {
            matrix: Matrix::identity(dim),
            perm: (0..vertices).collect(),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.mul(&other.matrix),
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        Self {
            matrix: self.matrix.inverse().expect("symmetries are invertible"),
            perm,
        }
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        self.matrix.mul_vec(x)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Re-verifies the defining properties against `space`.
    pub fn verify(&self, space: &StateSpace<S>) -> bool {
        let n = space.vertices().len();
        self.perm.len() == n
            && self.matrix.rows() == space.dimension()
            && self.matrix.cols() == space.dimension()
            && space
                .vertices()
                .iter()
                .zip(&self.perm)
                .all(|(v, &p)| lex_cmp(&self.apply(v), &space.vertices()[p]).is_eq())
            && lex_cmp(&self.matrix.vec_mul(space.unit()), space.unit()).is_eq()
    }
}

#[derive(Clone, Debug)]
struct Level<S> {
    orbit: Vec<usize>,
    transversal: Vec<LinearSymmetry<S>>,
}

#[derive(Clone, Debug)]
pub struct SymmetryGroup<S> {
    dim: usize,
    vertex_count: usize,
    base: Vec<usize>,
    levels: Vec<Level<S>>,
    generators: Vec<LinearSymmetry<S>>,
}

impl<S: Scalar> SymmetryGroup<S> {
    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn generators(&self) -> &[LinearSymmetry<S>] {
        &self.generators
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn identity(&self) -> LinearSymmetry<S> {
        LinearSymmetry::identity(self.dim, self.vertex_count)
    }

    /// Coset representatives per stabilizer level.
    pub fn transversals(&self) -> impl Iterator<Item = &[LinearSymmetry<S>]> {
        self.levels.iter().map(|l| l.transversal.as_slice())
    }

    /// Every element, as products of transversal representatives.
    pub fn elements(&self) -> Vec<LinearSymmetry<S>> {
        let mut acc = vec![self.identity()];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(acc.len() * level.transversal.len());
            for t in &level.transversal {
                for g in &acc {
                    next.push(t.compose(g));
                }
            }
            acc = next;
        }
        acc
    }

    /// Group average `(1/|G|) Σ Tᵀ M T`, computed level by level.
    pub fn average_form(&self, form: &Matrix<S>) -> Matrix<S> {
        let mut acc = form.clone();
        for level in &self.levels {
            let k = S::from_usize(level.transversal.len()).expect("small count");
            let mut sum = Matrix::zeros(self.dim, self.dim);
            for t in &level.transversal {
                sum = sum.add(&t.matrix.transpose().mul(&acc).mul(&t.matrix));
            }
            acc = sum.scale(&(S::one() / k));
        }
        acc
    }

    /// Subgroup generated by the given symmetries, enumerated by closure.
    pub fn from_generators(
        space: &StateSpace<S>,
        generators: Vec<LinearSymmetry<S>>,
    ) -> Result<Self> {
        const LIMIT: usize = 1_000_000;
        for g in &generators {
            if !g.verify(space) {
                return Err(Error::BadParameter(
                    "generator is not a symmetry of the space".into(),
                ));
            }
        }
        let (dim, n) = (space.dimension(), space.vertices().len());
        let id = LinearSymmetry::identity(dim, n);
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.perm.clone()]);
        let mut elements = vec![id];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for g in &generators {
                let h = g.compose(&elements[k]);
                if seen.insert(h.perm.clone()) {
                    if elements.len() >= LIMIT {
                        return Err(Error::BudgetExceeded(format!(
                            "subgroup larger than {LIMIT}"
                        )));
                    }
                    queue.push_back(elements.len());
                    elements.push(h);
                }
            }
        }
        let base = independent_subset(space.vertices());
        let mut levels = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            let mut orbit = Vec::new();
            let mut transversal = Vec::new();
            for g in &elements {
                if base[..i].iter().all(|&p| g.perm[p] == p) && !orbit.contains(&g.perm[b]) {
                    orbit.push(g.perm[b]);
                    transversal.push(g.clone());
                }
            }
            levels.push(Level { orbit, transversal });
        }
        Ok(Self {
            dim,
            vertex_count: n,
            base,
            levels,
            generators,
        })
    }
}

/// `G_ij = vᵢᵀ Q⁻¹ vⱼ` with `Q = Σ vₖ vₖᵀ`; preserved by every symmetry.
pub fn canonical_form<S: Scalar>(space: &StateSpace<S>) -> Result<Matrix<S>> {
    let d = space.dimension();
    let mut q = Matrix::zeros(d, d);
    for v in space.vertices() {
        for i in 0..d {
            for j in 0..d {
                q[(i, j)] += v[i].clone() * v[j].clone();
            }
        }
    }
    let qinv = q
        .inverse()
        .ok_or_else(|| Error::Degenerate("vertices do not span the space".into()))?;
    let transformed: Vec<Vec<S>> = space.vertices().iter().map(|v| qinv.mul_vec(v)).collect();
    let n = space.vertices().len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = dot(&space.vertices()[i], &transformed[j]);
        }
    }
    Ok(g)
}

/// Equality classes of Gram entries (tolerance-snapped for floats).
fn gram_classes<S: Scalar>(gram: &Matrix<S>) -> Vec<Vec<usize>> {
    let n = gram.rows();
    let mut entries: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    entries.sort_by(|a, b| {
        gram[*a]
            .partial_cmp(&gram[*b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut class = vec![vec![0; n]; n];
    let mut id = 0;
    let mut anchor = gram[entries[0]].clone();
    for &(i, j) in &entries {
        if !gram[(i, j)].approx_eq(&anchor) {
            id += 1;
            anchor = gram[(i, j)].clone();
        }
        class[i][j] = id;
    }
    class
}

struct Search<'a, S> {
    space: &'a StateSpace<S>,
    class: Vec<Vec<usize>>,
    signature: Vec<Vec<usize>>,
    base: Vec<usize>,
    base_inverse: Matrix<S>,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn new(space: &'a StateSpace<S>) -> Result<Self> {
        let d = space.dimension();
        let base = independent_subset(space.vertices());
        if base.len() < d {
            return Err(Error::Degenerate(format!(
                "only {} linearly independent vertices in dimension {d}",
                base.len()
            )));
        }
        let gram = canonical_form(space)?;
        let class = gram_classes(&gram);
        let signature = class
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut s = row.clone();
                s.sort_unstable();
                s.push(row[i]);
                s
            })
            .collect();
        let cols: Vec<Vec<S>> = base.iter().map(|&b| space.vertices()[b].clone()).collect();
        let base_inverse = Matrix::from_cols(&cols)
            .inverse()
            .ok_or_else(|| Error::Degenerate("base is singular".into()))?;
        Ok(Self {
            space,
            class,
            signature,
            base,
            base_inverse,
        })
    }

    fn compatible(&self, images: &[usize], pos: usize, c: usize) -> bool {
        let b = self.base[pos];
        self.signature[c] == self.signature[b]
            && !images.contains(&c)
            && images
                .iter()
                .enumerate()
                .all(|(p, &img)| self.class[c][img] == self.class[b][self.base[p]])
    }

    /// Matrix sending the base to `images`, if it permutes the vertices.
    fn realize(&self, images: &[usize]) -> Option<LinearSymmetry<S>> {
        let verts = self.space.vertices();
        let cols: Vec<Vec<S>> = images.iter().map(|&i| verts[i].clone()).collect();
        let matrix = Matrix::from_cols(&cols).mul(&self.base_inverse);
        let mut perm = Vec::with_capacity(verts.len());
        let mut used = vec![false; verts.len()];
        for v in verts {
            let image = matrix.mul_vec(v);
            let k = verts
                .iter()
                .enumerate()
                .position(|(k, w)| !used[k] && lex_cmp(w, &image).is_eq())?;
            used[k] = true;
            perm.push(k);
        }
        let t = LinearSymmetry { matrix, perm };
        lex_cmp(&t.matrix.vec_mul(self.space.unit()), self.space.unit())
            .is_eq()
            .then_some(t)
    }

    /// Extends `images` (a prefix of base images) to a full symmetry.
    fn extend(&self, images: &mut Vec<usize>) -> Option<LinearSymmetry<S>> {
        let pos = images.len();
        if pos == self.base.len() {
            return self.realize(images);
        }
        for c in 0..self.space.vertices().len() {
            if !self.compatible(images, pos, c) {
                continue;
            }
            images.push(c);
            let found = self.extend(images);
            images.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

fn orbit_transversal<S: Scalar>(
    start: usize,
    generators: &[LinearSymmetry<S>],
    identity: &LinearSymmetry<S>,
) -> (Vec<usize>, Vec<LinearSymmetry<S>>) {
    let mut orbit = vec![start];
    let mut transversal = vec![identity.clone()];
    let mut k = 0;
    while k < orbit.len() {
        for g in generators {
            let q = g.perm[orbit[k]];
            if !orbit.contains(&q) {
                orbit.push(q);
                transversal.push(g.compose(&transversal[k]));
            }
        }
        k += 1;
    }
    (orbit, transversal)
}

/// Full group of linear symmetries of `Ω` preserving the unit.
pub fn automorphism_group<S: Scalar>(space: &StateSpace<S>) -> Result<SymmetryGroup<S>> {
    let search = Search::new(space)?;
    let d = space.dimension();
    let n = space.vertices().len();
    let identity = LinearSymmetry::identity(d, n);
    let mut generators: Vec<LinearSymmetry<S>> = Vec::new();
    let mut levels: Vec<Option<Level<S>>> = vec![None; d];

    for i in (0..d).rev() {
        let b = search.base[i];
        let fixed: Vec<usize> = search.base[..i].to_vec();
        let (mut orbit, _) = orbit_transversal(b, &generators, &identity);
        for c in 0..n {
            if orbit.contains(&c) || !search.compatible(&fixed, i, c) {
                continue;
            }
            let mut images = fixed.clone();
            images.push(c);
            if let Some(g) = search.extend(&mut images) {
                generators.push(g);
                orbit = orbit_transversal(b, &generators, &identity).0;
            }
        }
        let (orbit, transversal) = orbit_transversal(b, &generators, &identity);
        levels[i] = Some(Level { orbit, transversal });
    }

    Ok(SymmetryGroup {
        dim: d,
        vertex_count: n,
        base: search.base,
        levels: levels
            .into_iter()
            .map(|l| l.expect("every level built"))
            .collect(),
        generators,
    })
}

/// Partition of `items` into orbits; each orbit is sorted and the list is
/// ordered by lowest member.
pub fn orbits<S, T, F>(group: &SymmetryGroup<S>, items: &[T], action: F) -> Result<Vec<Vec<usize>>>
where
    S: Scalar,
    T: Eq + Hash + Clone + std::fmt::Debug,
    F: Fn(&LinearSymmetry<S>, &T) -> T,
{
    let index: HashMap<&T, usize> = items.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut owner = vec![usize::MAX; items.len()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..items.len() {
        if owner[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        owner[start] = id;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            for g in group.generators() {
                let image = action(g, &items[orbit[k]]);
                let &j = index.get(&image).ok_or_else(|| {
                    Error::ActionNotClosed(format!(
                        "{:?} maps outside the item set",
                        items[orbit[k]]
                    ))
                })?;
                if owner[j] == usize::MAX {
                    owner[j] = id;
                    orbit.push(j);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    Ok(out)
}

/// Orbits of the vertices under the group.
pub fn vertex_orbits<S: Scalar>(group: &SymmetryGroup<S>) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..group.vertex_count).collect();
    orbits(group, &items, |g, &i| g.perm[i]).expect("vertex action is closed")
}

pub fn is_transitive<S: Scalar>(group: &SymmetryGroup<S>) -> bool {
    vertex_orbits(group).len() <= 1
}
