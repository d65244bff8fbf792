//! Maximal tensor products, entanglement and CHSH.
//!
//! Composite vectors live in `R^(dA·dB)` with index `p·dB + q`. The maximal
//! tensor product is the cone `{w : (E⊗F)(w) ≥ 0}` over extremal effects of
//! both factors, sliced at `(u⊗u)(w) = 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::is_bit_symmetric;
use crate::catalog::AnySpace;
use crate::cone::extreme_rays_capped;
use crate::error::{Error, Result};
use crate::linalg::{rank_of, Matrix};
use crate::lp::{maximize_over_polytope, LinearProgram, LpStatus, Relation, Sense};
use crate::scalar::{dot, Rational, Scalar};
use crate::space::{Effect, StateSpace};
use crate::symmetry::automorphism_group;

pub const DEFAULT_BUDGET: usize = 16;
pub const DEFAULT_VERTEX_LIMIT: usize = 30;
/// Cap on intermediate rays during vertex enumeration of a composite.
pub const DEFAULT_RAY_LIMIT: usize = 5_000;

pub fn kron<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a.clone() * b.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum VertexClass<S> {
    /// `w = a⊗b`; `ia`, `ib` are the factor vertices equal to `a`, `b`, if any.
    Product {
        a: Vec<S>,
        b: Vec<S>,
        ia: Option<usize>,
        ib: Option<usize>,
    },
    Entangled,
}

impl<S> VertexClass<S> {
    pub fn is_product(&self) -> bool {
        matches!(self, VertexClass::Product { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorSpace<S> {
    pub composite: StateSpace<S>,
    pub factors: (StateSpace<S>, StateSpace<S>),
    pub classes: Vec<VertexClass<S>>,
}

impl<S: Scalar> TensorSpace<S> {
    pub fn product_count(&self) -> usize {
        self.classes.iter().filter(|c| c.is_product()).count()
    }

    pub fn entangled_count(&self) -> usize {
        self.classes.len() - self.product_count()
    }

    /// Marginal states `(a, b)` of a composite vector.
    pub fn marginals(&self, w: &[S]) -> (Vec<S>, Vec<S>) {
        let m = reshape(w, self.factors.0.dimension(), self.factors.1.dimension());
        (
            m.mul_vec(self.factors.1.unit()),
            m.vec_mul(self.factors.0.unit()),
        )
    }
}

fn reshape<S: Scalar>(w: &[S], da: usize, db: usize) -> Matrix<S> {
    let rows: Vec<Vec<S>> = w.chunks(db).map(<[S]>::to_vec).collect();
    debug_assert_eq!(rows.len(), da);
    Matrix::from_rows(&rows)
}

fn product_inequalities<S: Scalar>(a: &StateSpace<S>, b: &StateSpace<S>) -> Vec<Vec<S>> {
    a.facets()
        .iter()
        .flat_map(|e| b.facets().iter().map(move |f| kron(e, f)))
        .collect()
}

fn check_budget<S: Scalar>(a: &StateSpace<S>, b: &StateSpace<S>, budget: usize) -> Result<()> {
    let d = a.dimension() * b.dimension();
    if d > budget {
        return Err(Error::BudgetExceeded(format!(
            "composite dimension {d} exceeds the budget {budget}"
        )));
    }
    Ok(())
}

/// Builds `A ⊗max B` if `dA·dB ≤ budget`, with the default ray limit.
pub fn max_tensor<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    budget: usize,
) -> Result<TensorSpace<S>> {
    max_tensor_with(a, b, budget, DEFAULT_RAY_LIMIT)
}

/// Builds `A ⊗max B`; fails with `BudgetExceeded` if `dA·dB > budget` or the
/// enumeration passes `ray_limit` intermediate rays.
pub fn max_tensor_with<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    budget: usize,
    ray_limit: usize,
) -> Result<TensorSpace<S>> {
    check_budget(a, b, budget)?;
    let (da, db) = (a.dimension(), b.dimension());
    let inequalities = product_inequalities(a, b);
    let unit = kron(a.unit(), b.unit());
    let vertices: Vec<Vec<S>> = extreme_rays_capped(da * db, &inequalities, Some(ray_limit))?
        .into_iter()
        .map(|r| {
            let norm = dot(&unit, &r);
            r.into_iter().map(|x| x / norm.clone()).collect()
        })
        .collect();
    // Products of extremal effects are extremal in the dual of the maximal
    // tensor cone, so they form its irredundant H-representation.
    let composite = StateSpace::from_trusted(
        format!("{}⊗{}", a.name(), b.name()),
        unit,
        vertices,
        inequalities,
    );
    let classes = composite
        .vertices()
        .par_iter()
        .map(|w| classify(a, b, w))
        .collect();
    Ok(TensorSpace {
        composite,
        factors: (a.clone(), b.clone()),
        classes,
    })
}

fn classify<S: Scalar>(a: &StateSpace<S>, b: &StateSpace<S>, w: &[S]) -> VertexClass<S> {
    let (da, db) = (a.dimension(), b.dimension());
    let m = reshape(w, da, db);
    let rank_one = if S::EXACT {
        (0..da).all(|p| {
            (p + 1..da).all(|r| {
                (0..db).all(|q| {
                    (q + 1..db).all(|s| {
                        (m[(p, q)].clone() * m[(r, s)].clone()
                            - m[(p, s)].clone() * m[(r, q)].clone())
                        .is_zero()
                    })
                })
            })
        })
    } else {
        m.singular_values_f64()
            .get(1)
            .is_none_or(|&s| s < S::tolerance().to_f64())
    };
    if !rank_one {
        return VertexClass::Entangled;
    }
    let x = m.mul_vec(b.unit());
    let y = m.vec_mul(a.unit());
    if !a.contains_state(&x) || !b.contains_state(&y) {
        return VertexClass::Entangled;
    }
    VertexClass::Product {
        ia: a.find_vertex(&x),
        ib: b.find_vertex(&y),
        a: x,
        b: y,
    }
}

/// Classifies vertex `k` of the composite.
pub fn classify_vertex<S: Scalar>(tensor: &TensorSpace<S>, k: usize) -> Result<VertexClass<S>> {
    let w = tensor.composite.vertex(k)?;
    Ok(classify(&tensor.factors.0, &tensor.factors.1, w))
}

/// Two binary measurements per side, given by their "0" outcome effects.
#[derive(Clone, Debug, PartialEq)]
pub struct ChshSetup<S> {
    pub alice: [Effect<S>; 2],
    pub bob: [Effect<S>; 2],
}

impl<S: Scalar> ChshSetup<S> {
    pub fn fiducial(tensor: &TensorSpace<S>) -> Result<Self> {
        Ok(Self {
            alice: tensor.factors.0.fiducial_measurements()?,
            bob: tensor.factors.1.fiducial_measurements()?,
        })
    }

    pub fn validate(&self, tensor: &TensorSpace<S>) -> Result<()> {
        for (side, space, effects) in [
            ("A", &tensor.factors.0, &self.alice),
            ("B", &tensor.factors.1, &self.bob),
        ] {
            for (k, e) in effects.iter().enumerate() {
                if !e.is_proper(space) {
                    return Err(Error::ImproperEffect(format!(
                        "measurement {} on {side}",
                        k + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Covector `S = C₁₁ + C₁₂ + C₂₁ - C₂₂` with `Cᵢⱼ = (2eᵢ - u)⊗(2fⱼ - u)`.
    pub fn covector(&self, tensor: &TensorSpace<S>) -> Vec<S> {
        chsh_covector(
            &self.alice,
            &self.bob,
            tensor.factors.0.unit(),
            tensor.factors.1.unit(),
        )
    }
}

/// CHSH value of a composite state.
pub fn chsh_value<S: Scalar>(tensor: &TensorSpace<S>, setup: &ChshSetup<S>, w: &[S]) -> Result<S> {
    setup.validate(tensor)?;
    if w.len() != tensor.composite.dimension() {
        return Err(Error::DimensionMismatch {
            expected: tensor.composite.dimension(),
            found: w.len(),
        });
    }
    Ok(dot(&setup.covector(tensor), w))
}

/// Maximal CHSH value over the composite and the lowest-index vertex attaining it.
pub fn chsh_max<S: Scalar>(tensor: &TensorSpace<S>, setup: &ChshSetup<S>) -> Result<(S, usize)> {
    setup.validate(tensor)?;
    maximize_over_polytope(&setup.covector(tensor), &tensor.composite)
}

/// Same maximum computed by LP over the H-representation.
pub fn chsh_max_lp<S: Scalar>(tensor: &TensorSpace<S>, setup: &ChshSetup<S>) -> Result<S> {
    setup.validate(tensor)?;
    let space = &tensor.composite;
    let mut lp = LinearProgram::feasibility(space.dimension());
    lp.constrain(space.unit().to_vec(), Relation::Eq, S::one());
    for h in space.facets() {
        lp.constrain(h.clone(), Relation::Ge, S::zero());
    }
    let res = lp
        .with_objective(Sense::Maximize, setup.covector(tensor))
        .solve()?;
    match (res.status, res.optimum) {
        (LpStatus::Optimal, Some(v)) => Ok(v),
        (status, _) => Err(Error::Degenerate(format!("CHSH program ended {status:?}"))),
    }
}

/// Searches for an entangled vertex of `A ⊗max B` without enumerating it.
///
/// Maximizes seeded random integer functionals over the composite by LP. A
/// generic functional is maximized at a single vertex; the first optimum
/// that is a vertex (tight inequalities of rank `d - 1`) and fails the rank
/// test is returned. Tries at most `attempts` functionals.
pub fn find_entangled_vertex<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    budget: usize,
    attempts: usize,
) -> Result<Option<Vec<S>>> {
    check_budget(a, b, budget)?;
    let inequalities = product_inequalities(a, b);
    let unit = kron(a.unit(), b.unit());
    let d = unit.len();
    // Offsets from the product of centroids keep the simplex away from the
    // fully degenerate origin.
    let center = kron(&centroid(a), &centroid(b));
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e45_0e02);
    for _ in 0..attempts {
        let objective: Vec<S> = (0..d)
            .map(|_| S::int(rng.random_range(-1000..=1000)))
            .collect();
        let mut lp = LinearProgram::feasibility(d);
        lp.constrain(unit.clone(), Relation::Eq, S::zero());
        for h in &inequalities {
            lp.constrain(h.clone(), Relation::Ge, -dot(h, &center));
        }
        let res = lp.with_objective(Sense::Maximize, objective).solve()?;
        let (LpStatus::Optimal, Some(y)) = (res.status, res.witness) else {
            continue;
        };
        let w: Vec<S> = y
            .into_iter()
            .zip(&center)
            .map(|(y, c)| y + c.clone())
            .collect();
        let tight: Vec<Vec<S>> = inequalities
            .iter()
            .filter(|h| dot(h, &w).is_negligible())
            .cloned()
            .collect();
        if rank_of(&tight) + 1 == d && !classify(a, b, &w).is_product() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn centroid<S: Scalar>(space: &StateSpace<S>) -> Vec<S> {
    let n = S::int(space.vertices().len() as i64);
    let mut sum = vec![S::zero(); space.dimension()];
    for v in space.vertices() {
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x.clone();
        }
    }
    sum.into_iter().map(|x| x / n.clone()).collect()
}

fn chsh_covector<S: Scalar>(
    alice: &[Effect<S>; 2],
    bob: &[Effect<S>; 2],
    ua: &[S],
    ub: &[S],
) -> Vec<S> {
    let observable = |e: &Effect<S>, u: &[S]| -> Vec<S> {
        e.0.iter()
            .zip(u)
            .map(|(x, u)| S::int(2) * x.clone() - u.clone())
            .collect()
    };
    let a: Vec<Vec<S>> = alice.iter().map(|e| observable(e, ua)).collect();
    let b: Vec<Vec<S>> = bob.iter().map(|e| observable(e, ub)).collect();
    let mut out = vec![S::zero(); ua.len() * ub.len()];
    for (i, j, sign) in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)] {
        for (o, x) in out.iter_mut().zip(kron(&a[i], &b[j])) {
            *o += S::int(sign) * x;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem2Verdict {
    /// No entangled vertex, so nothing is predicted.
    NoConstraint,
    /// Entangled vertices and the direct check found the composite not bit-symmetric.
    Consistent,
    /// Entangled vertices; the composite is too large for the direct check.
    Predicted,
    /// Entangled vertices, yet the direct check found the composite bit-symmetric.
    Contradicted,
    /// Enumeration exceeded its budget and no entangled vertex was found.
    Unresolved,
}

impl Theorem2Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Theorem2Verdict::NoConstraint => "no-constraint",
            Theorem2Verdict::Consistent => "consistent",
            Theorem2Verdict::Predicted => "predicted-not-bit-symmetric",
            Theorem2Verdict::Contradicted => "contradicted",
            Theorem2Verdict::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Report<S> {
    /// Vertex counts, when the composite was enumerated.
    pub vertices: Option<usize>,
    pub product: Option<usize>,
    pub entangled: Option<usize>,
    /// Entangled vertex found by LP when enumeration was over budget.
    pub witness: Option<Vec<S>>,
    /// Direct bit-symmetry verdict on the composite, when it was run.
    pub composite_bit_symmetric: Option<bool>,
    pub orbit_count: Option<usize>,
    pub verdict: Theorem2Verdict,
}

/// Compares entanglement in `A ⊗max B` with the composite's bit-symmetry verdict.
/// The direct check runs only when the composite has at most `vertex_limit` vertices.
pub fn theorem2_check<S: Scalar>(
    tensor: &TensorSpace<S>,
    vertex_limit: usize,
) -> Result<Theorem2Report<S>> {
    let composite = &tensor.composite;
    let entangled = tensor.entangled_count();
    let direct = if composite.vertices().len() <= vertex_limit {
        let group = automorphism_group(composite)?;
        Some(is_bit_symmetric(composite, &group)?)
    } else {
        None
    };
    let composite_bit_symmetric = direct.as_ref().map(|v| v.is_bit_symmetric);
    let verdict = match (entangled > 0, composite_bit_symmetric) {
        (false, _) => Theorem2Verdict::NoConstraint,
        (true, None) => Theorem2Verdict::Predicted,
        (true, Some(false)) => Theorem2Verdict::Consistent,
        (true, Some(true)) => Theorem2Verdict::Contradicted,
    };
    Ok(Theorem2Report {
        vertices: Some(composite.vertices().len()),
        product: Some(tensor.product_count()),
        entangled: Some(entangled),
        witness: None,
        composite_bit_symmetric,
        orbit_count: direct.map(|v| v.orbit_count),
        verdict,
    })
}

/// [`theorem2_check`] on a factor pair. If enumeration passes `ray_limit`,
/// falls back to [`find_entangled_vertex`]; a witness then yields
/// `Predicted`, since the composite has more than `n_A·n_B` vertices.
pub fn theorem2_pair<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    budget: usize,
    ray_limit: usize,
    vertex_limit: usize,
) -> Result<Theorem2Report<S>> {
    match max_tensor_with(a, b, budget, ray_limit) {
        Ok(t) => theorem2_check(&t, vertex_limit),
        Err(Error::BudgetExceeded(_)) if a.dimension() * b.dimension() <= budget => {
            theorem2_by_search(a, b, budget, vertex_limit)
        }
        Err(e) => Err(e),
    }
}

/// Verdict from an LP-found entangled vertex, for composites too large to enumerate.
pub fn theorem2_by_search<S: Scalar>(
    a: &StateSpace<S>,
    b: &StateSpace<S>,
    budget: usize,
    vertex_limit: usize,
) -> Result<Theorem2Report<S>> {
    let witness = find_entangled_vertex(a, b, budget, 64)?;
    let over_limit = a.vertices().len() * b.vertices().len() >= vertex_limit;
    let verdict = match (&witness, over_limit) {
        (Some(_), true) => Theorem2Verdict::Predicted,
        _ => Theorem2Verdict::Unresolved,
    };
    Ok(Theorem2Report {
        vertices: None,
        product: None,
        entangled: None,
        witness,
        composite_bit_symmetric: None,
        orbit_count: None,
        verdict,
    })
}

/// Two factors brought to a common backend: exact if both are exact.
#[derive(Clone, Debug, PartialEq)]
pub enum SpacePair {
    Exact(StateSpace<Rational>, StateSpace<Rational>),
    Float(StateSpace<f64>, StateSpace<f64>),
}

impl SpacePair {
    pub fn new(a: &AnySpace, b: &AnySpace) -> Result<Self> {
        Ok(match (a, b) {
            (AnySpace::Exact(a), AnySpace::Exact(b)) => SpacePair::Exact(a.clone(), b.clone()),
            _ => SpacePair::Float(a.to_float()?, b.to_float()?),
        })
    }
}
