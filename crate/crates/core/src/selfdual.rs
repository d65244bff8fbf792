//! Invariant inner product and the self-duality check.
//!
//! For a space whose symmetry group is transitive on pure states:
//!
//! 1. `μ` is the group average of a pure state, and `x = u(x)·μ + x̂` splits
//!    the space into the line through `μ` and the hyperplane `Â = {u = 0}`.
//! 2. `(·,·)` on `Â` is the group average of the standard product, scaled so
//!    pure states have unit Bloch norm.
//! 3. `c` is the minimal Bloch overlap over pairs of states, attained at
//!    vertices, and `λ = -c / (1 - c)`.
//! 4. `⟨x, y⟩ = λ x₀ y₀ + (1 - λ)(x̂, ŷ)`.
//!
//! Self-duality under `⟨·,·⟩` means the effect cone, mapped to vectors by
//! the form, equals the state cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::{distinguishing_effect, DistinguishablePair};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, lex_cmp, Scalar};
use crate::space::{Effect, StateSpace};
use crate::symmetry::{is_transitive, SymmetryGroup};

#[derive(Clone, Debug, PartialEq)]
pub struct BlochDecomposition<S> {
    pub mu: Vec<S>,
    /// Basis of `Â`, one vector per entry.
    pub hat_basis: Vec<Vec<S>>,
    unit: Vec<S>,
}

impl<S: Scalar> BlochDecomposition<S> {
    /// `(x₀, x̂)` with `x = x₀ μ + x̂`.
    pub fn project(&self, x: &[S]) -> (S, Vec<S>) {
        let x0 = dot(&self.unit, x);
        let hat = x
            .iter()
            .zip(&self.mu)
            .map(|(xi, mi)| xi.clone() - x0.clone() * mi.clone())
            .collect();
        (x0, hat)
    }

    /// Ambient matrix of `x ↦ x̂`, i.e. `I - μ uᵀ`.
    pub fn projector(&self) -> Matrix<S> {
        let d = self.mu.len();
        let mut p = Matrix::identity(d);
        for i in 0..d {
            for j in 0..d {
                p[(i, j)] -= self.mu[i].clone() * self.unit[j].clone();
            }
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InnerProductForm<S> {
    pub bloch: BlochDecomposition<S>,
    /// `(·,·)` as an ambient matrix that vanishes on `μ`.
    pub hat_ambient: Matrix<S>,
    /// `(·,·)` in the coordinates of `bloch.hat_basis`.
    pub hat_form: Matrix<S>,
    pub c: S,
    pub lambda: S,
    /// `⟨·,·⟩` on the whole space.
    pub full_form: Matrix<S>,
    /// Whether two random starting products average to the same form up to scale.
    pub unique_up_to_scale: bool,
}

impl<S: Scalar> InnerProductForm<S> {
    /// Bloch overlap `(x̂, ŷ)`.
    pub fn overlap(&self, x: &[S], y: &[S]) -> S {
        self.hat_ambient.bilinear(x, y)
    }

    /// `⟨x, y⟩`.
    pub fn product(&self, x: &[S], y: &[S]) -> S {
        self.full_form.bilinear(x, y)
    }

    pub fn is_positive_definite(&self) -> bool {
        is_positive_definite(&self.full_form) && is_positive_definite(&self.hat_form)
    }
}

fn is_positive_definite<S: Scalar>(m: &Matrix<S>) -> bool {
    if !m.is_symmetric() {
        return false;
    }
    if S::EXACT {
        m.leading_minors().iter().all(|x| x.is_positive())
    } else {
        m.symmetric_eigenvalues_f64()
            .first()
            .is_none_or(|&ev| ev > S::tolerance().to_f64())
    }
}

/// Group average of the orbit of vertex 0.
pub fn maximally_mixed<S: Scalar>(
    space: &StateSpace<S>,
    group: &SymmetryGroup<S>,
) -> Result<Vec<S>> {
    if !is_transitive(group) {
        return Err(Error::NotTransitive);
    }
    // Each stabilizer level is a set of coset representatives, so averaging
    // level by level averages over the whole group.
    let mut mu = space.vertex(0)?.to_vec();
    for level in group.transversals().collect::<Vec<_>>().into_iter().rev() {
        let k = S::from_usize(level.len()).expect("small count");
        let mut sum = vec![S::zero(); mu.len()];
        for t in level {
            for (s, x) in sum.iter_mut().zip(t.apply(&mu)) {
                *s += x;
            }
        }
        mu = sum.into_iter().map(|x| x / k.clone()).collect();
    }
    Ok(mu)
}

fn bloch_decomposition<S: Scalar>(space: &StateSpace<S>, mu: Vec<S>) -> BlochDecomposition<S> {
    let hat_basis = Matrix::from_rows(&[space.unit().to_vec()]).nullspace();
    BlochDecomposition {
        mu,
        hat_basis,
        unit: space.unit().to_vec(),
    }
}

fn restrict<S: Scalar>(form: &Matrix<S>, basis: &[Vec<S>]) -> Matrix<S> {
    let b = Matrix::from_cols(basis);
    b.transpose().mul(form).mul(&b)
}

fn proportional<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> bool {
    let normalize = |m: &Matrix<S>| {
        let rows = m.to_rows();
        let pivot = rows.iter().flatten().cloned().fold(S::zero(), |acc, x| {
            if x.abs() > acc.abs() {
                x
            } else {
                acc
            }
        });
        if pivot.is_zero() {
            return m.clone();
        }
        m.scale(&(S::one() / pivot))
    };
    normalize(a).approx_eq(&normalize(b))
}

fn random_form<S: Scalar>(d: usize, rng: &mut ChaCha8Rng) -> Matrix<S> {
    let mut r = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            r[(i, j)] = S::int(rng.random_range(-3..=3));
        }
    }
    r.transpose().mul(&r).add(&Matrix::identity(d))
}

/// Builds `(·,·)`, `c`, `λ` and `⟨·,·⟩`.
pub fn invariant_inner_product<S: Scalar>(
    space: &StateSpace<S>,
    group: &SymmetryGroup<S>,
) -> Result<InnerProductForm<S>> {
    if space.is_degenerate() || space.dimension() < 2 {
        return Err(Error::Degenerate(format!(
            "{} has no Bloch space to carry an inner product",
            space.name()
        )));
    }
    let mu = maximally_mixed(space, group)?;
    let bloch = bloch_decomposition(space, mu);
    let p = bloch.projector();

    let average = |start: &Matrix<S>| {
        let k = p.transpose().mul(start).mul(&p);
        group.average_form(&k)
    };
    let mut hat_ambient = average(&Matrix::identity(space.dimension()));
    let (_, w0) = bloch.project(space.vertex(0)?);
    let norm = hat_ambient.bilinear(&w0, &w0);
    if !norm.is_clearly_positive() {
        return Err(Error::Degenerate("pure states have zero Bloch norm".into()));
    }
    hat_ambient = hat_ambient.scale(&(S::one() / norm));
    let hat_form = restrict(&hat_ambient, &bloch.hat_basis);

    let hats: Vec<Vec<S>> = space
        .vertices()
        .iter()
        .map(|v| bloch.project(v).1)
        .collect();
    let mut c = S::one();
    for x in &hats {
        let kx = hat_ambient.mul_vec(x);
        for y in &hats {
            let o = dot(y, &kx);
            if o < c {
                c = o;
            }
        }
    }
    if !c.is_clearly_negative() {
        return Err(Error::Degenerate(
            "minimal Bloch overlap is not negative".into(),
        ));
    }
    let lambda = -c.clone() / (S::one() - c.clone());

    let u = space.unit();
    let d = space.dimension();
    let mut full_form = p
        .transpose()
        .mul(&hat_ambient)
        .mul(&p)
        .scale(&(S::one() - lambda.clone()));
    for i in 0..d {
        for j in 0..d {
            full_form[(i, j)] += lambda.clone() * u[i].clone() * u[j].clone();
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f0e5);
    let first = restrict(&average(&random_form(d, &mut rng)), &bloch.hat_basis);
    let second = restrict(&average(&random_form(d, &mut rng)), &bloch.hat_basis);
    let unique_up_to_scale = proportional(&first, &second) && proportional(&first, &hat_form);

    Ok(InnerProductForm {
        bloch,
        hat_ambient,
        hat_form,
        c,
        lambda,
        full_form,
        unique_up_to_scale,
    })
}

/// `E_ω(φ) = ((ω̂, φ̂) - c) / (1 - c)`, i.e. the functional `⟨ω, ·⟩`.
pub fn e_omega<S: Scalar>(
    space: &StateSpace<S>,
    form: &InnerProductForm<S>,
    vertex: usize,
) -> Result<Effect<S>> {
    let omega = space.vertex(vertex)?;
    Ok(Effect(form.full_form.mul_vec(omega)))
}

/// Reason a space fails to be self-dual under the given form.
#[derive(Clone, Debug, PartialEq)]
pub enum DualityViolation<S> {
    /// Extremal effect whose vector representative is not a state-cone element.
    EffectOutsideStates {
        effect: Vec<S>,
        representative: Vec<S>,
        violated_facet: Vec<S>,
    },
    /// Pure state whose functional `⟨ω, ·⟩` is negative on some state.
    StateOutsideEffects {
        vertex: usize,
        functional: Vec<S>,
        negative_on: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfDualityCertificate<S> {
    pub is_self_dual: bool,
    pub form: InnerProductForm<S>,
    /// On success, `matching[k]` is the vertex whose ray equals the
    /// representative of effect ray `k`.
    pub matching: Option<Vec<usize>>,
    pub witness: Option<DualityViolation<S>>,
}

fn canonical<S: Scalar>(v: &[S]) -> Vec<S> {
    let mut v = v.to_vec();
    S::canonicalize_ray(&mut v);
    v
}

/// Checks both cone inclusions on extremal rays. Every extremal ray of a
/// polyhedral cone is exposed, so this decides equality exactly.
pub fn verify_self_dual<S: Scalar>(
    space: &StateSpace<S>,
    form: &InnerProductForm<S>,
) -> Result<SelfDualityCertificate<S>> {
    let (matching, witness) = duality_under(space, &form.full_form)?;
    Ok(SelfDualityCertificate {
        is_self_dual: witness.is_none(),
        form: form.clone(),
        matching,
        witness,
    })
}

/// Ray matching on success, violation otherwise, for an arbitrary
/// nonsingular bilinear form.
#[allow(clippy::type_complexity)]
pub fn duality_under<S: Scalar>(
    space: &StateSpace<S>,
    full_form: &Matrix<S>,
) -> Result<(Option<Vec<usize>>, Option<DualityViolation<S>>)> {
    let inverse = full_form
        .inverse()
        .ok_or_else(|| Error::Degenerate("inner product is singular".into()))?;
    let mut witness = None;
    let mut representatives = Vec::with_capacity(space.facets().len());
    for f in space.facets() {
        let rep = inverse.mul_vec(f);
        if let Some(h) = space
            .facets()
            .iter()
            .find(|h| dot(h, &rep).is_clearly_negative())
        {
            witness = Some(DualityViolation::EffectOutsideStates {
                effect: f.clone(),
                representative: rep,
                violated_facet: h.clone(),
            });
            break;
        }
        representatives.push(rep);
    }
    if witness.is_none() {
        'vertices: for (i, v) in space.vertices().iter().enumerate() {
            let functional = full_form.mul_vec(v);
            for (j, w) in space.vertices().iter().enumerate() {
                if dot(&functional, w).is_clearly_negative() {
                    witness = Some(DualityViolation::StateOutsideEffects {
                        vertex: i,
                        functional,
                        negative_on: j,
                    });
                    break 'vertices;
                }
            }
        }
    }
    let matching = if witness.is_none() {
        let rays: Vec<Vec<S>> = space.vertices().iter().map(|v| canonical(v)).collect();
        representatives
            .iter()
            .map(|r| {
                let r = canonical(r);
                rays.iter().position(|v| lex_cmp(v, &r).is_eq())
            })
            .collect::<Option<Vec<usize>>>()
    } else {
        None
    };
    Ok((matching, witness))
}

/// Outcome of checking the three overlap statements and the product properties.
#[derive(Clone, Debug, PartialEq)]
pub struct StatementsReport {
    /// The space is not bit-symmetric, so failures prove nothing.
    pub advisory: bool,
    pub c_negative: bool,
    /// Every pure-pair overlap lies in `[c, 1]`.
    pub overlaps_in_range: bool,
    /// Overlap `c` implies perfect distinguishability.
    pub overlap_c_distinguishable: bool,
    /// Perfect distinguishability implies overlap `c`.
    pub distinguishable_overlap_c: bool,
    pub unit_norm_on_pure: bool,
    pub orthogonal_on_distinguishable: bool,
    pub nonnegative_on_states: bool,
    pub invariant: bool,
    pub positive_definite: bool,
    pub failures: Vec<String>,
}

impl StatementsReport {
    pub fn all_pass(&self) -> bool {
        self.c_negative
            && self.overlaps_in_range
            && self.overlap_c_distinguishable
            && self.distinguishable_overlap_c
            && self.unit_norm_on_pure
            && self.orthogonal_on_distinguishable
            && self.nonnegative_on_states
            && self.invariant
            && self.positive_definite
    }
}

pub fn check_statements<S: Scalar>(
    space: &StateSpace<S>,
    group: &SymmetryGroup<S>,
    form: &InnerProductForm<S>,
    pairs: &[DistinguishablePair<S>],
    bit_symmetric: bool,
) -> StatementsReport {
    let n = space.vertices().len();
    let verts = space.vertices();
    let mut failures = Vec::new();
    let distinguishable = |i: usize, j: usize| pairs.iter().any(|p| p.i == i && p.j == j);

    let c_negative = form.c.is_clearly_negative();
    if !c_negative {
        failures.push(format!("c = {} is not negative", form.c));
    }
    let mut in_range = true;
    let mut ii = true;
    let mut iii = true;
    let mut orthogonal = true;
    let mut nonneg = true;
    let mut unit_norm = true;
    for i in 0..n {
        for j in 0..n {
            let o = form.overlap(&verts[i], &verts[j]);
            if o.approx_cmp(&form.c).is_lt() || o.approx_cmp(&S::one()).is_gt() {
                in_range = false;
                failures.push(format!("overlap of ({i},{j}) is {o}, outside [c, 1]"));
            }
            let at_c = o.approx_eq(&form.c);
            if i != j && at_c && !distinguishable(i, j) {
                ii = false;
                failures.push(format!(
                    "({i},{j}) has overlap c but is not distinguishable"
                ));
            }
            if i != j && distinguishable(i, j) && !at_c {
                iii = false;
                failures.push(format!(
                    "({i},{j}) is distinguishable with overlap {o} != c = {}",
                    form.c
                ));
            }
            let p = form.product(&verts[i], &verts[j]);
            if p.is_clearly_negative() {
                nonneg = false;
                failures.push(format!("<v{i}, v{j}> = {p} is negative"));
            }
            if i == j && !p.approx_eq(&S::one()) {
                unit_norm = false;
                failures.push(format!("<v{i}, v{i}> = {p} != 1"));
            }
            if i != j && distinguishable(i, j) && !p.is_negligible() {
                orthogonal = false;
                failures.push(format!("<v{i}, v{j}> = {p} on a distinguishable pair"));
            }
        }
    }
    let invariant = group.generators().iter().all(|t| {
        t.matrix
            .transpose()
            .mul(&form.full_form)
            .mul(&t.matrix)
            .approx_eq(&form.full_form)
    });
    if !invariant {
        failures.push("form is not invariant under the group".into());
    }
    let positive_definite = form.is_positive_definite();
    if !positive_definite {
        failures.push("form is not positive definite".into());
    }
    StatementsReport {
        advisory: !bit_symmetric,
        c_negative,
        overlaps_in_range: in_range,
        overlap_c_distinguishable: ii,
        distinguishable_overlap_c: iii,
        unit_norm_on_pure: unit_norm,
        orthogonal_on_distinguishable: orthogonal,
        nonnegative_on_states: nonneg,
        invariant,
        positive_definite,
        failures,
    }
}

/// A pair of states with `⟨x, y⟩ = 0` and the outcome of the distinguishability LP.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalPair<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub distinguishable: bool,
}

/// Searches chord-midpoint grids for orthogonal pairs of states and tests
/// each for perfect distinguishability. Reports findings only.
///
/// States sampled: vertices and the points `(1-s)vₐ + s v_b` for
/// `s = k/steps`. Pairs where one side is pure are included.
pub fn orthogonal_pair_search<S: Scalar>(
    space: &StateSpace<S>,
    form: &InnerProductForm<S>,
    steps: usize,
) -> Result<Vec<OrthogonalPair<S>>> {
    let verts = space.vertices();
    let n = verts.len();
    let mut states: Vec<Vec<S>> = verts.to_vec();
    let steps = steps.max(1);
    for a in 0..n {
        for b in a + 1..n {
            for k in 1..steps {
                let s = S::ratio(k as i64, steps as i64);
                states.push(
                    verts[a]
                        .iter()
                        .zip(&verts[b])
                        .map(|(x, y)| (S::one() - s.clone()) * x.clone() + s.clone() * y.clone())
                        .collect(),
                );
            }
        }
    }
    let mut out = Vec::new();
    for (i, x) in states.iter().enumerate() {
        for y in &states[i + 1..] {
            if form.product(x, y).is_negligible() {
                let distinguishable = distinguishing_effect(space, x, y)?.is_some();
                out.push(OrthogonalPair {
                    x: x.clone(),
                    y: y.clone(),
                    distinguishable,
                });
            }
        }
    }
    Ok(out)
}
