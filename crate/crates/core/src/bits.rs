//! Perfect distinguishability, logical bits and the bit-symmetry decision.

use rayon::prelude::*;

use crate::cone::{face_generated_by, Face};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::scalar::{dot, Scalar};
use crate::space::{Effect, StateSpace};
use crate::symmetry::{is_transitive, orbits, SymmetryGroup};

/// Ordered pure pair `(i, j)` with a proper effect that is 1 on `vᵢ` and 0 on `vⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishablePair<S> {
    pub i: usize,
    pub j: usize,
    pub witness: Effect<S>,
}

impl<S: Scalar> DistinguishablePair<S> {
    pub fn verify(&self, space: &StateSpace<S>) -> bool {
        let (Ok(vi), Ok(vj)) = (space.vertex(self.i), space.vertex(self.j)) else {
            return false;
        };
        self.witness.is_proper(space)
            && self.witness.eval(vi).approx_eq(&S::one())
            && self.witness.eval(vj).is_negligible()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BitSymmetryVerdict<S> {
    pub is_bit_symmetric: bool,
    pub orbit_count: usize,
    pub orbit_representatives: Vec<DistinguishablePair<S>>,
    /// Ordered pairs `(i, j)` per orbit.
    pub orbits: Vec<Vec<(usize, usize)>>,
    pub transitive_on_pure_states: bool,
    /// Fewer than two pure states; the verdict holds vacuously.
    pub degenerate: bool,
}

/// LP `{e(x) = 1, e(y) = 0, 0 ≤ e(vₖ) ≤ 1 ∀k}` over effect covectors `e`.
///
/// Imposing the bounds at the vertices suffices since states are convex
/// mixtures of vertices.
pub fn distinguishing_program<S: Scalar>(
    space: &StateSpace<S>,
    x: &[S],
    y: &[S],
) -> LinearProgram<S> {
    let mut lp = LinearProgram::feasibility(space.dimension());
    lp.constrain(x.to_vec(), Relation::Eq, S::one());
    lp.constrain(y.to_vec(), Relation::Eq, S::zero());
    for v in space.vertices() {
        lp.constrain(v.clone(), Relation::Ge, S::zero());
        lp.constrain(v.clone(), Relation::Le, S::one());
    }
    lp
}

/// Proper effect with `e(x) = 1`, `e(y) = 0`, for arbitrary (possibly mixed) states.
pub fn distinguishing_effect<S: Scalar>(
    space: &StateSpace<S>,
    x: &[S],
    y: &[S],
) -> Result<Option<Effect<S>>> {
    for s in [x, y] {
        if s.len() != space.dimension() {
            return Err(Error::DimensionMismatch {
                expected: space.dimension(),
                found: s.len(),
            });
        }
    }
    let res = distinguishing_program(space, x, y).solve()?;
    Ok(match res.status {
        LpStatus::Feasible => res.witness.map(Effect),
        _ => None,
    })
}

/// Vertex-pair program: `u = Σ αₖ fₖ + Σ βₗ gₗ` with `α, β ≥ 0`, where the
/// `fₖ` are the facets tight at `vⱼ` and the `gₗ` those tight at `vᵢ`.
///
/// A feasible point gives the witness `e = Σ αₖ fₖ`: it vanishes at `vⱼ`,
/// and `u - e` vanishes at `vᵢ`. Conversely every witness decomposes this
/// way, since `e` and `u - e` lie in the effect cone.
#[derive(Clone, Debug, PartialEq)]
pub struct PairProgram<S> {
    pub lp: LinearProgram<S>,
    /// Facets multiplying the leading `α` variables.
    pub effect_columns: Vec<Vec<S>>,
}

impl<S: Scalar> PairProgram<S> {
    pub fn new(space: &StateSpace<S>, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::BadParameter(format!(
                "identical indices {i} and {j}"
            )));
        }
        let (vi, vj) = (space.vertex(i)?, space.vertex(j)?);
        let tight = |v: &[S]| -> Vec<Vec<S>> {
            space
                .facets()
                .iter()
                .filter(|h| dot(h, v).is_negligible())
                .cloned()
                .collect()
        };
        let effect_columns = tight(vj);
        let columns: Vec<Vec<S>> = effect_columns.iter().cloned().chain(tight(vi)).collect();
        let mut lp = LinearProgram::nonnegative(columns.len());
        for (r, u) in space.unit().iter().enumerate() {
            lp.constrain(
                columns.iter().map(|c| c[r].clone()).collect(),
                Relation::Eq,
                u.clone(),
            );
        }
        Ok(Self { lp, effect_columns })
    }

    /// The effect encoded by a feasible point.
    pub fn effect(&self, point: &[S]) -> Effect<S> {
        let d = self.lp.constraints.len();
        let mut e = vec![S::zero(); d];
        for (alpha, f) in point.iter().zip(&self.effect_columns) {
            for (x, y) in e.iter_mut().zip(f) {
                *x += alpha.clone() * y.clone();
            }
        }
        Effect(e)
    }
}

/// Single-pair query on vertices `i`, `j`.
pub fn pair_witness<S: Scalar>(
    space: &StateSpace<S>,
    i: usize,
    j: usize,
) -> Result<Option<Effect<S>>> {
    let program = PairProgram::new(space, i, j)?;
    let res = program.lp.solve()?;
    Ok(match (res.status, res.witness) {
        (LpStatus::Feasible, Some(x)) => Some(program.effect(&x)),
        _ => None,
    })
}

/// Every ordered pure pair that is perfectly distinguishable, sorted by `(i, j)`.
pub fn distinguishable_pairs<S: Scalar>(
    space: &StateSpace<S>,
) -> Result<Vec<DistinguishablePair<S>>> {
    let n = space.vertices().len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let found: Vec<Option<DistinguishablePair<S>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            pair_witness(space, i, j)
                .map(|w| w.map(|witness| DistinguishablePair { i, j, witness }))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Face generated by a distinguishable pair.
pub fn logical_bit<S: Scalar>(
    space: &StateSpace<S>,
    pair: &DistinguishablePair<S>,
) -> Result<Face> {
    if !pair.verify(space) {
        return Err(Error::NotDistinguishable(pair.i, pair.j));
    }
    face_generated_by(space, &[pair.i, pair.j])
}

/// Orbit structure of `group` on the given ordered distinguishable pairs.
pub fn bit_symmetry_verdict<S: Scalar>(
    space: &StateSpace<S>,
    group: &SymmetryGroup<S>,
    pairs: &[DistinguishablePair<S>],
) -> Result<BitSymmetryVerdict<S>> {
    let keys: Vec<(usize, usize)> = pairs.iter().map(|p| (p.i, p.j)).collect();
    let parts = orbits(group, &keys, |t, &(i, j)| (t.perm[i], t.perm[j]))?;
    let orbit_count = parts.len();
    Ok(BitSymmetryVerdict {
        is_bit_symmetric: orbit_count <= 1,
        orbit_count,
        orbit_representatives: parts.iter().map(|o| pairs[o[0]].clone()).collect(),
        orbits: parts
            .iter()
            .map(|o| o.iter().map(|&k| keys[k]).collect())
            .collect(),
        transitive_on_pure_states: is_transitive(group),
        degenerate: space.is_degenerate(),
    })
}

pub fn is_bit_symmetric<S: Scalar>(
    space: &StateSpace<S>,
    group: &SymmetryGroup<S>,
) -> Result<BitSymmetryVerdict<S>> {
    let pairs = distinguishable_pairs(space)?;
    bit_symmetry_verdict(space, group, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::lp::farkas_certifies;
    use crate::scalar::Rational;
    use crate::symmetry::automorphism_group;

    #[test]
    fn square_all_pairs_distinguishable() {
        let sq = catalog::square();
        let pairs = distinguishable_pairs(&sq).unwrap();
        assert_eq!(pairs.len(), 12);
        assert!(pairs.iter().all(|p| p.verify(&sq)));
    }

    #[test]
    fn pentagon_pairs_at_distance_two() {
        let p = catalog::ngon::<f64>(5).unwrap();
        let pairs = distinguishable_pairs(&p).unwrap();
        assert_eq!(pairs.len(), 10);
        for pair in &pairs {
            let dist = (pair.j + 5 - pair.i) % 5;
            assert!(dist == 2 || dist == 3, "{:?}", (pair.i, pair.j));
            assert!(pair.verify(&p));
        }
    }

    #[test]
    fn simplex_pairs() {
        let s = catalog::simplex::<Rational>(4).unwrap();
        assert_eq!(distinguishable_pairs(&s).unwrap().len(), 12);
    }

    #[test]
    fn logical_bits_of_square() {
        let sq = catalog::square();
        let pairs = distinguishable_pairs(&sq).unwrap();
        let adjacent = pairs.iter().find(|p| (p.i, p.j) == (0, 2)).unwrap();
        let diametral = pairs.iter().find(|p| (p.i, p.j) == (0, 1)).unwrap();
        assert_eq!(logical_bit(&sq, adjacent).unwrap().vertices, vec![0, 2]);
        assert_eq!(
            logical_bit(&sq, diametral).unwrap().vertices,
            vec![0, 1, 2, 3]
        );
        let fake = DistinguishablePair {
            i: 0,
            j: 2,
            witness: Effect(vec![Rational::int(0); 3]),
        };
        assert_eq!(
            logical_bit(&sq, &fake),
            Err(Error::NotDistinguishable(0, 2))
        );
    }

    #[test]
    fn verdicts() {
        let sq = catalog::square();
        let v = is_bit_symmetric(&sq, &automorphism_group(&sq).unwrap()).unwrap();
        assert!(!v.is_bit_symmetric);
        assert_eq!(v.orbit_count, 2);
        assert!(v.transitive_on_pure_states);

        let p = catalog::ngon::<f64>(5).unwrap();
        let v = is_bit_symmetric(&p, &automorphism_group(&p).unwrap()).unwrap();
        assert!(v.is_bit_symmetric);
        assert_eq!(v.orbit_count, 1);
    }

    #[test]
    fn single_point_is_vacuously_bit_symmetric() {
        let s = catalog::simplex::<Rational>(1).unwrap();
        let v = is_bit_symmetric(&s, &automorphism_group(&s).unwrap()).unwrap();
        assert!(v.is_bit_symmetric && v.degenerate);
        assert_eq!(v.orbit_count, 0);
    }

    #[test]
    fn pair_program_agrees_with_direct_program() {
        for space in [
            catalog::square(),
            catalog::simplex::<Rational>(4).unwrap(),
            catalog::cube(3).unwrap(),
        ] {
            let n = space.vertices().len();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (vi, vj) = (space.vertex(i).unwrap(), space.vertex(j).unwrap());
                    let direct = distinguishing_effect(&space, vi, vj).unwrap();
                    let program = PairProgram::new(&space, i, j).unwrap();
                    let res = program.lp.solve().unwrap();
                    assert_eq!(direct.is_some(), res.status == LpStatus::Feasible);
                    if res.status == LpStatus::Infeasible {
                        assert!(farkas_certifies(&program.lp, res.farkas.as_ref().unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn pair_query_errors() {
        let s = catalog::simplex::<Rational>(3).unwrap();
        assert!(matches!(
            pair_witness(&s, 0, 0),
            Err(Error::BadParameter(_))
        ));
        assert!(matches!(
            pair_witness(&s, 0, 9),
            Err(Error::IndexOutOfRange { .. })
        ));
        let p = catalog::ngon::<f64>(5).unwrap();
        assert!(pair_witness(&p, 0, 1).unwrap().is_none());
    }
}
