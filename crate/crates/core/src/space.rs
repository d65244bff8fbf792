//! Polytopal state spaces and effects.

use crate::cone::{ConeV, Face};
use crate::error::{Error, Result};
use crate::linalg::{rank_of, Matrix};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::scalar::{convert_vec, dot, lex_cmp, Scalar};

/// Normalized states `Ω` given by their pure states, together with the unit.
///
/// Immutable once built; [`StateSpace::new`] checks every invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace<S> {
    name: String,
    vertices: Vec<Vec<S>>,
    unit: Vec<S>,
    facets: Vec<Vec<S>>,
    meta: SpaceMeta<S>,
}

/// Catalog annotations that are not part of the file format.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceMeta<S> {
    /// Two binary measurements used as the default CHSH setup.
    pub fiducial: Option<[Vec<S>; 2]>,
    /// Linear map from these coordinates to another catalog entry's.
    pub coordinate_map: Option<(String, Matrix<S>)>,
}

impl<S> Default for SpaceMeta<S> {
    fn default() -> Self {
        Self {
            fiducial: None,
            coordinate_map: None,
        }
    }
}

/// Linear functional on the state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect<S>(pub Vec<S>);

impl<S: Scalar> Effect<S> {
    pub fn eval(&self, x: &[S]) -> S {
        dot(&self.0, x)
    }

    /// Nonnegative on every state.
    pub fn is_effect(&self, space: &StateSpace<S>) -> bool {
        space
            .vertices
            .iter()
            .all(|v| !self.eval(v).is_clearly_negative())
    }

    /// Valued in `[0, 1]` on every state.
    pub fn is_proper(&self, space: &StateSpace<S>) -> bool {
        self.0.len() == space.dimension()
            && space.vertices.iter().all(|v| {
                let e = self.eval(v);
                !e.is_clearly_negative() && !e.approx_cmp(&S::one()).is_gt()
            })
    }

    /// `u - e`.
    pub fn complement(&self, space: &StateSpace<S>) -> Self {
        Effect(
            space
                .unit
                .iter()
                .zip(&self.0)
                .map(|(u, e)| u.clone() - e.clone())
                .collect(),
        )
    }
}

impl<S: Scalar> StateSpace<S> {
    pub fn new(name: impl Into<String>, unit: Vec<S>, vertices: Vec<Vec<S>>) -> Result<Self> {
        let name = name.into();
        let d = unit.len();
        if d == 0 {
            return Err(Error::validation(
                "dimension",
                "ambient dimension must be positive",
            ));
        }
        if vertices.is_empty() {
            return Err(Error::validation(
                "vertices",
                "at least one vertex is required",
            ));
        }
        if let Some((i, v)) = vertices.iter().enumerate().find(|(_, v)| v.len() != d) {
            return Err(Error::validation(
                "dimension",
                format!("vertex {i} has {} coordinates, expected {d}", v.len()),
            ));
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !dot(&unit, v).approx_eq(&S::one()))
        {
            return Err(Error::validation("unit", format!("u(v{i}) != 1")));
        }
        let rank = rank_of(&vertices);
        if rank < d {
            return Err(Error::validation(
                "spanning",
                format!("vertices span a {rank}-dimensional subspace of a {d}-dimensional space"),
            ));
        }
        for i in 0..vertices.len() {
            for j in 0..i {
                if lex_cmp(&vertices[i], &vertices[j]).is_eq() {
                    return Err(Error::validation(
                        "extremality",
                        format!("vertices {j} and {i} coincide"),
                    ));
                }
            }
        }
        let cone = ConeV::new(d, vertices.clone())?;
        let facets = cone
            .to_h()
            .map_err(|e| Error::validation("cone", e.to_string()))?;
        let facets = facets.inequalities().to_vec();
        for (i, v) in vertices.iter().enumerate() {
            let tight: Vec<Vec<S>> = facets
                .iter()
                .filter(|h| dot(h, v).is_negligible())
                .cloned()
                .collect();
            if rank_of(&tight) + 1 < d {
                return Err(Error::validation(
                    "extremality",
                    format!("vertex {i} is not an extreme point"),
                ));
            }
        }
        Ok(Self {
            name,
            vertices,
            unit,
            facets,
            meta: SpaceMeta::default(),
        })
    }

    /// Skips validation. The caller guarantees that `facets` is the
    /// canonical irredundant H-representation of the cone over `vertices`.
    pub(crate) fn from_trusted(
        name: impl Into<String>,
        unit: Vec<S>,
        vertices: Vec<Vec<S>>,
        mut facets: Vec<Vec<S>>,
    ) -> Self {
        for f in &mut facets {
            S::canonicalize_ray(f);
        }
        facets.sort_by(|a, b| lex_cmp(a, b));
        facets.dedup_by(|a, b| lex_cmp(a, b).is_eq());
        Self {
            name: name.into(),
            vertices,
            unit,
            facets,
            meta: SpaceMeta::default(),
        }
    }

    pub fn with_meta(mut self, meta: SpaceMeta<S>) -> Self {
        self.meta = meta;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.unit.len()
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Result<&[S]> {
        self.vertices
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.vertices.len(),
            })
    }

    pub fn unit(&self) -> &[S] {
        &self.unit
    }

    /// Extremal rays of the effect cone, which are also the facet
    /// inequalities of the state cone.
    pub fn facets(&self) -> &[Vec<S>] {
        &self.facets
    }

    pub fn meta(&self) -> &SpaceMeta<S> {
        &self.meta
    }

    pub fn arithmetic(&self) -> &'static str {
        S::ARITHMETIC
    }

    /// Fewer than two pure states: no pair can be distinguished.
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn state_cone(&self) -> ConeV<S> {
        ConeV::new(self.dimension(), self.vertices.clone()).expect("validated vertices")
    }

    pub fn effect_cone(&self) -> ConeV<S> {
        ConeV::new(self.dimension(), self.facets.clone()).expect("validated facets")
    }

    pub fn contains_state(&self, x: &[S]) -> bool {
        x.len() == self.dimension()
            && dot(&self.unit, x).approx_eq(&S::one())
            && self.facets.iter().all(|h| !dot(h, x).is_clearly_negative())
    }

    /// Exactly one vertex equal to `x`, if any.
    pub fn find_vertex(&self, x: &[S]) -> Option<usize> {
        self.vertices.iter().position(|v| lex_cmp(v, x).is_eq())
    }

    /// LP separation test: vertex `k` is not a convex combination of the others.
    pub fn is_extreme_by_lp(&self, k: usize) -> Result<bool> {
        let target = self.vertex(k)?.to_vec();
        let others: Vec<&Vec<S>> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, v)| v)
            .collect();
        if others.is_empty() {
            return Ok(true);
        }
        let mut lp = LinearProgram::feasibility(others.len());
        for j in 0..self.dimension() {
            lp.constrain(
                others.iter().map(|v| v[j].clone()).collect(),
                Relation::Eq,
                target[j].clone(),
            );
        }
        for i in 0..others.len() {
            let mut row = vec![S::zero(); others.len()];
            row[i] = S::one();
            lp.constrain(row, Relation::Ge, S::zero());
        }
        Ok(lp.solve()?.status == LpStatus::Infeasible)
    }

    /// Two binary measurements for CHSH: catalog metadata when present,
    /// otherwise the first two effect rays scaled to a maximum of one.
    pub fn fiducial_measurements(&self) -> Result<[Effect<S>; 2]> {
        if let Some([a, b]) = &self.meta.fiducial {
            return Ok([Effect(a.clone()), Effect(b.clone())]);
        }
        if self.facets.len() < 2 {
            return Err(Error::Degenerate(format!(
                "{} has fewer than two effect rays",
                self.name
            )));
        }
        let scaled = |h: &Vec<S>| {
            let max = self
                .vertices
                .iter()
                .map(|v| dot(h, v))
                .fold(S::zero(), |m, x| if x > m { x } else { m });
            Effect(h.iter().map(|x| x.clone() / max.clone()).collect())
        };
        Ok([scaled(&self.facets[0]), scaled(&self.facets[1])])
    }

    pub fn logical_face(&self, indices: &[usize]) -> Result<Face> {
        crate::cone::face_generated_by(self, indices)
    }

    /// Same space in another backend (through `f64`).
    pub fn convert<T: Scalar>(&self) -> Result<StateSpace<T>> {
        let vertices = self.vertices.iter().map(|v| convert_vec(v)).collect();
        let meta = SpaceMeta {
            fiducial: self
                .meta
                .fiducial
                .as_ref()
                .map(|[a, b]| [convert_vec(a), convert_vec(b)]),
            coordinate_map: None,
        };
        Ok(StateSpace::new(self.name.clone(), convert_vec(&self.unit), vertices)?.with_meta(meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::Rational;

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::int(x)).collect()
    }

    #[test]
    fn unit_violation_is_reported() {
        let err = StateSpace::new(
            "bad",
            qs(&[0, 0, 1]),
            vec![
                qs(&[1, 1, 1]),
                qs(&[-1, -1, 1]),
                qs(&[1, -1, 2]),
                qs(&[-1, 1, 1]),
            ],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Validation {
                invariant: "unit",
                ..
            }
        ));
    }

    #[test]
    fn interior_point_is_reported() {
        let err = StateSpace::new(
            "bad",
            qs(&[0, 0, 1]),
            vec![
                qs(&[1, 1, 1]),
                qs(&[-1, -1, 1]),
                qs(&[1, -1, 1]),
                qs(&[-1, 1, 1]),
                qs(&[0, 0, 1]),
            ],
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Validation {
                invariant: "extremality",
                ..
            }
        ));
    }

    #[test]
    fn collinear_points_do_not_span() {
        let err = StateSpace::new("bad", qs(&[0, 0, 1]), vec![qs(&[1, 0, 1]), qs(&[-1, 0, 1])])
            .unwrap_err();
        assert!(matches!(
            err,
            Error::Validation {
                invariant: "spanning",
                ..
            }
        ));
    }

    #[test]
    fn square_effect_cone() {
        let sq = catalog::square();
        let ec = sq.effect_cone();
        let expected = ConeV::new(
            3,
            vec![
                qs(&[1, 0, 1]),
                qs(&[-1, 0, 1]),
                qs(&[0, 1, 1]),
                qs(&[0, -1, 1]),
            ],
        )
        .unwrap();
        assert_eq!(ec, expected);
        // E_ω(x) = x₁+x₂+x₃ evaluates to -1 on φ.
        let e_omega = Effect(qs(&[1, 1, 1]));
        assert_eq!(e_omega.eval(sq.vertex(1).unwrap()), Rational::int(-1));
        assert!(!e_omega.is_effect(&sq));
        assert!(!ec.contains(&e_omega.0).unwrap());
        assert!(ec.contains(sq.unit()).unwrap());
    }

    #[test]
    fn simplex_effect_cone_is_indicator_rays() {
        let s = catalog::simplex::<Rational>(3).unwrap();
        let ec = s.effect_cone();
        assert_eq!(ec.rays(), &[qs(&[0, 0, 1]), qs(&[0, 1, 0]), qs(&[1, 0, 0])]);
    }

    #[test]
    fn extremality_by_lp() {
        let sq = catalog::square();
        for k in 0..4 {
            assert!(sq.is_extreme_by_lp(k).unwrap());
        }
    }

    #[test]
    fn default_fiducials_are_proper() {
        let p = catalog::ngon::<f64>(5).unwrap();
        for e in p.fiducial_measurements().unwrap() {
            assert!(e.is_proper(&p));
        }
    }
}
