use gptlab::bits::{pair_witness, DistinguishablePair, PairProgram};
use gptlab::cone::{dual_cone, face_generated_by, ConeV};
use gptlab::lp::{farkas_certifies, maximize_over_polytope, LpStatus};
use gptlab::scalar::{dot, Rational, Scalar};
use gptlab::{Error, StateSpace};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::int(n)
}

fn cone_rays(dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    let ray = (prop::collection::vec(-4i64..=4, dim - 1), 1i64..=4).prop_map(|(mut v, last)| {
        v.push(last);
        v
    });
    prop::collection::vec(ray, dim..dim + 5)
}

fn any_cone() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (3usize..=5).prop_flat_map(|d| (Just(d), cone_rays(d)))
}

fn to_rational(rays: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rays.iter()
        .map(|r| r.iter().map(|&x| q(x)).collect())
        .collect()
}

fn build(dim: usize, rays: &[Vec<i64>]) -> Option<ConeV<Rational>> {
    match ConeV::new(dim, to_rational(rays)) {
        Ok(c) => Some(c),
        Err(Error::NotFullDimensional) => None,
        Err(e) => panic!("unexpected error {e}"),
    }
}

/// Convex polygon with the hull of the given lattice points as pure states.
fn polygon(points: &[(i64, i64)]) -> Option<StateSpace<Rational>> {
    let rays: Vec<Vec<i64>> = points.iter().map(|&(x, y)| vec![x, y, 1]).collect();
    let hull = build(3, &rays)?.irredundant().ok()?;
    let vertices: Vec<Vec<Rational>> = hull
        .rays()
        .iter()
        .map(|r| r.iter().map(|x| x.clone() / r[2].clone()).collect())
        .collect();
    StateSpace::new("polygon", vec![q(0), q(0), q(1)], vertices).ok()
}

fn lattice_points() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-5i64..=5, -5i64..=5), 3..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_ignores_order_and_scale((dim, rays) in any_cone(), scale in 1i64..=5) {
        let Some(cone) = build(dim, &rays) else { return Ok(()) };
        let mut shuffled = rays.clone();
        shuffled.reverse();
        shuffled[0] = shuffled[0].iter().map(|x| x * scale).collect();
        let other = build(dim, &shuffled).unwrap();
        let a = cone.irredundant().unwrap();
        prop_assert_eq!(&a, &other.irredundant().unwrap());
        prop_assert_eq!(&a, &a.irredundant().unwrap());
    }

    #[test]
    fn v_and_h_descriptions_agree((dim, rays) in any_cone(), points in prop::collection::vec(prop::collection::vec(-6i64..=6, 5), 6)) {
        let Some(cone) = build(dim, &rays) else { return Ok(()) };
        let h = cone.to_h().unwrap();
        prop_assert_eq!(&h.to_v().unwrap(), &cone.irredundant().unwrap());
        for p in &points {
            let x: Vec<Rational> = p[..dim].iter().map(|&v| q(v)).collect();
            let by_h = h.contains(&x).unwrap();
            let lp = cone.membership_program(&x).unwrap();
            let res = lp.solve().unwrap();
            prop_assert_eq!(by_h, res.status != LpStatus::Infeasible);
            if let Some(y) = &res.farkas {
                prop_assert!(farkas_certifies(&lp, y));
            }
        }
    }

    #[test]
    fn dual_reverses_containment((dim, rays) in any_cone()) {
        let Some(cone) = build(dim, &rays) else { return Ok(()) };
        let dual = dual_cone(&cone).unwrap();
        for f in dual.rays() {
            for r in cone.rays() {
                prop_assert!(dot(f, r) >= q(0));
            }
        }
        prop_assert_eq!(dual_cone(&dual).unwrap(), cone.irredundant().unwrap());
    }

    #[test]
    fn faces_grow_with_their_generators(points in lattice_points(), picks in prop::collection::vec(0usize..16, 1..4)) {
        let Some(space) = polygon(&points) else { return Ok(()) };
        let n = space.vertices().len();
        let small: Vec<usize> = picks.iter().map(|&p| p % n).collect();
        let mut large = small.clone();
        large.push((picks[0] + 1) % n);
        let f = face_generated_by(&space, &small).unwrap();
        let g = face_generated_by(&space, &large).unwrap();
        for &i in &small {
            prop_assert!(f.contains(i));
        }
        for i in 0..n {
            prop_assert!(!f.contains(i) || g.contains(i));
        }
    }

    #[test]
    fn pair_verdicts_carry_sound_certificates(points in lattice_points()) {
        let Some(space) = polygon(&points) else { return Ok(()) };
        let n = space.vertices().len();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                match pair_witness(&space, i, j).unwrap() {
                    Some(witness) => {
                        let pair = DistinguishablePair { i, j, witness };
                        prop_assert!(pair.verify(&space));
                    }
                    None => {
                        let program = PairProgram::new(&space, i, j).unwrap();
                        let res = program.lp.solve().unwrap();
                        prop_assert_eq!(res.status, LpStatus::Infeasible);
                        prop_assert!(farkas_certifies(&program.lp, res.farkas.as_ref().unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn linear_objectives_peak_at_vertices(points in lattice_points(), objective in prop::collection::vec(-9i64..=9, 3)) {
        let Some(space) = polygon(&points) else { return Ok(()) };
        let c: Vec<Rational> = objective.iter().map(|&x| q(x)).collect();
        let (best, at) = maximize_over_polytope(&c, &space).unwrap();
        let brute = space.vertices().iter().map(|v| dot(&c, v)).max().unwrap();
        prop_assert_eq!(&best, &brute);
        prop_assert_eq!(dot(&c, &space.vertices()[at]), brute);
    }
}
