//! Acceptance criteria. One PASS/FAIL line per criterion; exits nonzero on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gptlab::bits::{distinguishable_pairs, is_bit_symmetric, logical_bit};
use gptlab::catalog::{self, default_catalog};
use gptlab::cone::{dual_cone, ConeV};
use gptlab::lp::{farkas_certifies, satisfies, LpStatus};
use gptlab::scalar::{Rational, Scalar};
use gptlab::selfdual::{check_statements, invariant_inner_product, verify_self_dual};
use gptlab::symmetry::automorphism_group;
use gptlab::tensor::{
    chsh_max, max_tensor, theorem2_check, theorem2_pair, ChshSetup, SpacePair, Theorem2Verdict,
    DEFAULT_BUDGET, DEFAULT_RAY_LIMIT, DEFAULT_VERTEX_LIMIT,
};
use gptlab::{with_space, StateSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn ngon_parity() -> Outcome {
    for n in 3..=11 {
        let space = catalog::make_ngon(n).map_err(|e| e.to_string())?;
        let (bits, dual) = with_space!(&space, s => {
            let g = automorphism_group(s).map_err(|e| e.to_string())?;
            let v = is_bit_symmetric(s, &g).map_err(|e| e.to_string())?;
            let f = invariant_inner_product(s, &g).map_err(|e| e.to_string())?;
            let d = verify_self_dual(s, &f).map_err(|e| e.to_string())?;
            (v.is_bit_symmetric, d.is_self_dual)
        });
        let odd = n % 2 == 1;
        ensure(bits == odd && dual == odd, || {
            format!("ngon:{n}: bitSymmetric {bits}, selfDual {dual}")
        })?;
    }
    Ok("n = 3..11: bit-symmetric and self-dual exactly for odd n".into())
}

fn square_structure() -> Outcome {
    let sq = catalog::square();
    let g = automorphism_group(&sq).map_err(|e| e.to_string())?;
    let v = is_bit_symmetric(&sq, &g).map_err(|e| e.to_string())?;
    ensure(v.orbit_count == 2, || format!("{} orbits", v.orbit_count))?;
    let pairs = distinguishable_pairs(&sq).map_err(|e| e.to_string())?;
    let find = |i, j| {
        pairs
            .iter()
            .find(|p| (p.i, p.j) == (i, j))
            .ok_or(format!("({i},{j}) missing"))
    };
    let edge = logical_bit(&sq, find(0, 2)?).map_err(|e| e.to_string())?;
    let full = logical_bit(&sq, find(0, 1)?).map_err(|e| e.to_string())?;
    ensure(edge.vertices == vec![0, 2], || {
        format!("adjacent bit {:?}", edge.vertices)
    })?;
    ensure(full.vertices == vec![0, 1, 2, 3], || {
        format!("diametral bit {:?}", full.vertices)
    })?;
    Ok("2 pair orbits; adjacent bit = edge, diametral bit = whole square".into())
}

/// Standard product of centered simplex vertices is already invariant, so
/// its normalized off-diagonal entry is `c`.
fn gram_oracle(n: usize) -> (Rational, Rational) {
    let nn = n as i64;
    let center = |i: usize| -> Vec<Rational> {
        (0..n)
            .map(|k| if k == i { q(nn - 1, nn) } else { q(-1, nn) })
            .collect()
    };
    let dot =
        |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Rational>();
    let (a, b) = (center(0), center(1));
    let c = dot(&a, &b) / dot(&a, &a);
    let lambda = -c.clone() / (q(1, 1) - c.clone());
    (c, lambda)
}

fn simplex_family() -> Outcome {
    for n in 2..=5usize {
        let s = catalog::simplex::<Rational>(n).map_err(|e| e.to_string())?;
        let g = automorphism_group(&s).map_err(|e| e.to_string())?;
        let factorial: u128 = (1..=n as u128).product();
        ensure(g.order() == factorial, || {
            format!("simplex:{n} order {}", g.order())
        })?;
        let v = is_bit_symmetric(&s, &g).map_err(|e| e.to_string())?;
        let f = invariant_inner_product(&s, &g).map_err(|e| e.to_string())?;
        let d = verify_self_dual(&s, &f).map_err(|e| e.to_string())?;
        ensure(v.is_bit_symmetric && d.is_self_dual, || {
            format!("simplex:{n} verdicts")
        })?;
        let (c, lambda) = gram_oracle(n);
        ensure(c == q(-1, n as i64 - 1) && lambda == q(1, n as i64), || {
            "oracle".into()
        })?;
        ensure(f.c == c && f.lambda == lambda, || {
            format!("simplex:{n}: c = {}, lambda = {}", f.c, f.lambda)
        })?;
    }
    Ok("n = 2..5: order n!, c = -1/(n-1), lambda = 1/n".into())
}

fn theorem1<S: Scalar>(s: &StateSpace<S>, statements_only: bool) -> Result<bool, String> {
    let g = automorphism_group(s).map_err(|e| e.to_string())?;
    let pairs = distinguishable_pairs(s).map_err(|e| e.to_string())?;
    let v = gptlab::bits::bit_symmetry_verdict(s, &g, &pairs).map_err(|e| e.to_string())?;
    if !v.is_bit_symmetric {
        return Ok(false);
    }
    let f = invariant_inner_product(s, &g).map_err(|e| format!("{}: {e}", s.name()))?;
    let r = check_statements(s, &g, &f, &pairs, true);
    if statements_only {
        ensure(
            r.c_negative
                && r.overlaps_in_range
                && r.overlap_c_distinguishable
                && r.distinguishable_overlap_c,
            || format!("{}: {:?}", s.name(), r.failures),
        )?;
    } else {
        let d = verify_self_dual(s, &f).map_err(|e| e.to_string())?;
        ensure(d.is_self_dual, || format!("{} is not self-dual", s.name()))?;
        ensure(
            r.invariant
                && r.unit_norm_on_pure
                && r.orthogonal_on_distinguishable
                && r.nonnegative_on_states,
            || format!("{}: {:?}", s.name(), r.failures),
        )?;
    }
    Ok(true)
}

fn catalog_meta(statements_only: bool) -> Outcome {
    let mut checked = Vec::new();
    for space in default_catalog() {
        if with_space!(&space, s => theorem1(s, statements_only))? {
            checked.push(space.name().to_string());
        }
    }
    Ok(format!(
        "{} bit-symmetric spaces: {}",
        checked.len(),
        checked.join(", ")
    ))
}

fn square_tensor() -> Outcome {
    let sq = catalog::square();
    let t = max_tensor(&sq, &sq, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let (n, p, e) = (
        t.composite.vertices().len(),
        t.product_count(),
        t.entangled_count(),
    );
    ensure((n, p, e) == (24, 16, 8), || {
        format!("{n} vertices, {p} product, {e} entangled")
    })?;
    let setup = ChshSetup::fiducial(&t).map_err(|e| e.to_string())?;
    let (best, k) = chsh_max(&t, &setup).map_err(|e| e.to_string())?;
    ensure(best == q(4, 1), || format!("CHSH max {best}"))?;
    ensure(best.to_f64() > 2.0 * 2f64.sqrt(), || {
        "no quantum violation".into()
    })?;
    ensure(!t.classes[k].is_product(), || {
        "maximum at a product vertex".into()
    })?;
    let r = theorem2_check(&t, 30).map_err(|e| e.to_string())?;
    ensure(
        r.composite_bit_symmetric == Some(false) && r.verdict == Theorem2Verdict::Consistent,
        || format!("{r:?}"),
    )?;
    Ok("24 vertices (16 product, 8 entangled), CHSH max 4, composite not bit-symmetric".into())
}

fn classical_composite() -> Outcome {
    let tri = catalog::simplex::<Rational>(3).map_err(|e| e.to_string())?;
    let t = max_tensor(&tri, &tri, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(
        t.composite.vertices().len() == 9 && t.entangled_count() == 0,
        || {
            format!(
                "{} vertices, {} entangled",
                t.composite.vertices().len(),
                t.entangled_count()
            )
        },
    )?;
    let r = theorem2_check(&t, 30).map_err(|e| e.to_string())?;
    ensure(r.composite_bit_symmetric == Some(true), || format!("{r:?}"))?;
    Ok("9 product vertices, bit-symmetric".into())
}

fn theorem2_meta() -> Outcome {
    let spaces = default_catalog();
    let (mut consistent, mut predicted, mut free) = (0, 0, 0);
    for (ia, a) in spaces.iter().enumerate() {
        for b in &spaces[ia..] {
            if a.dimension() * b.dimension() > DEFAULT_BUDGET {
                continue;
            }
            let report = match SpacePair::new(a, b).map_err(|e| e.to_string())? {
                SpacePair::Exact(x, y) => theorem2_pair(
                    &x,
                    &y,
                    DEFAULT_BUDGET,
                    DEFAULT_RAY_LIMIT,
                    DEFAULT_VERTEX_LIMIT,
                )
                .map(|r| r.verdict),
                SpacePair::Float(x, y) => theorem2_pair(
                    &x,
                    &y,
                    DEFAULT_BUDGET,
                    DEFAULT_RAY_LIMIT,
                    DEFAULT_VERTEX_LIMIT,
                )
                .map(|r| r.verdict),
            }
            .map_err(|e| format!("{} x {}: {e}", a.name(), b.name()))?;
            match report {
                Theorem2Verdict::Consistent => consistent += 1,
                Theorem2Verdict::Predicted => predicted += 1,
                Theorem2Verdict::NoConstraint => free += 1,
                Theorem2Verdict::Contradicted => {
                    return Err(format!(
                        "{} x {}: entangled yet bit-symmetric",
                        a.name(),
                        b.name()
                    ));
                }
                Theorem2Verdict::Unresolved => {
                    return Err(format!(
                        "{} x {}: no entangled vertex found within limits",
                        a.name(),
                        b.name()
                    ));
                }
            }
        }
    }
    Ok(format!(
        "{consistent} consistent, {predicted} predicted, {free} without entanglement, 0 contradicted"
    ))
}

fn random_cone(rng: &mut ChaCha8Rng, dim: usize) -> ConeV<Rational> {
    loop {
        let count = dim + rng.random_range(1..=dim + 2);
        let rays: Vec<Vec<Rational>> = (0..count)
            .map(|_| {
                let mut v: Vec<Rational> = (0..dim - 1)
                    .map(|_| Rational::int(rng.random_range(-5..=5)))
                    .collect();
                v.push(Rational::int(rng.random_range(1..=4)));
                v
            })
            .collect();
        if gptlab::linalg::rank_of(&rays) == dim {
            return ConeV::new(dim, rays).expect("valid generators");
        }
    }
}

fn kernel_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_241_016);
    let mut programs = 0;
    for k in 0..20 {
        let dim = 3 + k % 4;
        let cone = random_cone(&mut rng, dim);
        let irr = cone.irredundant().map_err(|e| e.to_string())?;
        let back = irr
            .to_h()
            .and_then(|h| h.to_v())
            .map_err(|e| e.to_string())?;
        ensure(back == irr, || {
            format!("cone {k}: V -> H -> V changed the rays")
        })?;
        let h = irr.to_h().map_err(|e| e.to_string())?;
        let h2 = h.to_v().and_then(|v| v.to_h()).map_err(|e| e.to_string())?;
        ensure(h2 == h, || {
            format!("cone {k}: H -> V -> H changed the inequalities")
        })?;
        let dd =
            dual_cone(&dual_cone(&cone).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(dd == irr, || format!("cone {k}: dual of dual differs"))?;
        for _ in 0..5 {
            let x: Vec<Rational> = (0..dim)
                .map(|_| Rational::int(rng.random_range(-6..=6)))
                .collect();
            let lp = cone.membership_program(&x).map_err(|e| e.to_string())?;
            let res = lp.solve().map_err(|e| e.to_string())?;
            programs += 1;
            match res.status {
                LpStatus::Feasible => {
                    let w = res.witness.ok_or("missing witness")?;
                    ensure(satisfies(&lp, &w), || format!("cone {k}: witness fails"))?;
                    ensure(h.contains(&x).unwrap_or(false), || {
                        format!("cone {k}: LP and H disagree")
                    })?;
                }
                LpStatus::Infeasible => {
                    let y = res.farkas.ok_or("missing certificate")?;
                    ensure(farkas_certifies(&lp, &y), || {
                        format!("cone {k}: Farkas fails")
                    })?;
                    ensure(!h.contains(&x).unwrap_or(true), || {
                        format!("cone {k}: LP and H disagree")
                    })?;
                }
                other => return Err(format!("cone {k}: status {other:?}")),
            }
        }
    }
    Ok(format!(
        "20 cones in dims 3..6; {programs} LP certificates verified"
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "n-gon parity law",
            limit: Duration::from_secs(30),
            run: ngon_parity,
        },
        Criterion {
            id: 2,
            name: "square structure",
            limit: Duration::from_secs(1),
            run: square_structure,
        },
        Criterion {
            id: 3,
            name: "simplex family",
            limit: Duration::from_secs(10),
            run: simplex_family,
        },
        Criterion {
            id: 4,
            name: "bit symmetry implies self-duality",
            limit: Duration::from_secs(60),
            run: || catalog_meta(false),
        },
        Criterion {
            id: 5,
            name: "overlap statements",
            limit: Duration::from_secs(60),
            run: || catalog_meta(true),
        },
        Criterion {
            id: 6,
            name: "square x square non-locality",
            limit: Duration::from_secs(120),
            run: square_tensor,
        },
        Criterion {
            id: 7,
            name: "classical composite",
            limit: Duration::from_secs(30),
            run: classical_composite,
        },
        Criterion {
            id: 8,
            name: "entanglement excludes bit symmetry",
            limit: Duration::from_secs(600),
            run: theorem2_meta,
        },
        Criterion {
            id: 9,
            name: "kernel soundness",
            limit: Duration::from_secs(60),
            run: kernel_soundness,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= c.limit => format!("PASS [{}] {}: {detail}", c.id, c.name),
            Ok(detail) => format!("FAIL [{}] {}: {detail}; over time limit", c.id, c.name),
            Err(why) => format!("FAIL [{}] {}: {why}", c.id, c.name),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!(
            "{verdict} ({:.2}s, limit {}s)",
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
