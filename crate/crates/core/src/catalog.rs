//! Built-in state spaces and the `square | ngon:N | simplex:N | cube:N | path`
//! spec grammar.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::space::{SpaceMeta, StateSpace};

/// A state space in whichever backend its coordinates require.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySpace {
    Exact(StateSpace<Rational>),
    Float(StateSpace<f64>),
}

/// Runs `$body` with `$s` bound to the inner `StateSpace<_>`.
#[macro_export]
macro_rules! with_space {
    ($any:expr, $s:ident => $body:expr) => {
        match $any {
            $crate::catalog::AnySpace::Exact($s) => $body,
            $crate::catalog::AnySpace::Float($s) => $body,
        }
    };
}

impl AnySpace {
    pub fn name(&self) -> &str {
        with_space!(self, s => s.name())
    }

    pub fn dimension(&self) -> usize {
        with_space!(self, s => s.dimension())
    }

    pub fn vertex_count(&self) -> usize {
        with_space!(self, s => s.vertices().len())
    }

    pub fn arithmetic(&self) -> &'static str {
        with_space!(self, s => s.arithmetic())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnySpace::Exact(_))
    }

    pub fn to_float(&self) -> Result<StateSpace<f64>> {
        match self {
            AnySpace::Exact(s) => s.convert(),
            AnySpace::Float(s) => Ok(s.clone()),
        }
    }
}

impl From<StateSpace<Rational>> for AnySpace {
    fn from(s: StateSpace<Rational>) -> Self {
        AnySpace::Exact(s)
    }
}

impl From<StateSpace<f64>> for AnySpace {
    fn from(s: StateSpace<f64>) -> Self {
        AnySpace::Float(s)
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// The square `{(x₁, x₂, 1) : -1 ≤ x₁, x₂ ≤ 1}` with unit `u(x) = x₃`.
///
/// Vertex order: `(1,1,1), (-1,-1,1), (1,-1,1), (-1,1,1)`, so 0 and 1 are
/// diametral and 0, 2 adjacent.
pub fn square() -> StateSpace<Rational> {
    let v = |a: i64, b: i64| vec![q(a, 1), q(b, 1), q(1, 1)];
    let half = q(1, 2);
    let zero = q(0, 1);
    StateSpace::new(
        "square",
        vec![zero.clone(), zero.clone(), q(1, 1)],
        vec![v(1, 1), v(-1, -1), v(1, -1), v(-1, 1)],
    )
    .expect("square is valid")
    .with_meta(SpaceMeta {
        fiducial: Some([
            vec![half.clone(), zero.clone(), half.clone()],
            vec![zero, half.clone(), half],
        ]),
        coordinate_map: None,
    })
}

/// Regular `n`-gon with vertices `(cos 2πk/n, sin 2πk/n, 1)` and unit `x₃`.
///
/// Fails with `BadParameter` when a vertex is not representable in `S`.
pub fn ngon<S: Scalar>(n: usize) -> Result<StateSpace<S>> {
    if n < 3 {
        return Err(Error::BadParameter(format!("ngon needs n >= 3, got {n}")));
    }
    let mut vertices = Vec::with_capacity(n);
    for k in 0..n {
        let (c, s) = S::turn(k, n).ok_or_else(|| {
            Error::BadParameter(format!(
                "ngon:{n} has coordinates outside the {} backend",
                S::ARITHMETIC
            ))
        })?;
        vertices.push(vec![c, s, S::one()]);
    }
    let space = StateSpace::new(
        format!("ngon:{n}"),
        vec![S::zero(), S::zero(), S::one()],
        vertices,
    )?;
    let coordinate_map = (n == 4).then(|| {
        // (x, y, z) ↦ (x - y, x + y, z) carries ngon:4 onto the square.
        let m = |v: i64| S::int(v);
        (
            "square".to_string(),
            Matrix::from_rows(&[
                vec![m(1), m(-1), m(0)],
                vec![m(1), m(1), m(0)],
                vec![m(0), m(0), m(1)],
            ]),
        )
    });
    Ok(space.with_meta(SpaceMeta {
        fiducial: None,
        coordinate_map,
    }))
}

/// Regular polygon in the exact backend when its coordinates are rational
/// (only `n = 4`), otherwise in `f64`.
pub fn make_ngon(n: usize) -> Result<AnySpace> {
    match ngon::<Rational>(n) {
        Ok(s) => Ok(AnySpace::Exact(s)),
        Err(Error::BadParameter(_)) if n >= 3 => Ok(AnySpace::Float(ngon::<f64>(n)?)),
        Err(e) => Err(e),
    }
}

/// Classical `n`-outcome system: probability vectors, unit `Σ xᵢ`.
pub fn simplex<S: Scalar>(n: usize) -> Result<StateSpace<S>> {
    if n < 1 {
        return Err(Error::BadParameter("simplex needs n >= 1".into()));
    }
    let vertices = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        })
        .collect();
    let mut fiducial = None;
    if n >= 2 {
        let indicator = |i: usize| {
            (0..n)
                .map(|j| if i == j { S::one() } else { S::zero() })
                .collect()
        };
        fiducial = Some([indicator(0), indicator(1)]);
    }
    Ok(
        StateSpace::new(format!("simplex:{n}"), vec![S::one(); n], vertices)?.with_meta(
            SpaceMeta {
                fiducial,
                coordinate_map: None,
            },
        ),
    )
}

/// Hypercube `[-1, 1]^n` in the slice `x_{n+1} = 1`.
pub fn cube<S: Scalar>(n: usize) -> Result<StateSpace<S>> {
    if n < 1 {
        return Err(Error::BadParameter("cube needs n >= 1".into()));
    }
    if n > 10 {
        return Err(Error::BadParameter(format!("cube:{n} is too large")));
    }
    let d = n + 1;
    let vertices = (0..1usize << n)
        .map(|mask| {
            let mut v: Vec<S> = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 0 {
                        S::one()
                    } else {
                        -S::one()
                    }
                })
                .collect();
            v.push(S::one());
            v
        })
        .collect();
    let mut unit = vec![S::zero(); d];
    unit[n] = S::one();
    let half = S::ratio(1, 2);
    let measurement = |i: usize| {
        let mut e = vec![S::zero(); d];
        e[i] = half.clone();
        e[n] = half.clone();
        e
    };
    let fiducial = (n >= 2).then(|| [measurement(0), measurement(1)]);
    Ok(
        StateSpace::new(format!("cube:{n}"), unit, vertices)?.with_meta(SpaceMeta {
            fiducial,
            coordinate_map: None,
        }),
    )
}

fn parse_size(spec: &str, arg: &str) -> Result<usize> {
    arg.parse()
        .map_err(|_| Error::BadParameter(format!("bad size in {spec:?}")))
}

/// Resolves a catalog spec, falling back to a state-space file path.
pub fn resolve(spec: &str) -> Result<AnySpace> {
    if spec == "square" {
        return Ok(AnySpace::Exact(square()));
    }
    if let Some((family, arg)) = spec.split_once(':') {
        match family {
            "ngon" => return make_ngon(parse_size(spec, arg)?),
            "simplex" => return Ok(AnySpace::Exact(simplex(parse_size(spec, arg)?)?)),
            "cube" => return Ok(AnySpace::Exact(cube(parse_size(spec, arg)?)?)),
            _ => {}
        }
    }
    let path = Path::new(spec);
    if path.exists() {
        return io::load(path);
    }
    Err(Error::BadParameter(format!(
        "{spec:?} is neither a catalog entry nor an existing file"
    )))
}

/// One line per catalog family.
pub fn entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("square", "the square [-1,1]^2 in the slice x3 = 1 (exact)"),
        (
            "ngon:N",
            "regular N-gon, N >= 3 (exact for N = 4, float otherwise)",
        ),
        ("simplex:N", "classical N-outcome system, N >= 1 (exact)"),
        (
            "cube:N",
            "hypercube [-1,1]^N in the slice x_{N+1} = 1 (exact)",
        ),
        ("<path>", "state-space file (JSON)"),
    ]
}

/// Spaces covered by the catalog-wide checks.
pub fn default_catalog() -> Vec<AnySpace> {
    let mut out: Vec<AnySpace> = (3..=11).map(|n| make_ngon(n).expect("ngon")).collect();
    out.extend((2..=5).map(|n| AnySpace::Exact(simplex(n).expect("simplex"))));
    out.push(AnySpace::Exact(square()));
    out.push(AnySpace::Exact(cube(3).expect("cube")));
    out
}
