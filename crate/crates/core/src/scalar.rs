//! Scalar backends.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. Two families
//! implement it: the exact backend ([`Rational`]) where comparisons are
//! decided without tolerance, and the float backends (`f64`, `f32`) where
//! every equality or sign test goes through one configured tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

/// Arbitrary precision rational number used by the exact backend.
pub type Rational = BigRational;

/// Default tolerance for float backends.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Smallest tolerance `f32` will accept; anything below is lost in rounding.
const F32_TOLERANCE_FLOOR: f64 = 1e-5;

static FLOAT_TOLERANCE: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Sets the process-wide tolerance used by float backends.
///
/// Panics if `eps` is not a positive finite number.
pub fn set_float_tolerance(eps: f64) {
    assert!(eps.is_finite() && eps > 0.0, "tolerance must be positive");
    FLOAT_TOLERANCE.store(eps.to_bits(), AtomicOrdering::Relaxed);
}

pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOLERANCE.load(AtomicOrdering::Relaxed))
}

/// Field element used by the cone, LP, symmetry and inner-product code.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + NumAssign
    + Signed
    + FromPrimitive
{
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Backend label used in files and reports.
    const ARITHMETIC: &'static str;

    /// Zero for exact backends.
    fn tolerance() -> Self;

    fn ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Rescales a ray by a positive factor into its canonical representative.
    ///
    /// Exact: primitive integer vector. Float: unit Euclidean norm with
    /// entries below tolerance snapped to zero. The sign of the ray is kept.
    fn canonicalize_ray(v: &mut [Self]);

    /// `(cos 2πk/n, sin 2πk/n)`, or `None` when not representable.
    fn turn(k: usize, n: usize) -> Option<(Self, Self)>;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self, String>;

    fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    fn is_negligible(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs() <= Self::tolerance()
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }

    /// Sign after snapping values within tolerance to zero.
    fn approx_sign(&self) -> Ordering {
        if self.is_negligible() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn approx_cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).approx_sign()
    }

    fn is_clearly_positive(&self) -> bool {
        self.approx_sign() == Ordering::Greater
    }

    fn is_clearly_negative(&self) -> bool {
        self.approx_sign() == Ordering::Less
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const ARITHMETIC: &'static str = "exact";

    fn tolerance() -> Self {
        Self::zero()
    }

    fn ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn canonicalize_ray(v: &mut [Self]) {
        if v.iter().all(Zero::is_zero) {
            return;
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        for (slot, n) in v.iter_mut().zip(ints) {
            *slot = BigRational::from_integer(n / &gcd);
        }
    }

    fn turn(k: usize, n: usize) -> Option<(Self, Self)> {
        // Rational on the unit circle at a rational turn only on the axes.
        if !(4 * k).is_multiple_of(n) {
            return None;
        }
        Some(match (4 * k / n) % 4 {
            0 => (Self::one(), Self::zero()),
            1 => (Self::zero(), Self::one()),
            2 => (-Self::one(), Self::zero()),
            _ => (Self::zero(), -Self::one()),
        })
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        let s = v
            .as_str()
            .ok_or_else(|| format!("expected a \"p/q\" string, found {v}"))?;
        parse_rational(s)
    }
}

/// Parses `"p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("bad denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

macro_rules! impl_float_scalar {
    ($t:ty, $floor:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            const ARITHMETIC: &'static str = "float";

            fn tolerance() -> Self {
                float_tolerance().max($floor) as $t
            }

            fn ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn canonicalize_ray(v: &mut [Self]) {
                let norm = v.iter().map(|x| x * x).sum::<$t>().sqrt();
                if norm <= Self::tolerance() {
                    return;
                }
                let eps = Self::tolerance();
                for x in v.iter_mut() {
                    *x /= norm;
                    if x.abs() <= eps {
                        *x = 0.0;
                    }
                }
            }

            fn turn(k: usize, n: usize) -> Option<(Self, Self)> {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
                let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
                Some((snap(theta.cos()) as $t, snap(theta.sin()) as $t))
            }

            fn to_json(&self) -> Value {
                serde_json::Number::from_f64(*self as f64)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }

            fn from_json(v: &Value) -> Result<Self, String> {
                v.as_f64()
                    .map(|x| x as $t)
                    .ok_or_else(|| format!("expected a number, found {v}"))
            }
        }
    };
}

impl_float_scalar!(f64, 0.0);
impl_float_scalar!(f32, F32_TOLERANCE_FLOOR);

/// Lexicographic comparison with entries compared under tolerance.
pub fn lex_cmp<S: Scalar>(a: &[S], b: &[S]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.approx_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn vec_approx_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Converts between backends through `f64`; exact targets get the binary
/// expansion of the float.
pub fn convert_vec<S: Scalar, T: Scalar>(v: &[S]) -> Vec<T> {
    v.iter()
        .map(|x| T::from_f64(x.to_f64()).expect("finite scalar"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn exact_ray_becomes_primitive_integer_vector() {
        let mut v = vec![q(1, 2), q(-3, 4), q(0, 1)];
        Rational::canonicalize_ray(&mut v);
        assert_eq!(v, vec![q(2, 1), q(-3, 1), q(0, 1)]);
        let mut w = vec![q(-6, 1), q(4, 1)];
        Rational::canonicalize_ray(&mut w);
        assert_eq!(w, vec![q(-3, 1), q(2, 1)], "sign must be preserved");
    }

    #[test]
    fn float_ray_has_unit_norm() {
        let mut v = vec![3.0f64, 4.0, 1e-12];
        f64::canonicalize_ray(&mut v);
        assert_eq!(v, vec![0.6, 0.8, 0.0]);
    }

    #[test]
    fn rational_turns_only_on_axes() {
        assert_eq!(Rational::turn(1, 4), Some((q(0, 1), q(1, 1))));
        assert_eq!(Rational::turn(3, 4), Some((q(0, 1), q(-1, 1))));
        assert!(Rational::turn(1, 5).is_none());
        assert!(Rational::turn(1, 3).is_none());
        assert_eq!(Rational::turn(0, 7), Some((q(1, 1), q(0, 1))));
    }

    #[test]
    fn json_scalars_follow_backend() {
        assert_eq!(q(-1, 2).to_json(), Value::String("-1/2".into()));
        assert_eq!(
            Rational::from_json(&Value::String("6/4".into())).unwrap(),
            q(3, 2)
        );
        assert!(Rational::from_json(&serde_json::json!(0.5)).is_err());
        assert!(Rational::from_json(&Value::String("1/0".into())).is_err());
        assert!(f64::from_json(&Value::String("1/2".into())).is_err());
        assert_eq!(f64::from_json(&serde_json::json!(0.25)).unwrap(), 0.25);
    }

    #[test]
    fn float_comparisons_use_tolerance() {
        assert!(1.0f64.approx_eq(&(1.0 + 1e-12)));
        assert!(!1.0f64.approx_eq(&(1.0 + 1e-6)));
        assert_eq!((-1e-12f64).approx_sign(), Ordering::Equal);
        assert!(!q(1, 1_000_000_000_000).is_negligible());
    }

    #[test]
    fn default_tolerance_bits() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_TOLERANCE);
    }
}
