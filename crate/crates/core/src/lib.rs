//! Exact computations on general probabilistic theories with polytopal
//! state spaces.
//!
//! The crate decides bit symmetry and self-duality of a state space, builds
//! the invariant inner product that identifies states with effects, and
//! constructs maximal tensor products to count entangled extreme points and
//! evaluate CHSH values.
//!
//! All algorithms are generic over [`Scalar`]: [`Rational`] for exact
//! arithmetic, `f64`/`f32` for spaces with irrational coordinates (most
//! regular polygons).

pub mod bits;
pub mod catalog;
pub mod cone;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod report;
pub mod scalar;
pub mod selfdual;
pub mod space;
pub mod symmetry;
pub mod tensor;

pub use catalog::AnySpace;
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
pub use space::{Effect, StateSpace};

pub type ExactSpace = StateSpace<Rational>;
pub type FloatSpace = StateSpace<f64>;
pub type ExactCone = cone::ConeV<Rational>;
pub type FloatCone = cone::ConeV<f64>;
pub type ExactGroup = symmetry::SymmetryGroup<Rational>;
pub type FloatGroup = symmetry::SymmetryGroup<f64>;
pub type ExactMatrix = linalg::Matrix<Rational>;
