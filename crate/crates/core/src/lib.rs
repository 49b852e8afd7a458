//! Exact construction of Dirichlet-improvable, non-singular Liouville
//! vectors inside Cartesian powers of two-map rational IFS attractors, plus
//! the certified machinery that checks their approximation properties at
//! desk scale.
//!
//! The IFS layer is generic over a [`Scalar`]; exact work uses
//! [`Rational`], quick previews may use `f64`. Everything that certifies a
//! claim runs on [`Rational`].

pub mod arith;
pub mod construction;
pub mod ifs;
pub mod scalar;
pub mod verification;

pub use scalar::Scalar;

/// The universal exact scalar: a reduced arbitrary-precision fraction.
pub type Rational = num_rational::BigRational;

/// Exact two-map IFS.
pub type Ifs = ifs::IfsPair<Rational>;
/// Floating-point IFS, for previews and cross-checks.
pub type IfsF64 = ifs::IfsPair<f64>;
/// Single-precision IFS.
pub type IfsF32 = ifs::IfsPair<f32>;
/// Exact affine contraction.
pub type Map = ifs::AffineMap<Rational>;
/// Certified rational interval.
pub type Enclosure = ifs::Enclosure<Rational>;
