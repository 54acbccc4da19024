//! Workbench for refuting random polynomial systems.
//!
//! Given `m` polynomial equations `g_i(x) = b_i` of degree `D` in `n` real
//! variables with random coefficients, this crate implements:
//!
//! * exact Nullstellensatz refutations `-1 = Σ a_i (g_i - b_i)` found by
//!   solving the degree-`d` linearization over the rationals ([`refuter`]),
//! * the degree-2 SDP feasibility test `{X ⪰ 0, tr(G_i X) = b_i}` with
//!   primal/dual certificates and an empirical phase-transition sweep
//!   ([`sos2`]),
//! * closed-form truncated low-degree likelihood-ratio norms for the
//!   planted-vs-null distinguishing problem, plus Monte-Carlo oracles and a
//!   spectral distinguisher ([`lowdeg`]),
//! * the pseudo-calibrated degree-4 moment matrix for homogeneous quadratic
//!   systems, with constraint repair and spectrum reports ([`pseudocal`]).
//!
//! Core polynomial algebra is generic over the scalar type via `num-traits`;
//! the exact paths instantiate it with [`Rat`] and the numerical paths with
//! `f64`.

pub mod distributions;
pub mod error;
pub mod exact;
pub mod hermite;
pub mod lowdeg;
pub mod multiset;
pub mod poly;
pub mod pseudocal;
pub mod refuter;
pub mod scalar;
pub mod seeding;
pub mod sos2;
pub mod tensor;

pub use error::CoreError;
pub use multiset::{count_multisets, enumerate_multisets, MultisetIndex};
pub use poly::{HomogeneousPolynomial, Polynomial};
pub use scalar::Scalar;
pub use tensor::CoefficientTensor;

/// Arbitrary-precision rational scalar used by every exact code path.
pub type Rat = num_rational::BigRational;

/// Homogeneous polynomial with exact rational coefficients.
pub type RatPoly = HomogeneousPolynomial<Rat>;

/// Homogeneous polynomial with double-precision coefficients.
pub type FloatPoly = HomogeneousPolynomial<f64>;

/// Coefficient tensor with exact rational entries.
pub type RatTensor = CoefficientTensor<Rat>;

/// Coefficient tensor with double-precision entries.
pub type FloatTensor = CoefficientTensor<f64>;
