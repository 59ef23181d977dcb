//! Condensation systems on the real line with exact rational arithmetic.
//!
//! A condensation system couples an outer iterated function system
//! `(f_i, p_i)` carrying a residual probability `p_0` with an inner system
//! `(g_j, t_j)` whose self-similar measure is re-inserted at every level.
//! The invariant pair is a compact set `K = C ∪ ⋃ f_i(K)` and a Borel
//! probability measure `μ = p_0 ν + Σ p_i μ∘f_i⁻¹`, where `ν` is the inner
//! self-similar measure with support `C`.
//!
//! The crate computes, for such systems:
//!
//! - exact cylinder masses and antichain decompositions of `K` ([`measure`]),
//! - the Moran-type quantization dimensions of both branches and their
//!   crossover radius ([`dims`]),
//! - stopping-time partitions of the word tree with exact threshold
//!   comparisons ([`partition`]),
//! - analytic upper/lower quantization-error bounds, separation certificates
//!   and energy bands for the induced piece families ([`bounds`]),
//! - an empirical optimal-quantizer estimator on Monte-Carlo samples
//!   ([`quantizer`]).
//!
//! Everything that can be exact is exact: probabilities, contraction ratios,
//! interval endpoints and masses are arbitrary-precision rationals, and
//! threshold comparisons at rational moment order are performed without
//! rounding. Floating point enters only where values are genuinely
//! transcendental (dimension solves, Monte-Carlo estimates).
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion `condq` crate.
//!
//! # Quick start
//!
//! ```
//! use condensation::dims::{quantization_dim, Branch};
//! use condensation::fixtures;
//! use condensation::system::Validated;
//!
//! // Validate a system (exact open-set-condition certificates) and solve
//! // both branch dimension equations at order r = 2.
//! let system = Validated::new(fixtures::demo_system()).unwrap();
//! let dims = quantization_dim(&system, 2.0, 1e-12).unwrap();
//! assert!((dims.inner_dim - 1.0 / 3.0).abs() < 1e-10);
//! assert_eq!(dims.branch, Branch::Outer);
//! assert_eq!(dims.dim, dims.outer_dim);
//! ```
//!
//! Exact quantities stay exact:
//!
//! ```
//! use condensation::measure::cylinder_mass;
//! use condensation::words::Word;
//! use condensation::{fixtures, ratio};
//!
//! let system = fixtures::demo_validated();
//! let outer = Word::new(2, &[1]).unwrap();
//! let inner = Word::new(2, &[2]).unwrap();
//! assert_eq!(cylinder_mass(&system, &outer, &inner).unwrap(), ratio(1, 18));
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod dims;
mod error;
pub mod fixtures;
pub mod measure;
pub mod partition;
pub mod quantizer;
pub mod rng;
mod rterm;
pub mod system;
pub mod words;

pub use error::{Error, Result};
pub use rterm::{Exponent, RTerm};

/// Arbitrary-precision rational scalar used for all exact quantities.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
