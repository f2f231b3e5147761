//! Exact counting of divisibility-constrained permutations.
//!
//! A permutation `π` of `[1, n]` with `j | π(j)` or `π(j) | j` for every `j`
//! is a vertex-disjoint directed cycle cover of the divisor graph on
//! `1..=n` (every vertex carries a self-loop), so counting them is a 0/1
//! permanent. The same holds for the lcm rule `lcm(j, π(j)) ≤ n`.
//!
//! The crate is layered bottom-up:
//!
//! * [`arith`]: divisors, totients, smoothness, `lcm(1..i)` exponent vectors,
//!   the multiplicative density `α`.
//! * [`graph`]: loop-carrying divisor / lcm graphs and their components.
//! * [`permanent`]: brute-force, Ryser and sparse branching permanent engines.
//! * [`counts`]: `#S_div`, `#S_lcm`, the vertex ratio `R(G, v)`, the cycle
//!   decomposition at a vertex and the complete-bipartite closed form.
//! * [`bounds`]: the upper and lower bound pipelines for the growth constants.
//!
//! Exact quantities use arbitrary precision throughout; floating point enters
//! only at the final `log`/`exp` of the bound pipelines, and that code is
//! generic over [`num_traits::Float`].

pub mod arith;
pub mod bounds;
pub mod counts;
mod error;
pub mod graph;
pub mod numeric;
pub mod permanent;

pub use error::{Error, Result};

/// Exact nonnegative count of cycle covers.
pub type BigCount = num_bigint::BigUint;

/// Exact rational in lowest terms with positive denominator.
pub type ExactRatio = num_rational::BigRational;

/// Binary64 scalar used by the reported bounds.
pub type Real = f64;

/// Directed accumulator over [`Real`].
pub type RealSum = numeric::DirectedSum<Real>;

pub use arith::FactoredInt;
pub use bounds::{BoundReport, Direction, FCache, Target};

pub use graph::{GraphRule, LoopGraph, RuleKind};
pub use permanent::{Engine, Matrix};
