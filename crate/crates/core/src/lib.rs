//! Extremal values of the iterated divisor function `d(d(n))`.
//!
//! * [`numerics`]: prime tables, factored integers, exponent signatures and
//!   fixed-point reals with error bounds.
//! * [`divisor`]: `d`, `ω`, `Ω` on factored representations.
//! * [`constant`]: the sharp constant `c = 2.79598166413...` with a
//!   certified error.
//! * [`mn`]: the smallest integer with a prescribed number of divisors.
//! * [`extremal`]: lower-bound constructions and exact branch-and-bound
//!   maxima of `ln d(n)`, `ln d(d(n))` and `ω(d(n))` over `n <= x`.
//! * [`lab`]: executable checks of the inequalities the asymptotics rest on.

pub mod constant;
pub mod divisor;
pub mod error;
pub mod extremal;
pub mod lab;
pub mod mn;
pub mod numerics;

pub use error::{Error, Result};
