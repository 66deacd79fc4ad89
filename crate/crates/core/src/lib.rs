//! Exact combinatorics of CPWL functions compatible with the braid fan.
//!
//! Functions on `R^d` that are affine on every cone of the braid fan are in
//! bijection with set functions on the Boolean lattice `2^[d]`. This crate
//! works entirely on the set-function side, in exact rational arithmetic:
//!
//! - [`lattice`]: subsets, intervals, chains and interval decompositions;
//! - [`setfn`]: set functions, alternating sums, the level spaces `Sf(k)`,
//!   sign supports, `HC`, conforming tuples;
//! - [`transform`]: the isomorphism with `c + Σ λ_M σ_M`, evaluation, and the
//!   change between the braid fan and its pinned variant;
//! - [`network`]: conforming maxout layers, max-network synthesis, depth
//!   bounds and non-representability certificates;
//! - [`verify`]: executable checks of the structural results at small scale.

pub mod error;
pub mod lattice;
pub mod linalg;
pub mod network;
pub mod rational;
pub mod setfn;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{Interval, Subset};
pub use network::{BoundRule, Certificate, LayerSpec, NetworkPlan};
pub use rational::Rational;
pub use setfn::{LevelReport, SetFn};
pub use transform::{FanChange, PwlExpr, RationalPoint};
pub use verify::{Report, Status};
