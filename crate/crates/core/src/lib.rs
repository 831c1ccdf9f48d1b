//! Exact arithmetic for the monoid of continuous nondecreasing surjections of
//! the Cantor space `b^ω`, Devlin similarity types of tuples of rationals, and
//! the colorings built from them.
//!
//! Module map:
//! - [`cantor`]: eventually-constant points, `≤_lex`, `ρ_b`, basic clopens.
//! - [`intervals`]: clopen intervals, depth partitions, filterings.
//! - [`surjections`]: surjections as filterings, composition, `ρ∞`, factoring.
//! - [`devlin`]: tangent numbers and similarity types.
//! - [`lab`]: the colorings and experiments.
//! - [`json`]: wire formats.
//! - [`random`]: seeded generators.
//! - [`oracle`]: brute-force reference implementations.
//! - [`suite`]: the verification suite behind `verify`.

pub mod cantor;
pub mod devlin;
pub mod error;
pub mod intervals;
pub mod json;
pub mod lab;
pub mod oracle;
pub mod random;
pub mod suite;
pub mod surjections;

pub use cantor::{Distance, Node, Point};
pub use error::{Error, Result};
pub use intervals::{BoundaryTuple, ClopenInterval, DepthPartition, Filtering};
pub use surjections::{SupDistance, Surjection};
