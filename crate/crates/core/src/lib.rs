//! Asymmetric Orlicz zonotopes and their polars.
//!
//! The crate builds zonotope-like convex bodies whose support function is an
//! Orlicz norm of the positive parts of inner products with a generating
//! vector multiset, approximates those bodies and their polars by polytope
//! sandwiches, locates Santaló points, and runs shadow-system deformations
//! that interpolate between a multiset and its partially orthogonalized
//! image. A verification harness turns those primitives into reproducible
//! numeric experiments over batches of instances.

// Negated comparisons like `!(x > 0.0)` are load-bearing here: they reject
// NaN along with the out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod harness;
pub mod multisets;
pub mod norm;
pub mod phi;
pub mod shadow;
pub mod zonotope;
