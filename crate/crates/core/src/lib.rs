//! Remez-type inequalities and smooth rigidity of zero sets.

// NaN must fail range checks, and the simplex kernels index several arrays in step.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curves;
pub mod fractal;
pub mod geometry;
pub mod lp;
pub mod poly;
pub mod prooftrace;
pub mod remez;
pub mod rigidity;
