#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cayley;
pub mod decomposition;
pub mod error;
pub mod flow;
pub mod group;
pub mod harness;
pub mod height;
pub mod linalg;
pub mod matrix;
pub mod random;
pub mod scalar;
pub mod space;
pub mod tolerance;
