//! Deformation complexes of pasting diagrams of finite k-linear categories.
//!
//! The crate assembles the block coboundary matrices of a pasting diagram's
//! deformation complex, computes cohomology exactly, runs order-by-order
//! deformation extension with obstruction and cocycle checks, and mechanically
//! certifies the polygonal cancellation arguments behind the
//! obstructions-are-cocycles theorems.

pub mod scalar;
pub mod matrix;
pub mod fincat;
pub mod samples;
pub mod hochschild;
pub mod diagram;
pub mod complex;
pub mod shapes;
