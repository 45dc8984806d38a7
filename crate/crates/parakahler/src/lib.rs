//! Numerical geometry of surfaces in the para-complex projective plane.
//!
//! The crate covers split-complex algebra and the quadric `<x, chi> = 1`,
//! the twisted real form of `sl(3, C)` with its order-6 automorphism, frame
//! equations for immersions of arbitrary dimension, the complex-coordinate
//! surface theory (including the Tzitzeica equation), zero-curvature frame
//! integration with round-trip recovery of the invariants, and Gauss maps into
//! the associated homogeneous bundles.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and `rayon` for row-parallel grid loops.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_debug_implementations)]
// Index loops mirror the component formulas; `!(x > t)` also rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;
mod par;

pub mod frames;
pub mod gaussmaps;
pub mod grid;
pub mod integrator;
pub mod liealg;
pub mod paracomplex;
pub mod surface2d;

pub use error::{Error, Result};
pub use liealg::{Mat3C, Signature};
pub use num_complex::Complex64 as C64;
