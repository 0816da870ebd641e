//! Reconstruction of functions on the two-sphere from noisy point samples of
//! their convolution with a known zonal filter.
//!
//! The pipeline is:
//!
//! 1. [`geometry`] builds an explicit equal-area partition of S² and picks one
//!    node per region, giving a Marcinkiewicz-Zygmund sampling family.
//! 2. [`filters`] turns a radial filter profile into its multiplier sequence
//!    `b_m`, so that convolution acts as `F f = Σ b_m Π_m f`.
//! 3. [`forward`] applies `F`, samples at the nodes and injects bounded noise.
//! 4. [`reconstruct`] solves the weighted least-squares problem over
//!    polynomials of degree `≤ m` through an SVD pseudoinverse.
//! 5. [`certify`] measures the frame constants of the family and assembles the
//!    a-priori error bounds that accompany every reconstruction.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front-end live in the `mzsphere` companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certify;
pub mod error;
pub mod filters;
pub mod forward;
pub mod geometry;
pub mod harmonics;
pub mod quadrature;
pub mod reconstruct;
pub mod special;

pub use error::{Error, Result};
