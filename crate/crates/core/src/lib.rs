//! Numerical machinery for smooth functions on `R^n` whose derivatives are
//! controlled by a log-convex weight sequence `M` and a family of weights
//! `phi_m`, and for their holomorphic extensions to `C^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`sequences`]: the weight sequence `M`, conditions on it, and the
//!   log-convex dual sequence `K` with its sandwich constants `t1`, `t2`.
//! - [`weight`]: the associated weight `w_K(r) = sup_m ln(r^m / K_m)`, its
//!   trace index, discrete Legendre recovery and the doubling gap.
//! - [`phi`]: weight families `phi_m` and the shift-bound constants.
//! - [`models`]: test functions with exact jets and exact entire extensions.
//! - [`extension`]: Taylor extension in powers of `i y` around `Re z`.
//! - [`restriction`]: Cauchy-integral derivative recovery and the bound chain.
//! - [`seminorms`] and [`roundtrip`]: grid seminorm estimators and the two
//!   continuity checks.
//!
//! Everything here is `no_std` (with `alloc`); IO lives in the companion
//! `holoext` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod extension;
pub mod grid;
pub mod math;
pub mod models;
pub mod multi_index;
pub mod phi;
pub mod restriction;
pub mod roundtrip;
pub mod seminorms;
pub mod sequences;
pub mod weight;

pub use error::{Error, Result};
pub use num_complex::Complex64;
