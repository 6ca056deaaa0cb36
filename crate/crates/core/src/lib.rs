//! Numerical kernels for mean values of Hardy's function.
//!
//! Arbitrary-precision ζ, χ, θ and Z on top of `astro-float`, a binary64
//! critical-line evaluator for quadrature, the smoothing kernel and smoothed
//! approximate functional equation, divisor tables, stationary-phase
//! prediction and the moment experiments built from them.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod afe;
pub mod divisor;
pub mod error;
pub mod hp_numerics;
pub mod moments;
pub mod mp;
pub mod oscillatory;
pub mod precision;
pub mod smoothing;

pub use error::{Error, Result};
pub use mp::{ComplexValue, Mp, RealValue};
pub use precision::PrecisionContext;
