//! Numerical toolkit for SL(2) spin systems on constrained phase spaces.
//!
//! The crate realizes three integrable models — a spin-extended SL(2)
//! Euler–Arnold top, a spin-extended two-body elliptic Calogero–Moser
//! system, and an extended rational SL(2) Gaudin chain — on an explicitly
//! constructed Darboux phase space with second-class constraints and Dirac
//! brackets. Lax operators are assembled from theta-function machinery
//! (`elliptic`), flows are integrated and audited in `flow`, and `lie`
//! provides the dimension/integral-count arithmetic for all simple group
//! types.
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion
//! `spinhiggs` CLI crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod elliptic;
pub mod flow;
pub mod lie;
pub mod linalg;
pub mod mat2;
pub mod models;
pub mod rng;
pub mod symplectic;

/// Complex scalar used throughout the crate.
pub type Complex = num_complex::Complex<f64>;

/// Shorthand constructor for [`Complex`].
#[inline]
pub fn cx(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}
