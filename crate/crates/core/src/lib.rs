//! Computational objects behind resonance-method lower bounds for
//! `max_{t in [T,2T]} |zeta^(l)(1+it)|`.
//!
//! The crate is organised bottom-up:
//!
//! * [`precision`]: the [`Real`](precision::Real) abstraction with a hardware
//!   double backend and an arbitrary-precision decimal backend.
//! * [`primes`]: sieving, prime counting, Mertens products, constants and
//!   iterated logarithms.
//! * [`jet`]: truncated Taylor arithmetic used to differentiate Euler products.
//! * [`resonator`]: the divisor-closed set `M`, its layers `M_j`, the weighted
//!   sum `S(x; l)` and the partition lower bound.
//! * [`zeta`]: the truncated Dirichlet polynomial for `(-1)^l zeta^(l)(1+it)`
//!   and an Euler-Maclaurin / Cauchy-circle oracle.
//! * [`bump`], [`quadrature`], [`nufft`]: the smooth weight, its Fourier
//!   transform and the numerical machinery for oscillatory integrals.
//! * [`engine`]: resonator, moments, certificate and the maximum scan.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bump;
pub mod engine;
pub mod error;
pub mod jet;
pub mod nufft;
pub mod precision;
pub mod primes;
pub mod quadrature;
pub mod resonator;
pub mod rng;
pub mod zeta;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use precision::{BigReal, Precision, Real};
