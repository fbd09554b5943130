//! Fourier sum-of-squares certificates for MAX-SAT.
//!
//! A certificate writes the shifted objective `f = f_phi - L + 1/2` as
//! `sum g_j^2 / sum h_i^2` up to a residual small enough that integrality of
//! `f_phi` forces `f_phi >= L` everywhere on the cube. The crate builds such
//! certificates from sparse semidefinite programs and checks them in exact
//! rational arithmetic.

pub mod approx;
pub mod certify;
pub mod charfn;
pub mod cli;
pub mod cnf;
pub mod corpus;
pub mod decimal;
pub mod error;
pub mod fourier;
pub mod sdp;
pub mod validate;

pub use error::{FsosError, Result};
