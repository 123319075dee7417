//! Lyapunov-based exponential stability certificates for semilinear systems
//! `ẋ = Ax + f(x)`, together with an exactly solvable diagonal system whose
//! nonlinearity has a zero Gateaux derivative at the origin and still makes
//! the origin unstable.
//!
//! - [`numerics`]: dense kernels (Jacobi eigensolver, LU, Lyapunov solver).
//! - [`certificate`]: `P₂ = 2P + Q/ω`, spectral bounds, basin and decay checks.
//! - [`scalar_mode`]: closed forms for `ẋ = (−1 + 3|x|^{1/n})x`.
//! - [`semilinear_sim`]: adaptive Dormand–Prince integration with blow-up detection.
//! - [`counterexample`]: the truncated ℓ² system and its instability demo.
//! - [`derivative_probe`]: Gateaux quotients and Fréchet ratios at the origin.
//! - [`cli`]: the `semistab` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod certificate;
pub mod cli;
pub mod counterexample;
pub mod derivative_probe;
pub mod error;
pub mod numerics;
pub mod sampling;
pub mod scalar_mode;
pub mod semilinear_sim;

pub use error::{Error, Result};
