//! Hodge theory on Carrollian `R^x`-bundles with a principal connection.
//!
//! A Carrollian `R^x`-bundle `P -> M` carries a degenerate metric `g` whose
//! kernel is the vertical direction. Choosing a connection one-form
//! `theta = dt/t + A_a dx^a` turns `G = g - theta (x) theta` into a Lorentzian
//! metric on `P`, and everything in this crate is built from that metric:
//!
//! * [`scalar`]: closed-form coefficient functions on a chart `(x^1..x^n, t)`
//!   with exact partial derivatives.
//! * [`forms`]: differential forms in the mixed coframe `{dx^a, theta}`,
//!   exterior and covariant derivatives, the Euler contraction and Lie
//!   derivative, and the horizontal/vertical split.
//! * [`hodge`]: the metric `G`, the volume form, inner products, the Hodge
//!   star, codifferential, Hodge-de Rham Laplacian and the
//!   closed/coclosed/harmonic classifier.
//! * [`maxwell`]: Carrollian electromagnetism on `R^3 x R^x`: symbolic field
//!   strengths and residuals, plane waves, duality and a Yee leapfrog solver
//!   marching in logarithmic time `u = ln|t|`.
//! * [`horizon`]: the Schwarzschild horizon bundle `S^2 x R^x`, its Hodge and
//!   Laplacian tables, regularity at `t = 0` and a separable harmonic scan.
//!
//! The `carroll` binary exposes the verification suites and the solver; see
//! [`cli`].

pub mod cli;
pub mod error;
pub mod forms;
pub mod hodge;
pub mod horizon;
pub mod maxwell;
pub mod random;
pub mod report;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
pub use forms::{CarrollBundle, Form, Monomial, Weight};
pub use scalar::{Point, SampleBox, ScalarExpr, Var};
