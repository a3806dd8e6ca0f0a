//! Numerical laboratory for anomalous localized resonance in core–shell–matrix
//! structures.
//!
//! The crate solves `∇·(a_η ∇u) = f` exactly, mode by mode, for circular
//! geometries with `a_η = A + iη` (`A = +1` in core and matrix, `-1` in the
//! shell), and evaluates primal (upper) and dual (lower) variational
//! certificates that bracket the dissipated energy `E_η = (η/2)∫|∇u|²`.
//!
//! Modules:
//! - [`harmonics`]: piecewise-harmonic fields, layer potentials and
//!   shifted-center interaction coefficients.
//! - [`radial`]: exact per-mode solver for concentric geometry, η sweeps,
//!   resonance classification.
//! - [`certificates`]: primal and dual trial pairs evaluated in closed form.
//! - [`eccentric`]: non-concentric circular core, certificate and a
//!   two-center Galerkin oracle.
//! - [`conformal`]: coreless shells mapped by a polynomial conformal map.
//! - [`plasmon_lab`]: plasmonic eigenvalue checks in higher dimensions.

pub mod certificates;
pub mod conformal;
pub mod eccentric;
mod error;
pub mod harmonics;
pub(crate) mod numerics;
pub mod plasmon_lab;
pub mod radial;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
