//! Exact partition functions, mean winding numbers and their large-`N`
//! asymptotics for determinantal curves `p ↦ det(a(p)K₁ + b(p)K₂)` of additive
//! two-matrix models built from Ginibre and Muttalib–Borodin Pólya ensembles.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] — special functions, adaptive and circle quadrature, small
//!   complex linear algebra;
//! * [`curves`] — Laurent-polynomial parameter functions `a`, `b` and their
//!   zero structure on the unit circle;
//! * [`polya`] — Muttalib–Borodin weights, the ratio weight `ω̂` and Mellin data;
//! * [`partition`] — exact finite-`N` partition functions and the exact mean
//!   winding number;
//! * [`sampling`], [`winding`] — Monte Carlo realisations and winding counts;
//! * [`gaussian_field`] — the Ginibre random field with a general covariance;
//! * [`asymptotics`] — the large-`N` expansion and its ingredients;
//! * [`registry`], [`verify`] — named strategy lookup and the invariant suite.

pub mod error;
pub mod numerics;
pub mod curves;
pub mod polya;
pub mod partition;
pub mod sampling;
pub mod winding;
pub mod gaussian_field;
pub mod asymptotics;
pub mod registry;
pub mod verify;

pub use error::{Error, Result};
