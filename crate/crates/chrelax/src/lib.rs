//! Spectral Galerkin lab for a sixth-order Cahn-Hilliard model with inertial
//! relaxation.
//!
//! The model tracks an order parameter phi on a box with Neumann boundary
//! conditions. With w = -Delta phi + beta(phi) - lambda*phi and
//! mu = -Delta w + beta'(phi) w + (nu - lambda) w, the evolution is
//!
//! ```text
//!   tau * phi_tt + phi_t - Delta mu + sigma * phi = g
//! ```
//!
//! where tau >= 0 is the inertial relaxation time; tau = 0 is the parabolic
//! limit. Everything is discretized on the cosine eigenbasis of the Neumann
//! Laplacian, so all linear operators are diagonal on mode coefficients and
//! the nonlinear terms go through dealiased collocation grids.
//!
//! Module map:
//! - [`potential`]: the double-well splitting beta / f / F and its checks
//! - [`spectral`]: domains, coefficient fields, grid transforms
//! - [`sobolev`]: scale-of-spaces norms, inverse Neumann Laplacian, energy
//! - [`galerkin`]: the projected system (w, mu, stiffness, remainder, forcing)
//! - [`integrate`]: IMEX steppers and trajectory recording
//! - [`lab`]: reports, closed-form oracles, manufactured solutions, sweeps
//! - [`config`]: experiment configs (TOML) and their realization
//! - [`output`]: CSV/JSON artifact writers and readers
//! - [`verify`]: the named self-check suite behind `chrelax verify`

pub mod config;
pub mod error;
pub mod galerkin;
pub mod integrate;
pub mod lab;
pub mod output;
pub mod potential;
pub mod sobolev;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
