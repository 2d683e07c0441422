//! Downlink coverage of distance-based joint transmission in cloud radio
//! access networks.
//!
//! Remote radio heads (RRHs) and users are independent Poisson point
//! processes. Every user is jointly served by all RRHs within a cooperation
//! radius `r1` using maximum ratio transmission, with a unit power budget per
//! user split across its serving RRHs in proportion to their channel gains.
//!
//! The crate evaluates this network on two independent tracks:
//!
//! * [`montecarlo`] samples topologies and Rayleigh fading and computes the
//!   SINR of a user placed at the origin, either exactly or under the
//!   simplifications the analysis relies on ([`montecarlo::SimMode`]).
//! * [`coverage`] computes the coverage probability through Gil-Pelaez
//!   inversion of the characteristic functions assembled in [`charfn`], with
//!   the counting distributions of [`setstats`] and the Gamma approximation of
//!   [`gamma`].
//!
//! [`validation`] cross-checks the two tracks against each other and against
//! closed-form oracles.

pub mod channel;
pub mod charfn;
pub mod coverage;
pub mod error;
pub mod gamma;
pub mod geometry;
pub mod montecarlo;
pub mod params;
pub mod quad;
pub mod setstats;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
pub use params::{NetworkParams, SeedSpec, TruncationPolicy};

pub use num_complex::Complex64;
