//! Chordal-distance statistics for uncertain SISO frequency responses.
//!
//! At a fixed frequency, the value `P(jw)` of an uncertain plant is a complex
//! random variable. Lifting it onto the Riemann sphere and measuring the
//! chordal distance to a nominal point turns the pointwise nu-gap ingredient
//! `kappa(P, Pbar)` into a scalar random variable `K` on `[0, 1]`. This crate
//! computes the distribution of `K` exactly and validates it by sampling:
//!
//! - [`riemann`]: stereographic lift/projection, the chordal metric, and the
//!   exact planar image of a chordal ball.
//! - [`densities`]: probability models for the uncertain plant value
//!   (Gaussian, uniform disc, truncated Gaussian) with deterministic
//!   counter-based sampling.
//! - [`pushforward`]: the joint density of the squared distance to the
//!   nominal and the squared modulus, via the two-circle intersection map.
//! - [`cdf`]: the CDF of `K` along two independent routes — a double
//!   integral over the pushforward density, and a planar-ball integral —
//!   plus a Monte-Carlo route.
//! - [`margins`]: pointwise robustness margins (gang of four, `rho`, the
//!   degradation inequality, grid stability margin).
//! - [`lti`] / [`sysid`]: rational transfer functions, exact zero-order-hold
//!   simulation, and a repeated-identification study that produces
//!   per-frequency uncertainty models feeding the CDF machinery.
//! - [`montecarlo`]: empirical CDFs with DKW confidence bands and the
//!   quadrature-vs-sampling comparison harness.
//!
//! The `examples/` directory contains one runnable example per capability;
//! the `chordal` binary exposes the same pipelines as batch subcommands.

pub mod cdf;
pub mod commands;
pub mod config;
pub mod densities;
pub mod error;
pub mod lti;
pub mod margins;
pub mod montecarlo;
pub mod pushforward;
pub mod quadrature;
pub mod riemann;
pub mod rng;
pub mod svg;
pub mod sysid;

pub use cdf::{CdfCurve, CdfMethod, CdfQuery, QuadratureSpec};
pub use densities::{Cov2, DensityModel, SupportBound};
pub use error::Error;
pub use lti::RationalTF;
pub use riemann::{chordal_distance, lift, project, PlaneDisc, PlanePoint, SpherePoint};
