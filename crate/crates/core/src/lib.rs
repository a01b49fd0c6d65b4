//! Outage, maximum femtocell density and rate backoff for a macrocell
//! downlink using delayed limited-feedback beamforming, with Poisson
//! distributed femtocell interferers.
//!
//! The closed forms live in [`analytics`] and [`backoff`]; [`simulator`]
//! provides the Monte Carlo counterpart used to cross-check them, and
//! [`experiment`] drives both from the command line.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod backoff;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mathkit;
pub mod params;
pub mod simulator;
pub mod validation;

pub use error::{Error, Result};
pub use params::SystemParams;
