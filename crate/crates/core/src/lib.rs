//! Intracavity-EIT Faraday magnetometer model.
//!
//! Rates and detunings are in units of the excited-state half-linewidth γ.
//! SI quantities enter only through [`sensitivity::PhysicalConstants`] and
//! [`doppler::DopplerConfig`].

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod doppler;
pub mod error;
pub mod figures;
pub mod io;
pub mod optimize;
pub mod params;
pub mod quadrature;
pub mod response;
pub mod search;
pub mod sensitivity;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use params::{ModelParams, Polarization, ShiftMode, SigmaMapping, VelocityClass};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
