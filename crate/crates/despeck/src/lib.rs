//! Simulation, preprocessing, self-supervised estimation and evaluation for
//! multi-temporal single-look-complex SAR stacks.
//!
//! The pipeline mirrors the stages exposed by the `despeck` binary:
//!
//! 1. [`sim`] synthesizes speckled stacks with controllable temporal
//!    coherence and exact ground truth;
//! 2. [`preprocess`] recenters spectra and optionally whitens each date
//!    against the reference date;
//! 3. [`loss`] and [`net`] define the self-supervised objective and a small
//!    convolutional encoder-decoder with its own reverse-mode engine;
//! 4. [`train`] fits the estimator and [`eval`] scores it against the
//!    simulator truth.

pub mod error;
pub mod exec;
pub mod rng;
pub mod slcs;
pub mod spectral;
pub mod stack;

pub mod sim;

pub use error::{Error, Result};
