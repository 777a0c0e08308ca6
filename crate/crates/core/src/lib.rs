//! Geometric inhomogeneous random graphs, bootstrap percolation, and the
//! closed-form predictions that describe how an infection started in a
//! small region spreads: the metastability threshold, the round count to a
//! constant active fraction, per-vertex infection times, growth envelopes
//! for the infected region, and boundary-cut quarantine.
//!
//! The crate is organized along the pipeline:
//!
//! * [`geometry`] -- the d-dimensional torus under the ∞-norm;
//! * [`weights`] -- power-law vertex weights;
//! * [`girg`] -- vertex and edge sampling (naive reference and fast
//!   cell-partitioned samplers);
//! * [`bootstrap`] -- the percolation engine;
//! * [`predictions`] -- closed-form quantities;
//! * [`containment`] -- boundary-cut quarantine experiments;
//! * [`harness`] -- experiment drivers, CSV emission, validation suite;
//! * [`rng`] -- counter-based keyed random streams (all determinism flows
//!   from here).

pub mod bootstrap;
pub mod config;
pub mod containment;
pub mod error;
pub mod geometry;
pub mod girg;
pub mod harness;
pub mod io;
pub mod predictions;
pub mod rng;
pub mod stats;
pub mod weights;

pub use error::{Error, Result};
