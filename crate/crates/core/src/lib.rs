//! Feedback-driven quantum reservoir computing.
//!
//! A fixed quantum feature-map circuit is reused as a temporal reservoir: the
//! left half encodes a sliding window of the input series, the right half
//! applies the inverse circuit parameterized by a classically fed-back signal
//! derived from the previous measurement. Only a linear readout is trained.
//!
//! The crate provides the whole desk-scale experimental apparatus around that
//! model: Mackey–Glass data generation, exact pure- and mixed-state circuit
//! simulation with parameterized noise channels, the recurrent reservoir loop,
//! linear readouts, classical baselines (ESN, MLP, ridge/lasso), and the
//! diagnostic drivers (memory capacity, echo-state convergence, parameter and
//! noise sweeps).
//!
//! The crate is `no_std` (with `alloc`); all file formats, caching, and the
//! command-line front end live in the companion `qrc-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod baselines;
pub mod error;
pub mod featuremap;
pub mod mackey_glass;
pub mod matrix;
pub mod quantum;
pub mod readout;
pub mod reservoir;
pub mod rng;

pub use error::{CoreError, Result};
pub use matrix::Matrix;
